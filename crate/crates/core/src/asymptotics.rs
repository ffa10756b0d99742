//! Explicit large-deviations approximation of the finite-horizon ruin
//! probability and its pre-constant in three mutually checking forms.
//!
//! With k = (r+1) alpha, level a > 0 and drift c (a + c > 0):
//!
//!   C_LCR = (1/r!) int_0^1 t^r (a + c_+ t - c_-)^(-k) dt
//!         = a^(-k) 2F1(r+1, k; r+2; -c/a) / (r+1)!          (c > 0)
//!         = (a + c)^(-k) / (r+1)!                            (c < 0)
//!   C_ECOMOR = (r+1)^k C_LCR
//!
//! and the approximation itself is
//!
//!   psi(n a, n) ~ C * (lambda * n * tail(n))^(r+1),
//!
//! using the exact claim tail rather than the limiting pure power, since the
//! finite-n comparisons are made against exact-tail simulation.

use crate::claims::ClaimModel;
use crate::error::Error;
use crate::premiums::{check_level_valid, drift, net_premium, ScenarioConfig};
use crate::quad;
use crate::riskpath::TreatyKind;
use crate::specfun::{factorial, gamma_finite_sum, hyp2f1_ruin};
use crate::Result;

/// Inputs of the pre-constant: treaty, reinsured count, tail index, scaled
/// level and drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreconstantInputs {
    pub kind: TreatyKind,
    pub r: usize,
    pub alpha: f64,
    pub a: f64,
    pub c: f64,
}

impl PreconstantInputs {
    pub fn new(kind: TreatyKind, r: usize, alpha: f64, a: f64, c: f64) -> Self {
        PreconstantInputs { kind, r, alpha, a, c }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0) {
            return Err(Error::domain(format!("alpha must exceed 1, got {}", self.alpha)));
        }
        if !(self.a > 0.0) {
            return Err(Error::domain(format!("level a must be positive, got {}", self.a)));
        }
        if self.r as f64 + 2.0 > 170.0 {
            return Err(Error::domain("r too large for f64 factorials"));
        }
        check_level_valid(self.a, self.c)
    }

    fn k(&self) -> f64 {
        (self.r as f64 + 1.0) * self.alpha
    }

    fn treaty_factor(&self) -> f64 {
        match self.kind {
            TreatyKind::Lcr => 1.0,
            TreatyKind::Ecomor => (self.r as f64 + 1.0).powf(self.k()),
        }
    }
}

/// Pre-constant via the hypergeometric/closed-form case split. The c = 0
/// boundary is not covered by the two-case display; it is defined as the
/// common two-sided limit a^(-k) / (r+1)! and certified by a continuity test.
pub fn preconstant(inputs: &PreconstantInputs) -> Result<f64> {
    inputs.validate()?;
    let k = inputs.k();
    let rp1 = inputs.r + 1;
    let base = if inputs.c > 0.0 {
        inputs.a.powf(-k) * hyp2f1_ruin(inputs.r as u32, inputs.alpha, -inputs.c / inputs.a)?
            / factorial(rp1)
    } else if inputs.c < 0.0 {
        (inputs.a + inputs.c).powf(-k) / factorial(rp1)
    } else {
        inputs.a.powf(-k) / factorial(rp1)
    };
    Ok(base * inputs.treaty_factor())
}

/// Pre-constant via the exact Gamma finite-sum (r integrations by parts);
/// defined for c > 0 only.
pub fn preconstant_gamma_form(inputs: &PreconstantInputs) -> Result<f64> {
    inputs.validate()?;
    if !(inputs.c > 0.0) {
        return Err(Error::domain(format!(
            "gamma finite-sum form requires c > 0, got {}",
            inputs.c
        )));
    }
    let base = gamma_finite_sum(inputs.r as u32, inputs.alpha, inputs.a, inputs.c)?;
    Ok(base * inputs.treaty_factor())
}

/// Pre-constant by adaptive quadrature of the defining integral; the
/// designated independent oracle (also run by the CLI `validate` command).
pub fn preconstant_quadrature(inputs: &PreconstantInputs) -> Result<f64> {
    inputs.validate()?;
    let k = inputs.k();
    let (a, c_plus, c_minus) = (inputs.a, inputs.c.max(0.0), (-inputs.c).max(0.0));
    let r = inputs.r as i32;
    let integral = quad::integrate(
        |t| t.powi(r) * (a + c_plus * t - c_minus).powf(-k),
        0.0,
        1.0,
        1e-300,
        1e-12,
    );
    Ok(integral / factorial(inputs.r) * inputs.treaty_factor())
}

/// Large-deviations approximation psi(n a, n) ~ C (lambda n tail(n))^(r+1)
/// with the drift implied by the scenario's own net premium at horizon n.
pub fn asymptotic_ruin_probability(cfg: &ScenarioConfig) -> Result<f64> {
    let c = drift(net_premium(cfg)?.net_rate, cfg.lambda, cfg.alpha);
    asymptote_with_drift(
        cfg.treaty.kind,
        cfg.treaty.r,
        cfg.alpha,
        cfg.lambda,
        cfg.a,
        c,
        cfg.n,
    )
}

/// Same approximation with an externally fixed drift; used by sweeps where
/// the premium is contracted at one horizon while the simulation horizon
/// varies.
pub fn asymptote_with_drift(
    kind: TreatyKind,
    r: usize,
    alpha: f64,
    lambda: f64,
    a: f64,
    c: f64,
    n: f64,
) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::domain(format!("horizon n must be >= 1, got {n}")));
    }
    let model = ClaimModel::shifted_pareto(alpha)?;
    let pre = preconstant(&PreconstantInputs::new(kind, r, alpha, a, c))?;
    let rate = lambda * n * model.tail(n)?;
    Ok(pre * rate.powi(r as i32 + 1))
}

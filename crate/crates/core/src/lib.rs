//! Finite-horizon ruin probabilities of a compound Poisson risk process under
//! LCR (largest claim reinsurance) and ECOMOR (excess over the (r+1)-st largest
//! claim) treaties with regularly varying claim sizes.
//!
//! The crate has two independent routes to the same quantity and a simulation
//! engine that cross-checks both:
//!
//! * [`asymptotics`]: the explicit single-big-jump-family approximation
//!   `psi(na, n) ~ C * (lambda * n * tail(n))^(r+1)`, with the pre-constant `C`
//!   evaluated three ways (hypergeometric series, Gamma finite sum, adaptive
//!   quadrature) that must agree.
//! * [`montecarlo`]: crude Monte Carlo and a mixture importance-sampling
//!   estimator conditioned on "at least r+1 jumps of scaled size >= delta",
//!   which keeps the relative error bounded as the event becomes rare.
//!
//! Supporting modules: [`specfun`] (log-gamma, incomplete gamma, the specific
//! Gauss 2F1 evaluation), [`quad`] (adaptive Gauss-Kronrod), [`claims`]
//! (shifted Pareto claim model with exact conditional samplers), [`riskpath`]
//! (path generation and the ruin functionals), [`premiums`] (expected value
//! principle premiums) and [`rng`] (splittable counter-seeded streams).

// `!(x > 0.0)` style comparisons reject NaN on purpose; frozen reference
// constants keep every digit of their 50-digit computations.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod claims;
pub mod error;
pub mod montecarlo;
pub mod premiums;
pub mod quad;
pub mod riskpath;
pub mod rng;
pub mod specfun;

pub mod asymptotics;

pub use claims::ClaimModel;
pub use error::Error;
pub use montecarlo::{EstimatorResult, SimControls};
pub use premiums::ScenarioConfig;
pub use riskpath::{SamplePath, TreatyKind, TreatySpec};
pub use rng::Stream;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// C-style `%.6e` formatting (two-digit exponent with sign), used for every
/// numeric CSV field so outputs are byte-stable across runs.
pub fn fmt_e(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let s = format!("{x:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("exponent digits");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

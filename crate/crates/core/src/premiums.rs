//! Expected reinsured amounts and expected-value-principle premiums.
//!
//! For Poisson arrivals with shifted Pareto claims the expected reinsured
//! amounts have closed forms in lower incomplete gamma functions:
//!
//!   E L^r_t = (lt)^(1/alpha) sum_{i=1}^r g(i - 1/alpha, lt)/G(i)
//!             - sum_{i=1}^r g(i, lt)/G(i)
//!   E E^r_t = E L^r_t with correction terms
//!             - r (lt)^(1/alpha) g(r+1 - 1/alpha, lt)/G(r+1) + r g(r+1, lt)/G(r+1)
//!
//! where lt = lambda t. The annual retained premium over a contract of n
//! years is q = (1 + theta) lambda E[X] - (1 + theta') E R_n / n: the
//! reinsurance contract runs for the whole period and its premium is spread
//! uniformly over it.

use crate::claims::ClaimModel;
use crate::error::Error;
use crate::riskpath::{TreatyKind, TreatySpec};
use crate::specfun::{ln_gamma_unchecked, regularized_lower_gamma};
use crate::Result;

/// One experiment scenario: treaty, tail index, arrival rate, safety
/// loadings, contract/scaling horizon n (years) and scaled capital level a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub treaty: TreatySpec,
    pub alpha: f64,
    pub lambda: f64,
    /// Insurer safety loading theta >= 0.
    pub theta: f64,
    /// Reinsurer safety loading theta' >= 0.
    pub theta_re: f64,
    /// Contract horizon in years; also the scaling parameter of the
    /// asymptotic regime u = n a, T = n.
    pub n: f64,
    /// Scaled initial capital level a > 0.
    pub a: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0) {
            return Err(Error::domain(format!("alpha must exceed 1, got {}", self.alpha)));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::domain(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.theta >= 0.0) || !(self.theta_re >= 0.0) {
            return Err(Error::domain("safety loadings must be nonnegative"));
        }
        if !(self.n > 0.0) {
            return Err(Error::domain(format!("horizon n must be positive, got {}", self.n)));
        }
        if !(self.a > 0.0) {
            return Err(Error::domain(format!("level a must be positive, got {}", self.a)));
        }
        Ok(())
    }

    pub fn claim_model(&self) -> Result<ClaimModel> {
        ClaimModel::shifted_pareto(self.alpha)
    }
}

/// gamma(k, s) / Gamma(i) computed through the regularized function and a
/// log-space Gamma ratio, so large arguments neither overflow nor cancel.
fn gamma_ratio_term(k: f64, s: f64, i: usize) -> Result<f64> {
    let p = regularized_lower_gamma(k, s)?;
    Ok(p * (ln_gamma_unchecked(k) - ln_gamma_unchecked(i as f64)).exp())
}

/// Expected LCR reinsured amount E L^r_t for Poisson(lambda) arrivals of
/// shifted Pareto(alpha) claims over [0, t]. Zero when r = 0.
pub fn expected_lcr(r: usize, lambda: f64, t: f64, alpha: f64) -> Result<f64> {
    expected_reinsured_sums(r, lambda, t, alpha).map(|(lcr, _)| lcr)
}

/// Expected ECOMOR reinsured amount E E^r_t; zero when r = 0.
pub fn expected_ecomor(r: usize, lambda: f64, t: f64, alpha: f64) -> Result<f64> {
    expected_reinsured_sums(r, lambda, t, alpha).map(|(_, eco)| eco)
}

/// Expected reinsured amount for either treaty.
pub fn expected_reinsured(treaty: &TreatySpec, lambda: f64, t: f64, alpha: f64) -> Result<f64> {
    match treaty.kind {
        TreatyKind::Lcr => expected_lcr(treaty.r, lambda, t, alpha),
        TreatyKind::Ecomor => expected_ecomor(treaty.r, lambda, t, alpha),
    }
}

fn expected_reinsured_sums(r: usize, lambda: f64, t: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 1.0) {
        return Err(Error::domain(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(lambda > 0.0) || !(t > 0.0) {
        return Err(Error::domain("lambda and t must be positive"));
    }
    if r == 0 {
        return Ok((0.0, 0.0));
    }
    let lt = lambda * t;
    let pow = lt.powf(1.0 / alpha);
    let mut frac_sum = 0.0; // sum_i gamma(i - 1/alpha, lt) / Gamma(i)
    let mut int_sum = 0.0; // sum_i gamma(i, lt) / Gamma(i) = sum_i P(i, lt)
    for i in 1..=r {
        frac_sum += gamma_ratio_term(i as f64 - 1.0 / alpha, lt, i)?;
        int_sum += regularized_lower_gamma(i as f64, lt)?;
    }
    let lcr = pow * frac_sum - int_sum;
    let rf = r as f64;
    let frac_corr = rf * gamma_ratio_term(r as f64 + 1.0 - 1.0 / alpha, lt, r + 1)?;
    let int_corr = rf * regularized_lower_gamma(r as f64 + 1.0, lt)?;
    let ecomor = pow * (frac_sum - frac_corr) - (int_sum - int_corr);
    Ok((lcr, ecomor))
}

/// Premium decomposition of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PremiumBreakdown {
    /// (1 + theta) lambda E[X]: the insurer's gross premium rate.
    pub gross_rate: f64,
    /// E R_n / n: annualized expected reinsured amount (the pi columns of
    /// the premium table are these unloaded rates).
    pub expected_reinsured_rate: f64,
    /// (1 + theta') E R_n / n: the reinsurance premium rate actually paid.
    pub reinsurance_premium_rate: f64,
    /// q = gross - reinsurance premium: the cedent's retained premium rate.
    pub net_rate: f64,
}

/// Net retained premium rate q and its components for a scenario.
pub fn net_premium(cfg: &ScenarioConfig) -> Result<PremiumBreakdown> {
    cfg.validate()?;
    let gross = (1.0 + cfg.theta) * cfg.lambda / (cfg.alpha - 1.0);
    let e_rate = expected_reinsured(&cfg.treaty, cfg.lambda, cfg.n, cfg.alpha)? / cfg.n;
    let reins = (1.0 + cfg.theta_re) * e_rate;
    Ok(PremiumBreakdown {
        gross_rate: gross,
        expected_reinsured_rate: e_rate,
        reinsurance_premium_rate: reins,
        net_rate: gross - reins,
    })
}

/// Net drift c = q - lambda E[X] of the scaled process; can have either sign.
pub fn drift(q: f64, lambda: f64, alpha: f64) -> f64 {
    q - lambda / (alpha - 1.0)
}

/// Drift of a scenario under its own net premium.
pub fn drift_for(cfg: &ScenarioConfig) -> Result<f64> {
    Ok(drift(net_premium(cfg)?.net_rate, cfg.lambda, cfg.alpha))
}

/// The asymptotic formulas require a + c > 0; below that threshold the ruin
/// probability tends to one (law of large numbers regime).
pub fn check_level_valid(a: f64, c: f64) -> Result<()> {
    if a + c > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "requires a + c > 0 (ruin is certain in the limit): a = {a}, c = {c}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riskpath::{TreatyKind, TreatySpec};
    use crate::rng::Stream;

    fn rel_err(v: f64, reference: f64) -> f64 {
        (v - reference).abs() / reference.abs().max(1e-300)
    }

    fn premium_table_scenario(kind: TreatyKind, r: usize) -> ScenarioConfig {
        ScenarioConfig {
            treaty: TreatySpec::new(kind, r),
            alpha: 1.5,
            lambda: 10.0,
            theta: 0.2,
            theta_re: 0.3,
            n: 20.0,
            a: 20.0,
        }
    }

    #[test]
    fn zero_reinsured_claims_mean_zero_expectation() {
        assert_eq!(expected_lcr(0, 10.0, 20.0, 1.5).unwrap(), 0.0);
        assert_eq!(expected_ecomor(0, 10.0, 20.0, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn vanishing_horizon_vanishes() {
        assert!(expected_lcr(2, 10.0, 1e-12, 1.5).unwrap() < 1e-6);
        assert!(expected_ecomor(2, 10.0, 1e-12, 1.5).unwrap() < 1e-6);
    }

    #[test]
    fn expected_values_match_references() {
        // 50-digit references for E L^r_t and E E^r_t
        let cases = [
            (2usize, 1.0, 5.0, 2.5, 2.5392388829954278941, 1.7968293016007318498),
            (1, 10.0, 20.0, 1.5, 90.618409139511284690, 61.078939426340856460),
            (3, 0.7, 11.0, 1.2, 35.551814312693275313, 32.108381858909565957),
        ];
        for (r, lambda, t, alpha, el, ee) in cases {
            assert!(rel_err(expected_lcr(r, lambda, t, alpha).unwrap(), el) < 1e-11);
            assert!(rel_err(expected_ecomor(r, lambda, t, alpha).unwrap(), ee) < 1e-11);
        }
    }

    #[test]
    fn ecomor_below_lcr_and_monotone() {
        for r in 1..6usize {
            for &lt in &[0.5, 5.0, 50.0, 2e4] {
                for &alpha in &[1.1, 1.5, 2.5] {
                    let el = expected_lcr(r, 1.0, lt, alpha).unwrap();
                    let ee = expected_ecomor(r, 1.0, lt, alpha).unwrap();
                    assert!(ee <= el + 1e-12, "r={r} lt={lt} alpha={alpha}");
                    assert!(ee >= 0.0);
                    let el_next_r = expected_lcr(r + 1, 1.0, lt, alpha).unwrap();
                    let ee_next_r = expected_ecomor(r + 1, 1.0, lt, alpha).unwrap();
                    assert!(el_next_r >= el - 1e-12, "LCR not monotone in r");
                    assert!(ee_next_r >= ee - 1e-12, "ECOMOR not monotone in r");
                    let el_next_t = expected_lcr(r, 1.0, lt * 1.7, alpha).unwrap();
                    let ee_next_t = expected_ecomor(r, 1.0, lt * 1.7, alpha).unwrap();
                    assert!(el_next_t >= el - 1e-12, "LCR not monotone in t");
                    assert!(ee_next_t >= ee - 1e-12, "ECOMOR not monotone in t");
                }
            }
        }
    }

    #[test]
    fn monte_carlo_cross_check_of_expected_amounts() {
        // alpha = 2.5 keeps the variance finite; 1e6 simulated periods
        let model = ClaimModel::shifted_pareto(2.5).unwrap();
        let mut rng = Stream::new(20240915);
        let (lambda, t, r) = (1.0, 5.0, 2usize);
        let reps = 1_000_000;
        let (mut sum_l, mut sumsq_l, mut sum_e, mut sumsq_e) = (0.0, 0.0, 0.0, 0.0);
        let mut sizes: Vec<f64> = Vec::new();
        for _ in 0..reps {
            let n = rng.poisson(lambda * t);
            sizes.clear();
            for _ in 0..n {
                sizes.push(model.sample(&mut rng));
            }
            sizes.sort_unstable_by(|a, b| b.total_cmp(a));
            let retention = if sizes.len() > r { sizes[r] } else { 0.0 };
            let l: f64 = sizes.iter().take(r).sum();
            let e: f64 = l - (r.min(sizes.len())) as f64 * retention;
            sum_l += l;
            sumsq_l += l * l;
            sum_e += e;
            sumsq_e += e * e;
        }
        let m = reps as f64;
        let (mean_l, mean_e) = (sum_l / m, sum_e / m);
        let se_l = ((sumsq_l / m - mean_l * mean_l) / m).sqrt();
        let se_e = ((sumsq_e / m - mean_e * mean_e) / m).sqrt();
        let want_l = expected_lcr(r, lambda, t, 2.5).unwrap();
        let want_e = expected_ecomor(r, lambda, t, 2.5).unwrap();
        assert!(
            (mean_l - want_l).abs() < 3.0 * se_l,
            "LCR {mean_l} vs {want_l} (se {se_l})"
        );
        assert!(
            (mean_e - want_e).abs() < 3.0 * se_e,
            "ECOMOR {mean_e} vs {want_e} (se {se_e})"
        );
    }

    #[test]
    fn premium_table_reproduction() {
        // 50-digit references for the n=20, lambda=10, alpha=1.5,
        // theta=0.2, theta'=0.3 premium table
        let rows = [
            // r, pi_L, pi_E, q_L, q_E
            (1usize, 4.5309204569755642345, 3.0539469713170428230, 18.109803405931766495, 20.029868937287844330),
            (2, 6.0078939426340856460, 4.0719292950893904307, 16.189737874575688660, 18.706491916383792440),
            (3, 6.9758762664064332536, 4.7505841776042888358, 14.931360853671636770, 17.824240569114424514),
        ];
        for (r, pi_l, pi_e, q_l, q_e) in rows {
            let bl = net_premium(&premium_table_scenario(TreatyKind::Lcr, r)).unwrap();
            let be = net_premium(&premium_table_scenario(TreatyKind::Ecomor, r)).unwrap();
            assert!(rel_err(bl.expected_reinsured_rate, pi_l) < 1e-11, "pi_L r={r}");
            assert!(rel_err(be.expected_reinsured_rate, pi_e) < 1e-11, "pi_E r={r}");
            assert!(rel_err(bl.net_rate, q_l) < 1e-11, "q_L r={r}");
            assert!(rel_err(be.net_rate, q_e) < 1e-11, "q_E r={r}");
            assert!(rel_err(bl.reinsurance_premium_rate, 1.3 * pi_l) < 1e-11);
        }
        let b0 = net_premium(&premium_table_scenario(TreatyKind::Lcr, 0)).unwrap();
        assert!(rel_err(b0.net_rate, 24.0) < 1e-12);
        assert_eq!(b0.expected_reinsured_rate, 0.0);
        assert!(rel_err(drift(b0.net_rate, 10.0, 1.5), 4.0) < 1e-12);
    }

    #[test]
    fn drift_examples() {
        let c_l = drift_for(&premium_table_scenario(TreatyKind::Lcr, 1)).unwrap();
        let c_e = drift_for(&premium_table_scenario(TreatyKind::Ecomor, 1)).unwrap();
        assert!(rel_err(c_l, -1.8901965940682335048) < 1e-9);
        assert!(rel_err(c_e, 0.029868937287844330110) < 1e-7);
    }

    #[test]
    fn level_guard() {
        assert!(check_level_valid(20.0, -1.89).is_ok());
        assert!(check_level_valid(1.0, -1.89).is_err());
        assert!(check_level_valid(1.89, -1.89).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = premium_table_scenario(TreatyKind::Lcr, 1);
        assert!(cfg.validate().is_ok());
        cfg.alpha = 1.0;
        assert!(cfg.validate().is_err());
        cfg.alpha = 1.5;
        cfg.a = 0.0;
        assert!(cfg.validate().is_err());
    }
}

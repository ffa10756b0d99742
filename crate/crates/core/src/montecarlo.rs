//! Crude Monte Carlo and the mixture importance-sampling estimator for the
//! finite-horizon ruin probability psi(n a, n).
//!
//! The proposal measure is Q = w P + (1-w) P(. | B), where B is the event
//! "at least r+1 claims of size >= n delta". A path drawn from Q is scored
//! with the likelihood ratio
//!
//!   Z = 1{ruin} / (w + (1-w) 1{path in B} / P(B)),
//!
//! where membership in B is re-evaluated on the realized path (an
//! unconditional draw can land in B, and the ratio is wrong otherwise).
//! Z <= 1/w always. Conditional paths are built by Poisson thinning --
//! big and small claims are independent Poisson streams, and only the big
//! count is conditioned -- so the sampler is exact, never rejecting.
//!
//! Replicate i draws all of its randomness from `Stream::for_replicate(seed,
//! i)`; batches accumulate in fixed index order with compensated summation,
//! so serial and parallel runs produce bit-identical results.

use rayon::prelude::*;

use crate::claims::ClaimModel;
use crate::error::Error;
use crate::premiums::{net_premium, ScenarioConfig};
use crate::riskpath::{generate_path_into, is_ruin, sort_by_epoch, Claim, SamplePath, TreatySpec};
use crate::rng::Stream;
use crate::specfun::{ln_gamma_unchecked, regularized_lower_gamma};
use crate::Result;

/// Simulation controls: replicate count, big-jump threshold delta (scaled
/// units), mixture weight w, master seed and aggregation batch size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimControls {
    pub samples: u64,
    pub delta: f64,
    /// Mixture weight in (0, 1]; w = 1 degenerates to crude Monte Carlo and
    /// is exposed for testing only.
    pub w: f64,
    pub seed: u64,
    pub batch: u64,
}

impl SimControls {
    pub fn new(samples: u64, delta: f64, w: f64, seed: u64) -> Self {
        SimControls {
            samples,
            delta,
            w,
            seed,
            batch: 4096,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::domain("sample count must be at least 1"));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::domain(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.w > 0.0 && self.w <= 1.0) {
            return Err(Error::domain(format!("w must lie in (0, 1], got {}", self.w)));
        }
        if self.batch == 0 {
            return Err(Error::domain("batch size must be at least 1"));
        }
        Ok(())
    }
}

/// Point estimate with normal-approximation error bars.
///
/// `variance` is the sample variance of the replicate values; the 95%
/// half-width is 1.96 sqrt(variance / samples). With very small hit counts
/// the normal approximation is optimistic. Bit-exactly reproducible from
/// (scenario, controls).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorResult {
    pub estimate: f64,
    pub variance: f64,
    pub ci95_halfwidth: f64,
    pub samples: u64,
    /// ci95_halfwidth / estimate; infinite when the estimate is zero.
    pub relative_error: f64,
}

/// Default big-jump threshold (a - c_-) / (3 (r+1)): strictly below the
/// jump-size lower bounds of the minimal ruin configurations for both
/// treaties, with margin, so the conditioning event covers the ruin paths.
pub fn default_delta(a: f64, c: f64, r: usize) -> Result<f64> {
    let slack = a - (-c).max(0.0);
    if !(slack > 0.0) {
        return Err(Error::domain(format!(
            "default delta needs a - max(-c, 0) > 0, got a = {a}, c = {c}"
        )));
    }
    Ok(slack / (3.0 * (r as f64 + 1.0)))
}

/// P(B_delta): probability that at least r+1 claims of size >= n delta
/// arrive by time n. The count of such claims is Poisson with mean
/// mu = lambda n tail(n delta), and the Poisson tail P(K >= r+1) equals the
/// regularized lower incomplete gamma P(r+1, mu), which is evaluated with
/// log-space prefactors.
pub fn prob_big_jump_set(
    lambda: f64,
    n: f64,
    model: &ClaimModel,
    delta: f64,
    r: usize,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::domain(format!("delta must be positive, got {delta}")));
    }
    if !(lambda > 0.0) || !(n > 0.0) {
        return Err(Error::domain("lambda and n must be positive"));
    }
    let mu = lambda * n * model.tail(n * delta)?;
    regularized_lower_gamma(r as f64 + 1.0, mu)
}

/// Draw from the truncated Poisson law K | K >= m.
///
/// When the conditioning event is common, rejection from the unconditional
/// sampler is cheapest; when it is rare, an inverse-CDF walk on the
/// conditional pmf starting at m is exact and short.
fn truncated_poisson_geq(rng: &mut Stream, mu: f64, m: u64, p_tail: f64) -> u64 {
    if p_tail > 0.5 {
        loop {
            let k = rng.poisson(mu);
            if k >= m {
                return k;
            }
        }
    }
    let target = rng.uniform_co() * p_tail;
    let mut pmf = (-mu + m as f64 * mu.ln() - ln_gamma_unchecked(m as f64 + 1.0)).exp();
    let mut cum = pmf;
    let mut k = m;
    while target > cum {
        k += 1;
        pmf *= mu / k as f64;
        cum += pmf;
        if pmf < 1e-320 || k > m + 100_000 {
            break; // the residual tail mass is below f64 resolution
        }
    }
    k
}

/// Exact sampler for the conditional path law P(. | B_delta) by thinning:
/// the big-claim count is truncated Poisson, big claims are drawn from the
/// conditional law above n delta, the small-claim stream is untouched, and
/// the merged epochs are sorted uniforms on (0, n].
pub fn sample_path_conditional(
    rng: &mut Stream,
    lambda: f64,
    n: f64,
    model: &ClaimModel,
    delta: f64,
    r: usize,
) -> Result<SamplePath> {
    let setup = ConditionalSetup::new(lambda, n, model, delta, r)?;
    let mut path = SamplePath::default();
    setup.sample_into(rng, model, &mut path);
    Ok(path)
}

#[derive(Debug, Clone, Copy)]
struct ConditionalSetup {
    n: f64,
    r: usize,
    /// Absolute claim threshold n * delta.
    threshold: f64,
    /// Mean count of big claims, lambda n tail(threshold).
    mu_big: f64,
    /// Mean count of small claims, lambda n (1 - tail(threshold)).
    mu_small: f64,
    /// P(B_delta) = P(Poisson(mu_big) >= r+1).
    p_big: f64,
}

impl ConditionalSetup {
    fn new(lambda: f64, n: f64, model: &ClaimModel, delta: f64, r: usize) -> Result<Self> {
        let p_big = prob_big_jump_set(lambda, n, model, delta, r)?;
        if p_big <= 0.0 {
            return Err(Error::domain(
                "conditioning event has probability below f64 resolution; lower delta",
            ));
        }
        let threshold = n * delta;
        let tail = model.tail(threshold)?;
        Ok(ConditionalSetup {
            n,
            r,
            threshold,
            mu_big: lambda * n * tail,
            mu_small: lambda * n * (1.0 - tail),
            p_big,
        })
    }

    fn sample_into(&self, rng: &mut Stream, model: &ClaimModel, out: &mut SamplePath) {
        let k_big = truncated_poisson_geq(rng, self.mu_big, self.r as u64 + 1, self.p_big);
        let k_small = rng.poisson(self.mu_small);
        out.horizon = self.n;
        out.claims.clear();
        out.claims.reserve((k_big + k_small) as usize);
        for _ in 0..k_big {
            let epoch = self.n * rng.uniform_oc();
            let size = model.sample_above(rng, self.threshold);
            out.claims.push(Claim { epoch, size });
        }
        for _ in 0..k_small {
            let epoch = self.n * rng.uniform_oc();
            let size = model
                .sample_below(rng, self.threshold)
                .expect("threshold > 0 so F(threshold) > 0");
            out.claims.push(Claim { epoch, size });
        }
        sort_by_epoch(&mut out.claims);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Crude,
    ImportanceSampling,
}

struct RunSetup {
    treaty: TreatySpec,
    model: ClaimModel,
    lambda: f64,
    horizon: f64,
    premium_rate: f64,
    capital: f64,
    w: f64,
    conditional: Option<ConditionalSetup>,
}

#[inline]
fn neumaier_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

#[derive(Default, Clone, Copy)]
struct BatchAcc {
    sum: f64,
    sum_c: f64,
    sumsq: f64,
    sumsq_c: f64,
}

impl BatchAcc {
    #[inline]
    fn add(&mut self, z: f64) {
        neumaier_add(&mut self.sum, &mut self.sum_c, z);
        neumaier_add(&mut self.sumsq, &mut self.sumsq_c, z * z);
    }
}

fn replicate_value(
    setup: &RunSetup,
    method: Method,
    stream: &mut Stream,
    scratch: &mut SamplePath,
) -> f64 {
    // both methods draw the branch coin so their replicate streams align,
    // which makes w = 1 importance sampling bitwise equal to crude MC
    let coin = stream.uniform_co();
    let conditional = match (method, &setup.conditional) {
        (Method::ImportanceSampling, Some(cond)) => {
            if coin < setup.w {
                generate_path_into(stream, setup.lambda, setup.horizon, &setup.model, scratch);
            } else {
                cond.sample_into(stream, &setup.model, scratch);
            }
            Some(cond)
        }
        _ => {
            generate_path_into(stream, setup.lambda, setup.horizon, &setup.model, scratch);
            None
        }
    };
    if !is_ruin(scratch, &setup.treaty, setup.premium_rate, setup.capital) {
        return 0.0;
    }
    match conditional {
        None => 1.0,
        Some(cond) => {
            // membership in B is a property of the realized path
            let need = setup.treaty.r + 1;
            let mut big = 0usize;
            for c in &scratch.claims {
                if c.size >= cond.threshold {
                    big += 1;
                    if big == need {
                        break;
                    }
                }
            }
            let z = if big >= need {
                1.0 / (setup.w + (1.0 - setup.w) / cond.p_big)
            } else {
                1.0 / setup.w
            };
            debug_assert!(z <= 1.0 / setup.w + 1e-12);
            z
        }
    }
}

fn run(setup: &RunSetup, controls: &SimControls, method: Method) -> EstimatorResult {
    let m = controls.samples;
    let batch = controls.batch.max(1);
    let n_batches = m.div_ceil(batch);
    let accs: Vec<BatchAcc> = (0..n_batches)
        .into_par_iter()
        .map(|bi| {
            let start = bi * batch;
            let end = (start + batch).min(m);
            let mut acc = BatchAcc::default();
            let mut scratch = SamplePath::default();
            for i in start..end {
                let mut stream = Stream::for_replicate(controls.seed, i);
                let z = replicate_value(setup, method, &mut stream, &mut scratch);
                acc.add(z);
            }
            acc
        })
        .collect();

    // deterministic reduction in batch index order
    let (mut sum, mut sum_c, mut sumsq, mut sumsq_c) = (0.0, 0.0, 0.0, 0.0);
    for a in &accs {
        neumaier_add(&mut sum, &mut sum_c, a.sum);
        neumaier_add(&mut sum, &mut sum_c, a.sum_c);
        neumaier_add(&mut sumsq, &mut sumsq_c, a.sumsq);
        neumaier_add(&mut sumsq, &mut sumsq_c, a.sumsq_c);
    }
    let sum = sum + sum_c;
    let sumsq = sumsq + sumsq_c;

    let mf = m as f64;
    let estimate = sum / mf;
    let variance = if m > 1 {
        ((sumsq - sum * sum / mf) / (mf - 1.0)).max(0.0)
    } else {
        0.0
    };
    let ci95_halfwidth = 1.96 * (variance / mf).sqrt();
    EstimatorResult {
        estimate,
        variance,
        ci95_halfwidth,
        samples: m,
        relative_error: if estimate > 0.0 {
            ci95_halfwidth / estimate
        } else {
            f64::INFINITY
        },
    }
}

fn setup_for(cfg: &ScenarioConfig, horizon: f64, controls: &SimControls, method: Method) -> Result<RunSetup> {
    cfg.validate()?;
    controls.validate()?;
    if !(horizon > 0.0) {
        return Err(Error::domain(format!("horizon must be positive, got {horizon}")));
    }
    let model = cfg.claim_model()?;
    let premium_rate = net_premium(cfg)?.net_rate;
    let conditional = match method {
        Method::Crude => None,
        Method::ImportanceSampling => Some(ConditionalSetup::new(
            cfg.lambda,
            horizon,
            &model,
            controls.delta,
            cfg.treaty.r,
        )?),
    };
    Ok(RunSetup {
        treaty: cfg.treaty,
        model,
        lambda: cfg.lambda,
        horizon,
        premium_rate,
        capital: horizon * cfg.a,
        w: controls.w,
        conditional,
    })
}

/// Crude Monte Carlo estimate of psi(n a, n) at the scenario's own horizon.
pub fn crude_mc(cfg: &ScenarioConfig, controls: &SimControls) -> Result<EstimatorResult> {
    crude_mc_at(cfg, cfg.n, controls)
}

/// Crude Monte Carlo at an explicit simulation horizon; the premium stays
/// contracted at the scenario's `n`.
pub fn crude_mc_at(
    cfg: &ScenarioConfig,
    horizon: f64,
    controls: &SimControls,
) -> Result<EstimatorResult> {
    let setup = setup_for(cfg, horizon, controls, Method::Crude)?;
    Ok(run(&setup, controls, Method::Crude))
}

/// Importance-sampling estimate of psi(n a, n) at the scenario's horizon.
/// Unbiased for any delta > 0 and w in (0, 1]; delta and w only affect the
/// variance.
pub fn importance_sampling(cfg: &ScenarioConfig, controls: &SimControls) -> Result<EstimatorResult> {
    importance_sampling_at(cfg, cfg.n, controls)
}

/// Importance sampling at an explicit simulation horizon; the premium stays
/// contracted at the scenario's `n`.
pub fn importance_sampling_at(
    cfg: &ScenarioConfig,
    horizon: f64,
    controls: &SimControls,
) -> Result<EstimatorResult> {
    let setup = setup_for(cfg, horizon, controls, Method::ImportanceSampling)?;
    Ok(run(&setup, controls, Method::ImportanceSampling))
}

//! Experiment drivers behind the `ruin` binary: premium tables, asymptote
//! curves, single simulations, n-sweeps and the validation suite. All CSV
//! output goes through [`ruin_core::fmt_e`], so files are byte-stable given
//! (config, seed, version).

pub mod config;

use std::io::Write;

use config::{Config, MethodChoice, TreatyChoice};
use ruin_core::asymptotics::{
    asymptote_with_drift, asymptotic_ruin_probability, preconstant, preconstant_gamma_form,
    preconstant_quadrature, PreconstantInputs,
};
use ruin_core::claims::ClaimModel;
use ruin_core::fmt_e;
use ruin_core::montecarlo::{crude_mc_at, default_delta, importance_sampling_at, EstimatorResult};
use ruin_core::premiums::{drift, net_premium, ScenarioConfig};
use ruin_core::riskpath::{
    generate_path, ruin_functional, step_path_phi_oracle, TreatyKind, TreatySpec,
};
use ruin_core::rng::Stream;
use ruin_core::{Error, SimControls};

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Domain(Error),
    Io(std::io::Error),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Domain(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "usage error: {m}"),
            RunError::Domain(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

pub type RunResult<T> = Result<T, RunError>;

fn single_kind(cfg: &Config) -> RunResult<TreatyKind> {
    match cfg.treaty {
        TreatyChoice::Lcr => Ok(TreatyKind::Lcr),
        TreatyChoice::Ecomor => Ok(TreatyKind::Ecomor),
        TreatyChoice::Both => Err(RunError::Usage(
            "this command needs --treaty lcr or --treaty ecomor".into(),
        )),
    }
}

fn resolve_delta(cfg: &Config, scenario: &ScenarioConfig) -> RunResult<f64> {
    if let Some(d) = cfg.delta {
        return Ok(d);
    }
    let c = drift(net_premium(scenario)?.net_rate, scenario.lambda, scenario.alpha);
    Ok(default_delta(scenario.a, c, scenario.treaty.r)?)
}

fn controls_for(cfg: &Config, scenario: &ScenarioConfig) -> RunResult<SimControls> {
    let mut controls = SimControls::new(cfg.samples, resolve_delta(cfg, scenario)?, cfg.w, cfg.seed);
    controls.batch = cfg.batch;
    controls.validate()?;
    Ok(controls)
}

fn estimate(
    scenario: &ScenarioConfig,
    horizon: f64,
    controls: &SimControls,
    method: MethodChoice,
) -> RunResult<EstimatorResult> {
    Ok(match method {
        MethodChoice::ImportanceSampling => importance_sampling_at(scenario, horizon, controls)?,
        MethodChoice::Crude => crude_mc_at(scenario, horizon, controls)?,
    })
}

/// `premiums`: the premium table as CSV, one row per r in 0..=r_max.
pub fn run_premiums<W: Write + ?Sized>(cfg: &Config, r_max: usize, out: &mut W) -> RunResult<()> {
    writeln!(out, "r,pi_L,pi_E,q_L,q_E,c_L,c_E")?;
    for r in 0..=r_max {
        let mut row = vec![r.to_string()];
        let mut nets = Vec::new();
        for kind in [TreatyKind::Lcr, TreatyKind::Ecomor] {
            let mut scenario = cfg.scenario(kind);
            scenario.treaty = TreatySpec::new(kind, r);
            let b = net_premium(&scenario)?;
            row.push(fmt_e(b.expected_reinsured_rate));
            nets.push(b.net_rate);
        }
        for q in &nets {
            row.push(fmt_e(*q));
        }
        for q in &nets {
            row.push(fmt_e(drift(*q, cfg.lambda, cfg.alpha)));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// `asymptote`: psi_approx over the n-grid for one treaty, premium
/// contracted at the scenario's own n.
pub fn run_asymptote<W: Write + ?Sized>(cfg: &Config, out: &mut W) -> RunResult<()> {
    let kind = single_kind(cfg)?;
    let scenario = cfg.scenario(kind);
    let c = drift(net_premium(&scenario)?.net_rate, cfg.lambda, cfg.alpha);
    writeln!(out, "n,psi_approx")?;
    for n in cfg.grid() {
        let v = asymptote_with_drift(kind, cfg.r, cfg.alpha, cfg.lambda, cfg.a, c, n as f64)?;
        writeln!(out, "{n},{}", fmt_e(v))?;
    }
    Ok(())
}

/// `simulate`: one estimator run at the configured horizon, with the
/// matching asymptote for comparison. `dump_path` optionally writes the
/// event series of one unconditional sample path first.
pub fn run_simulate<W: Write + ?Sized>(
    cfg: &Config,
    dump_path: Option<&std::path::Path>,
    out: &mut W,
) -> RunResult<()> {
    let kind = single_kind(cfg)?;
    let scenario = cfg.scenario(kind);
    let controls = controls_for(cfg, &scenario)?;
    if let Some(path) = dump_path {
        let model = ClaimModel::shifted_pareto(cfg.alpha)?;
        let q = net_premium(&scenario)?.net_rate;
        let mut rng = Stream::for_replicate(cfg.seed, 0);
        let sample = generate_path(&mut rng, cfg.lambda, cfg.n, &model);
        let mut file = std::fs::File::create(path)?;
        ruin_core::riskpath::dump_path_csv(&sample, &scenario.treaty, q, &mut file)?;
    }
    let est = estimate(&scenario, cfg.n, &controls, cfg.method)?;
    let ld = asymptotic_ruin_probability(&scenario)?;
    writeln!(out, "n,estimate,ci95,ld_approx,rel_err_pct")?;
    writeln!(
        out,
        "{},{},{},{},{}",
        cfg.n,
        fmt_e(est.estimate),
        fmt_e(est.ci95_halfwidth),
        fmt_e(ld),
        fmt_e(100.0 * est.relative_error),
    )?;
    Ok(())
}

/// `sweep`: estimator plus asymptote for every horizon in the grid and every
/// selected treaty. The premium (and hence the drift entering the asymptote)
/// stays contracted at the scenario's own n while the simulation horizon
/// runs over the grid.
pub fn run_sweep<W: Write + ?Sized>(cfg: &Config, out: &mut W) -> RunResult<()> {
    writeln!(out, "treaty,r,a,n,estimate,ci95,ld_approx,ratio")?;
    for kind in cfg.treaty.kinds() {
        let scenario = cfg.scenario(kind);
        let controls = controls_for(cfg, &scenario)?;
        let c = drift(net_premium(&scenario)?.net_rate, cfg.lambda, cfg.alpha);
        for n in cfg.grid() {
            let est = estimate(&scenario, n as f64, &controls, cfg.method)?;
            let ld = asymptote_with_drift(kind, cfg.r, cfg.alpha, cfg.lambda, cfg.a, c, n as f64)?;
            writeln!(
                out,
                "{},{},{},{n},{},{},{},{}",
                kind.label(),
                cfg.r,
                fmt_e(cfg.a),
                fmt_e(est.estimate),
                fmt_e(est.ci95_halfwidth),
                fmt_e(ld),
                fmt_e(est.estimate / ld),
            )?;
        }
    }
    Ok(())
}

/// `validate`: run every cross-form oracle and report measured errors.
/// Returns false (exit code 3) if any check fails.
pub fn run_validate<W: Write + ?Sized>(out: &mut W) -> RunResult<bool> {
    let mut all_ok = true;
    let mut check = |name: &str, worst: f64, tol: f64, out: &mut W| -> std::io::Result<()> {
        let ok = worst <= tol;
        all_ok &= ok;
        writeln!(
            out,
            "{} {name}: worst {} (tolerance {})",
            if ok { "ok  " } else { "FAIL" },
            fmt_e(worst),
            fmt_e(tol),
        )
    };

    // 1. pre-constant three-way consistency
    let mut worst = 0.0f64;
    for kind in [TreatyKind::Lcr, TreatyKind::Ecomor] {
        for r in 0..4usize {
            for &alpha in &[1.1, 1.5, 2.5] {
                for &a in &[1.0, 20.0] {
                    for &ratio in &[-0.9, 0.01, 1.0, 5.0] {
                        let inp = PreconstantInputs::new(kind, r, alpha, a, ratio * a);
                        let hyp = preconstant(&inp)?;
                        let quad = preconstant_quadrature(&inp)?;
                        worst = worst.max((hyp - quad).abs() / quad);
                        if ratio > 0.0 {
                            let gamma = preconstant_gamma_form(&inp)?;
                            worst = worst.max((hyp - gamma).abs() / gamma);
                        }
                    }
                }
            }
        }
    }
    check("pre-constant three-way", worst, 1e-9, out)?;

    // 2. ECOMOR identity on random claim multisets
    let model = ClaimModel::shifted_pareto(1.5)?;
    let mut rng = Stream::new(1);
    let mut worst = 0.0f64;
    for case in 0..20_000 {
        let r = case % 5;
        let m = 1 + (rng.next_u64() % 12) as usize;
        let xs: Vec<f64> = (0..m).map(|_| model.sample(&mut rng)).collect();
        let mut sorted = xs.clone();
        sorted.sort_unstable_by(|x, y| y.total_cmp(x));
        let retention = if sorted.len() > r { sorted[r] } else { 0.0 };
        let lhs: f64 = sorted.iter().take(r).sum::<f64>() - r as f64 * retention;
        let rhs: f64 = xs.iter().map(|x| (x - retention).max(0.0)).sum();
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs().max(rhs.abs())));
    }
    check("ecomor identity", worst, 1e-12, out)?;

    // 3. step-path ruin functional against the closed-form oracle
    let mut rng = Stream::new(2);
    let mut worst = 0.0f64;
    for case in 0..20_000 {
        let r = case % 4;
        let kind = if case % 2 == 0 { TreatyKind::Lcr } else { TreatyKind::Ecomor };
        let k = (rng.next_u64() % (r as u64 + 2)) as usize;
        let c = (rng.uniform_co() - 0.5) * 10.0;
        let mut sizes: Vec<f64> = (0..k).map(|_| model.sample(&mut rng).min(1e3) + 0.01).collect();
        sizes.sort_unstable_by(|x, y| y.total_cmp(x));
        let mut times: Vec<f64> = Vec::with_capacity(k);
        while times.len() < k {
            let t = 0.999 * rng.uniform_oc();
            if !times.contains(&t) {
                times.push(t);
            }
        }
        let oracle = step_path_phi_oracle(&sizes, &times, r, c, kind)?;
        let mut claims: Vec<ruin_core::riskpath::Claim> = sizes
            .iter()
            .zip(&times)
            .map(|(&size, &epoch)| ruin_core::riskpath::Claim { epoch, size })
            .collect();
        claims.sort_unstable_by(|x, y| x.epoch.total_cmp(&y.epoch));
        let path = ruin_core::riskpath::SamplePath::new(1.0, claims)?;
        let got = ruin_functional(&path, &TreatySpec::new(kind, r), c);
        worst = worst.max((got - oracle).abs() / (1.0 + oracle.abs()));
    }
    check("step-path phi oracle", worst, 1e-12, out)?;

    // 4. estimator unbiasedness: importance sampling vs crude on a non-rare
    // scenario (widened to 1.5x the summed half-widths; the acceptance suite
    // runs the rigorous 30-repetition version)
    let scenario = ScenarioConfig {
        treaty: TreatySpec::new(TreatyKind::Ecomor, 2),
        alpha: 1.5,
        lambda: 10.0,
        theta: 0.2,
        theta_re: 0.3,
        n: 20.0,
        a: 10.0,
    };
    let c = drift(net_premium(&scenario)?.net_rate, scenario.lambda, scenario.alpha);
    let delta = default_delta(scenario.a, c, 2)?;
    let is = importance_sampling_at(&scenario, 20.0, &SimControls::new(20_000, delta, 0.5, 11))?;
    let crude = crude_mc_at(&scenario, 20.0, &SimControls::new(200_000, delta, 0.5, 12))?;
    let gap = (is.estimate - crude.estimate).abs();
    let budget = 1.5 * (is.ci95_halfwidth + crude.ci95_halfwidth);
    let ok = gap <= budget;
    all_ok &= ok;
    writeln!(
        out,
        "{} is-vs-crude: |{} - {}| = {} within {}",
        if ok { "ok  " } else { "FAIL" },
        fmt_e(is.estimate),
        fmt_e(crude.estimate),
        fmt_e(gap),
        fmt_e(budget),
    )?;

    Ok(all_ok)
}

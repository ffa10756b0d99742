use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use ruin_cli::config::Config;
use ruin_cli::{RunError, RunResult};

/// Finite-horizon ruin probabilities under LCR and ECOMOR large-claim
/// reinsurance: premium tables, explicit asymptotics and rare-event
/// simulation.
#[derive(Parser)]
#[command(name = "ruin", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Premium table (pi, q and drift per treaty) for r = 0..=r-max.
    Premiums {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest number of reinsured claims in the table.
        #[arg(long = "r-max", default_value_t = 3)]
        r_max: usize,
    },
    /// Asymptotic ruin probability over the horizon grid.
    Asymptote {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// One estimator run at the configured horizon.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Also write one unconditional sample path as CSV (debugging aid).
        #[arg(long = "dump-path")]
        dump_path: Option<PathBuf>,
    },
    /// Estimator vs asymptote over the horizon grid, per treaty.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cross-form oracle suite; exit code 3 if any check fails.
    Validate,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key=value config file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// lcr, ecomor, or both (sweep only).
    #[arg(long)]
    treaty: Option<String>,
    /// Number of reinsured claims.
    #[arg(long)]
    r: Option<usize>,
    /// Claim tail index (> 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Claim arrival rate per year.
    #[arg(long)]
    lambda: Option<f64>,
    /// Insurer safety loading.
    #[arg(long)]
    theta: Option<f64>,
    /// Reinsurer safety loading.
    #[arg(long = "theta-re")]
    theta_re: Option<f64>,
    /// Scaled initial capital level.
    #[arg(long)]
    a: Option<f64>,
    /// Contract horizon in years (the premium is fixed at this n).
    #[arg(long)]
    n: Option<f64>,
    /// Monte Carlo replicates per estimate.
    #[arg(long)]
    samples: Option<u64>,
    /// Big-jump threshold (scaled); defaults to (a - c_-) / (3 (r+1)).
    #[arg(long)]
    delta: Option<f64>,
    /// Mixture weight of the unconditional branch.
    #[arg(long)]
    w: Option<f64>,
    /// Master seed; replicate i uses the stream keyed by (seed, i).
    #[arg(long)]
    seed: Option<u64>,
    /// Replicates per aggregation batch.
    #[arg(long)]
    batch: Option<u64>,
    /// is (importance sampling) or crude.
    #[arg(long)]
    method: Option<String>,
    /// Comma-separated simulation horizons for sweeps.
    #[arg(long = "n-grid")]
    n_grid: Option<String>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn build_config(&self) -> RunResult<Config> {
        let mut cfg = Config::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            cfg.parse_file_text(&text)?;
        }
        if let Some(v) = &self.treaty {
            cfg.treaty = ruin_cli::config::TreatyChoice::parse(v)?;
        }
        if let Some(v) = self.r {
            cfg.r = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = self.theta {
            cfg.theta = v;
        }
        if let Some(v) = self.theta_re {
            cfg.theta_re = v;
        }
        if let Some(v) = self.a {
            cfg.a = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = Some(v);
        }
        if let Some(v) = self.w {
            cfg.w = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.batch {
            cfg.batch = v;
        }
        if let Some(v) = &self.method {
            cfg.method = ruin_cli::config::MethodChoice::parse(v)?;
        }
        if let Some(v) = &self.n_grid {
            cfg.set("n-grid", v)?;
        }
        Ok(cfg)
    }

    fn with_output<F: FnOnce(&mut dyn Write) -> RunResult<T>, T>(&self, f: F) -> RunResult<T> {
        match &self.out {
            Some(path) => {
                let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
                let v = f(&mut file)?;
                file.flush()?;
                Ok(v)
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                f(&mut lock)
            }
        }
    }
}

fn run(cli: Cli) -> RunResult<bool> {
    match cli.cmd {
        Cmd::Premiums { common, r_max } => {
            let cfg = common.build_config()?;
            common.with_output(|out| ruin_cli::run_premiums(&cfg, r_max, out))?;
            Ok(true)
        }
        Cmd::Asymptote { common } => {
            let cfg = common.build_config()?;
            common.with_output(|out| ruin_cli::run_asymptote(&cfg, out))?;
            Ok(true)
        }
        Cmd::Simulate { common, dump_path } => {
            let cfg = common.build_config()?;
            common.with_output(|out| ruin_cli::run_simulate(&cfg, dump_path.as_deref(), out))?;
            Ok(true)
        }
        Cmd::Sweep { common } => {
            let cfg = common.build_config()?;
            common.with_output(|out| ruin_cli::run_sweep(&cfg, out))?;
            Ok(true)
        }
        Cmd::Validate => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            Ok(ruin_cli::run_validate(&mut lock)?)
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(true) => 0,
        Ok(false) => 3, // validation failure
        Err(RunError::Usage(m)) => {
            eprintln!("usage error: {m}");
            1
        }
        // a closed pipe (e.g. piping into `head`) is not an error
        Err(RunError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("{e}");
            2
        }
    };
    std::process::exit(code);
}

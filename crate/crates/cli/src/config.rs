//! Flat key=value experiment configs.
//!
//! Keys mirror the CLI flag names exactly, so a config file is archivable
//! and diffable, and any value can be overridden on the command line.

use std::fmt;

use ruin_core::premiums::ScenarioConfig;
use ruin_core::riskpath::{TreatyKind, TreatySpec};
use ruin_core::Error;

/// Which treaties a command operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreatyChoice {
    Lcr,
    Ecomor,
    Both,
}

impl TreatyChoice {
    pub fn kinds(&self) -> Vec<TreatyKind> {
        match self {
            TreatyChoice::Lcr => vec![TreatyKind::Lcr],
            TreatyChoice::Ecomor => vec![TreatyKind::Ecomor],
            TreatyChoice::Both => vec![TreatyKind::Lcr, TreatyKind::Ecomor],
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "lcr" => Ok(TreatyChoice::Lcr),
            "ecomor" => Ok(TreatyChoice::Ecomor),
            "both" => Ok(TreatyChoice::Both),
            other => Err(Error::Domain(format!(
                "treaty must be lcr, ecomor or both, got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for TreatyChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TreatyChoice::Lcr => "lcr",
            TreatyChoice::Ecomor => "ecomor",
            TreatyChoice::Both => "both",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    ImportanceSampling,
    Crude,
}

impl MethodChoice {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "is" => Ok(MethodChoice::ImportanceSampling),
            "crude" => Ok(MethodChoice::Crude),
            other => Err(Error::Domain(format!(
                "method must be is or crude, got '{other}'"
            ))),
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodChoice::ImportanceSampling => "is",
            MethodChoice::Crude => "crude",
        })
    }
}

/// Complete experiment configuration. Defaults are the premium-table setup
/// (n = 20, lambda = 10, alpha = 1.5, theta = 0.2, theta' = 0.3).
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub treaty: TreatyChoice,
    pub r: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub theta: f64,
    pub theta_re: f64,
    pub a: f64,
    pub n: f64,
    pub samples: u64,
    /// Big-jump threshold; derived from default_delta when absent.
    pub delta: Option<f64>,
    pub w: f64,
    pub seed: u64,
    pub batch: u64,
    pub method: MethodChoice,
    /// Simulation horizons for sweeps; log-spaced 20..3000 by default.
    pub n_grid: Option<Vec<u64>>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            treaty: TreatyChoice::Both,
            r: 1,
            alpha: 1.5,
            lambda: 10.0,
            theta: 0.2,
            theta_re: 0.3,
            a: 20.0,
            n: 20.0,
            samples: 100_000,
            delta: None,
            w: 0.5,
            seed: 1,
            batch: 4096,
            method: MethodChoice::ImportanceSampling,
            n_grid: None,
        }
    }
}

/// 13 log-spaced integer horizons from 20 to 3000.
pub fn default_n_grid() -> Vec<u64> {
    let (lo, hi, points) = (20.0f64, 3000.0f64, 13usize);
    let mut grid: Vec<u64> = (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            (lo * (hi / lo).powf(t)).round() as u64
        })
        .collect();
    grid.dedup();
    grid
}

impl Config {
    /// Scenario for one treaty kind (the sweep iterates over kinds).
    pub fn scenario(&self, kind: TreatyKind) -> ScenarioConfig {
        ScenarioConfig {
            treaty: TreatySpec::new(kind, self.r),
            alpha: self.alpha,
            lambda: self.lambda,
            theta: self.theta,
            theta_re: self.theta_re,
            n: self.n,
            a: self.a,
        }
    }

    pub fn grid(&self) -> Vec<u64> {
        self.n_grid.clone().unwrap_or_else(default_n_grid)
    }

    /// Apply one key=value assignment (file line or flag).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Error> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, Error> {
            value
                .parse()
                .map_err(|_| Error::Domain(format!("invalid value '{value}' for key '{key}'")))
        }
        match key {
            "treaty" => self.treaty = TreatyChoice::parse(value)?,
            "r" => self.r = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "lambda" => self.lambda = num(key, value)?,
            "theta" => self.theta = num(key, value)?,
            "theta-re" => self.theta_re = num(key, value)?,
            "a" => self.a = num(key, value)?,
            "n" => self.n = num(key, value)?,
            "samples" => self.samples = num(key, value)?,
            "delta" => self.delta = Some(num(key, value)?),
            "w" => self.w = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "batch" => self.batch = num(key, value)?,
            "method" => self.method = MethodChoice::parse(value)?,
            "n-grid" => {
                let mut grid = Vec::new();
                for part in value.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    grid.push(num("n-grid", part)?);
                }
                if grid.is_empty() {
                    return Err(Error::Domain("n-grid must contain at least one horizon".into()));
                }
                self.n_grid = Some(grid);
            }
            other => return Err(Error::Domain(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Parse a flat key=value file ('#' starts a comment).
    pub fn parse_file_text(&mut self, text: &str) -> Result<(), Error> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Domain(format!("line {}: expected key=value, got '{line}'", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Serialize to the same key=value format that `parse_file_text` reads;
    /// parse(serialize(c)) == c.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("treaty={}\n", self.treaty));
        out.push_str(&format!("r={}\n", self.r));
        out.push_str(&format!("alpha={}\n", self.alpha));
        out.push_str(&format!("lambda={}\n", self.lambda));
        out.push_str(&format!("theta={}\n", self.theta));
        out.push_str(&format!("theta-re={}\n", self.theta_re));
        out.push_str(&format!("a={}\n", self.a));
        out.push_str(&format!("n={}\n", self.n));
        out.push_str(&format!("samples={}\n", self.samples));
        if let Some(d) = self.delta {
            out.push_str(&format!("delta={d}\n"));
        }
        out.push_str(&format!("w={}\n", self.w));
        out.push_str(&format!("seed={}\n", self.seed));
        out.push_str(&format!("batch={}\n", self.batch));
        out.push_str(&format!("method={}\n", self.method));
        if let Some(grid) = &self.n_grid {
            let parts: Vec<String> = grid.iter().map(|n| n.to_string()).collect();
            out.push_str(&format!("n-grid={}\n", parts.join(",")));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let mut cfg = Config {
            treaty: TreatyChoice::Ecomor,
            r: 3,
            a: 45.0,
            delta: Some(2.5),
            n_grid: Some(vec![20, 100, 1000]),
            seed: 99,
            method: MethodChoice::Crude,
            ..Config::default()
        };
        cfg.w = 0.25;
        let text = cfg.to_file_string();
        let mut parsed = Config::default();
        parsed.parse_file_text(&text).unwrap();
        assert_eq!(parsed, cfg);
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let mut cfg = Config::default();
        cfg.parse_file_text("# premium study\n\n r = 2  # two reinsured claims\n")
            .unwrap();
        assert_eq!(cfg.r, 2);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected(){
        let mut cfg = Config::default();
        assert!(cfg.parse_file_text("rr=2").is_err());
        assert!(cfg.parse_file_text("alpha=fast").is_err());
        assert!(cfg.parse_file_text("no equals sign").is_err());
    }

    #[test]
    fn default_grid_shape() {
        let g = default_n_grid();
        assert_eq!(g.len(), 13);
        assert_eq!(*g.first().unwrap(), 20);
        assert_eq!(*g.last().unwrap(), 3000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}

use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    /// Deterministic play; writes trace.csv.
    Dlfp,
    /// One sampled trajectory; writes trace.csv.
    Lfp,
    /// Replica harness around the saddle point; writes aggregate.csv.
    LfpMc,
    /// Frank-Wolfe vs. play on a composite problem; writes gfw_trace.csv and
    /// dlfp_trace.csv.
    Composite,
    /// Deterministic play with every recursion checked; writes trace.csv and
    /// report.json, exits 3 on any failed check.
    Verify,
    /// Saddle point by constant-step play; writes saddle.json.
    FixedPoint,
    /// Iteration estimate for the sampled dynamics; writes complexity.json.
    Complexity,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Dlfp => "dlfp",
            Self::Lfp => "lfp",
            Self::LfpMc => "lfp-mc",
            Self::Composite => "composite",
            Self::Verify => "verify",
            Self::FixedPoint => "fixed-point",
            Self::Complexity => "complexity",
        }
    }
}

/// Command-line flags. Any flag left out falls back to `--config`, then to
/// the documented default.
#[derive(Debug, Parser)]
#[command(name = "lfp", version, about = "Logistic fictitious play experiments")]
pub struct Cli {
    /// Experiment to run (may also come from the config file).
    #[arg(value_enum)]
    pub experiment: Option<Experiment>,

    /// JSON document with any of the fields below (snake_case names).
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Payoff CSV path or builtin: matching-pennies, zero:MxN, random:MxN:SEED.
    #[arg(long)]
    pub payoff: Option<String>,

    #[arg(long)]
    pub eta: Option<f64>,

    /// Composite only; defaults to --eta.
    #[arg(long)]
    pub eta_x: Option<f64>,

    /// Composite only; defaults to --eta.
    #[arg(long)]
    pub eta_y: Option<f64>,

    /// Composite only: comma-separated entries, or random:SEED for entries
    /// uniform on [-0.5, 0.5]. Defaults to zero.
    #[arg(long)]
    pub tilt: Option<String>,

    /// constant[:c], harmonic, fw, rational:q, nesterov-gfw.
    #[arg(long)]
    pub schedule: Option<String>,

    /// Iteration count T (default 1000).
    #[arg(long)]
    pub iters: Option<u64>,

    /// Seed for sampled experiments (default 0).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Replica count for lfp-mc (default 100).
    #[arg(long)]
    pub replicas: Option<usize>,

    /// Event start for lfp-mc (default 100).
    #[arg(long)]
    pub burn_in: Option<u64>,

    /// Record every k-th iteration of sampled runs (default: every step up
    /// to 1000, then every 10th).
    #[arg(long)]
    pub stride: Option<u64>,

    /// Fixed-point tolerance (fixed-point, lfp-mc, complexity; default
    /// 1e-10) or relative check tolerance (verify; default 1e-9).
    #[arg(long)]
    pub tol: Option<f64>,

    /// Target accuracy for complexity (default 1e-3).
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Run sampled play with a constant step.
    #[arg(long)]
    pub allow_constant_step: bool,
}

/// Same fields as [`Cli`], read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<Experiment>,
    pub payoff: Option<String>,
    pub eta: Option<f64>,
    pub eta_x: Option<f64>,
    pub eta_y: Option<f64>,
    pub tilt: Option<Tilt>,
    pub schedule: Option<String>,
    pub iters: Option<u64>,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    pub burn_in: Option<u64>,
    pub stride: Option<u64>,
    pub tol: Option<f64>,
    pub epsilon: Option<f64>,
    pub out: Option<PathBuf>,
    pub allow_constant_step: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Tilt {
    Values(Vec<f64>),
    Spec(String),
}

/// Fully resolved run settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub payoff: String,
    pub eta: Option<f64>,
    pub eta_x: Option<f64>,
    pub eta_y: Option<f64>,
    pub tilt: Option<Tilt>,
    pub schedule: Option<String>,
    pub iters: u64,
    pub seed: u64,
    pub replicas: usize,
    pub burn_in: u64,
    pub stride: Option<u64>,
    pub tol: Option<f64>,
    pub epsilon: f64,
    pub out: PathBuf,
    pub allow_constant_step: bool,
}

pub const DEFAULT_ITERS: u64 = 1000;
pub const DEFAULT_REPLICAS: usize = 100;
pub const DEFAULT_BURN_IN: u64 = 100;
pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-10;
pub const DEFAULT_EPSILON: f64 = 1e-3;

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
            }
            None => FileConfig::default(),
        };
        let experiment = cli
            .experiment
            .or(file.experiment)
            .ok_or_else(|| CliError::config("no experiment given"))?;
        let payoff = cli
            .payoff
            .or(file.payoff)
            .ok_or_else(|| CliError::config("--payoff is required"))?;
        let out = cli
            .out
            .or(file.out)
            .ok_or_else(|| CliError::config("--out is required"))?;
        let cfg = Self {
            experiment,
            payoff,
            eta: cli.eta.or(file.eta),
            eta_x: cli.eta_x.or(file.eta_x),
            eta_y: cli.eta_y.or(file.eta_y),
            tilt: cli.tilt.map(Tilt::Spec).or(file.tilt),
            schedule: cli.schedule.or(file.schedule),
            iters: cli.iters.or(file.iters).unwrap_or(DEFAULT_ITERS),
            seed: cli.seed.or(file.seed).unwrap_or(0),
            replicas: cli.replicas.or(file.replicas).unwrap_or(DEFAULT_REPLICAS),
            burn_in: cli.burn_in.or(file.burn_in).unwrap_or(DEFAULT_BURN_IN),
            stride: cli.stride.or(file.stride),
            tol: cli.tol.or(file.tol),
            epsilon: cli.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON),
            out,
            allow_constant_step: cli.allow_constant_step
                || file.allow_constant_step.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.iters == 0 {
            return Err(CliError::config("--iters must be at least 1"));
        }
        if self.stride == Some(0) {
            return Err(CliError::config("--stride must be at least 1"));
        }
        for (name, v) in [("tol", self.tol), ("epsilon", Some(self.epsilon))] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::config(format!(
                        "--{name} must be positive, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eta(&self) -> Result<f64, CliError> {
        self.eta.ok_or_else(|| {
            CliError::config(format!("--eta is required for {}", self.experiment.name()))
        })
    }

    pub fn eta_xy(&self) -> Result<(f64, f64), CliError> {
        let ex = self.eta_x.or(self.eta);
        let ey = self.eta_y.or(self.eta);
        match (ex, ey) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(CliError::config(
                "composite needs --eta or both --eta-x and --eta-y",
            )),
        }
    }
}

//! Run configuration: defaults, an optional JSON file, then command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use rollwaves::params::PhysicalParams;
use rollwaves::solver::NewtonOptions;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Global flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct GlobalArgs {
    /// Viscosity coefficient μ (default 0.15).
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// Surface tension coefficient σ (default 2.0).
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Fourier modes along x1 (default 64).
    #[arg(long, global = true)]
    pub n1: Option<usize>,
    /// Fourier modes along x2 (default 64).
    #[arg(long, global = true)]
    pub n2: Option<usize>,
    /// Output directory (default ".").
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sweeps; 0 picks the core count.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON file with the same keys as the flags plus an optional "solver" object.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mu: f64,
    pub sigma: f64,
    pub n1: usize,
    pub n2: usize,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: usize,
    pub solver: NewtonOptions,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mu: 0.15,
            sigma: 2.0,
            n1: 64,
            n2: 64,
            out: PathBuf::from("."),
            seed: 0,
            jobs: 0,
            solver: NewtonOptions::default(),
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Layers the flags over the file (if any) over the defaults and validates the result.
    pub fn resolve(args: &GlobalArgs) -> CliResult<Self> {
        let mut cfg = match &args.config {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        if let Some(v) = args.mu {
            cfg.mu = v;
        }
        if let Some(v) = args.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = args.n1 {
            cfg.n1 = v;
        }
        if let Some(v) = args.n2 {
            cfg.n2 = v;
        }
        if let Some(v) = &args.out {
            cfg.out = v.clone();
        }
        if let Some(v) = args.seed {
            cfg.seed = v;
        }
        if let Some(v) = args.jobs {
            cfg.jobs = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        PhysicalParams::new(self.mu, self.sigma).map_err(|e| CliError::Config(e.to_string()))?;
        for n in [self.n1, self.n2] {
            if n < 8 || !n.is_multiple_of(2) {
                return Err(CliError::Config(format!("mode counts must be even and at least 8, got {n}")));
            }
        }
        self.solver.validate().map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn phys(&self) -> PhysicalParams {
        PhysicalParams { mu: self.mu, sigma: self.sigma }
    }
}

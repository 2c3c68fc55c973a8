//! Command-line front end: region scans, kernel diagnostics, single solves,
//! amplitude sweeps and the verification suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod verify;

use std::ffi::OsString;

use clap::{Parser, Subcommand};
use rollwaves::params::{classify, DriveParams};

use crate::commands::SweepGamma;
use crate::config::{GlobalArgs, RunConfig};
use crate::error::{CliError, CliResult};
use crate::verify::Suite;

pub const VERIFY_JSON: &str = "verify_report.json";

#[derive(Parser, Debug)]
#[command(name = "rollwaves", version, about = "Small-amplitude roll waves on a periodic inclined film")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the speed interval of E and -E at sampled tilts.
    Region {
        #[arg(long, default_value_t = 1.5)]
        kappa_min: f64,
        #[arg(long, default_value_t = 12.0)]
        kappa_max: f64,
        #[arg(long, default_value_t = 106)]
        samples: usize,
    },
    /// Report kernel frequencies, periods and mode-block singular values.
    Kernel {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
    },
    /// Construct one branch point.
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long, default_value_t = 0.02, allow_hyphen_values = true)]
        amplitude: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Solve across speeds at fixed tilt, one torus per speed.
    Sweep {
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        kappa: f64,
        /// Comma-separated speeds; `min` stands for the smallest admissible speed.
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<SweepGamma>>,
        #[arg(long, default_value_t = 0.02, allow_hyphen_values = true)]
        amplitude: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Run the self-checks and write verify_report.json.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::Fast)]
        suite: Suite,
    },
}

pub fn dispatch(cli: Cli) -> CliResult<()> {
    let cfg = RunConfig::resolve(&cli.global)?;
    match cli.command {
        Command::Region { kappa_min, kappa_max, samples } => {
            let path = commands::cmd_region(&cfg, kappa_min, kappa_max, samples)?;
            println!("wrote {}", path.display());
        }
        Command::Kernel { gamma, kappa } => {
            let rep = commands::cmd_kernel(&cfg, &DriveParams::new(gamma, kappa))?;
            println!(
                "{} kernel modes ({}), periods ({:.6}, {:.6})",
                rep.kernel_modes.len(),
                rep.tag,
                rep.periods[0],
                rep.periods[1]
            );
        }
        Command::Solve { gamma, kappa, amplitude, theta } => {
            let drive = DriveParams::new(gamma, kappa);
            println!("terminal ({gamma}, {kappa}): {}", commands::describe(classify(&cfg.phys(), &drive)));
            let bp = commands::cmd_solve(&cfg, &drive, amplitude, theta);
            if let Ok(bp) = &bp {
                println!(
                    "corrected (gamma, kappa) = ({:.12}, {:.12}), residual {:.3e}, {} Newton steps",
                    bp.drive.gamma, bp.drive.kappa, bp.residual_norm, bp.newton_iters
                );
            }
            bp?;
        }
        Command::Sweep { kappa, gammas, amplitude, theta } => {
            let rows = commands::cmd_sweep(&cfg, kappa, gammas.as_deref(), amplitude, theta)?;
            for r in &rows {
                let status = if r.converged { "ok".to_string() } else { format!("failed: {}", r.error) };
                println!("gamma {:<10} {status}", r.gamma);
            }
        }
        Command::Verify { suite } => {
            let rep = verify::run_suite(&cfg, suite)?;
            std::fs::create_dir_all(&cfg.out)?;
            commands::write_json(&cfg.out.join(VERIFY_JSON), &rep)?;
            for c in &rep.checks {
                println!("{} {:<36} {:>12.4e}  ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.requirement);
            }
            if !rep.passed {
                return Err(CliError::VerifyFailed(rep.failures()));
            }
        }
    }
    Ok(())
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

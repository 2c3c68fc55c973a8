//! Subcommand bodies. Each takes a resolved [`RunConfig`] and writes into `cfg.out`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rollwaves::linear::{kernel_basis, mode_matrix, mode_singular_values};
use rollwaves::params::{classify, gamma_min, kernel_frequencies, period_lengths, region_boundary_scan, DriveParams, RegionClass};
use rollwaves::solver::{reflect_solution, write_branch_point, BranchPoint, BranchSolver};
use rollwaves::spectral::TorusGrid;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const REGION_CSV: &str = "region_boundary.csv";
pub const KERNEL_JSON: &str = "kernel_modes.json";
pub const SWEEP_CSV: &str = "sweep_summary.csv";
pub const SWEEP_META: &str = "sweep_meta.json";

/// Default speeds for `sweep` at tilt 10. Our own choice: nine values spread over `[γ_min(10), 10)`.
pub const DEFAULT_SWEEP_GAMMAS: [f64; 9] = [3.0, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5, 9.3, 9.8];

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn region_error(drive: &DriveParams) -> CliError {
    CliError::Region(format!("(gamma, kappa) = ({}, {}) lies outside E and -E", drive.gamma, drive.kappa))
}

/// Torus with periods from the period-length map and the configured mode counts.
pub fn lattice_grid(cfg: &RunConfig, drive: &DriveParams) -> CliResult<TorusGrid> {
    if !classify(&cfg.phys(), drive).is_inside() {
        return Err(region_error(drive));
    }
    let (l1, l2) = period_lengths(&cfg.phys(), drive)?;
    Ok(TorusGrid::new(l1, l2, cfg.n1, cfg.n2)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
struct RegionRow {
    branch: &'static str,
    kappa: f64,
    gamma_min: f64,
    gamma_max: f64,
}

/// Writes the speed interval admitted at each tilt for both branches.
///
/// Rows of `E` hold `γ ∈ [γ_min(κ), κ)`; rows of `−E` hold `γ ∈ (κ, −γ_min(|κ|)]` with `κ < 0`.
pub fn cmd_region(cfg: &RunConfig, kappa_lo: f64, kappa_hi: f64, samples: usize) -> CliResult<PathBuf> {
    let rows = region_boundary_scan(&cfg.phys(), kappa_lo, kappa_hi, samples)
        .map_err(|e| CliError::Config(e.to_string()))?;
    std::fs::create_dir_all(&cfg.out)?;
    let path = cfg.out.join(REGION_CSV);
    let mut w = csv::Writer::from_path(&path)?;
    for r in &rows {
        w.serialize(RegionRow { branch: "E", kappa: r.kappa, gamma_min: r.gamma_min, gamma_max: r.gamma_max })?;
    }
    for r in &rows {
        w.serialize(RegionRow { branch: "-E", kappa: -r.kappa, gamma_min: -r.gamma_max, gamma_max: -r.gamma_min })?;
    }
    w.flush()?;
    Ok(path)
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelMode {
    pub k1: i64,
    pub k2: i64,
    pub xi: [f64; 2],
    pub sigma_min: f64,
    /// Smallest over largest singular value of the mode block.
    pub sigma_min_relative: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub mu: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub tag: &'static str,
    pub negative_branch: bool,
    pub periods: [f64; 2],
    pub n1: usize,
    pub n2: usize,
    pub frequencies: Vec<[f64; 2]>,
    pub kernel_modes: Vec<KernelMode>,
    /// Extremes of the smallest singular value over every other nonzero resolved mode.
    pub off_kernel_sigma_min: f64,
    pub off_kernel_sigma_max: f64,
}

pub fn kernel_report(cfg: &RunConfig, drive: &DriveParams) -> CliResult<KernelReport> {
    let phys = cfg.phys();
    let class = classify(&phys, drive);
    let grid = lattice_grid(cfg, drive)?;
    let frequencies = kernel_frequencies(&phys, drive)?;
    let modes: Vec<(i64, i64)> =
        frequencies.iter().map(|f| ((f[0] * grid.l1).round() as i64, (f[1] * grid.l2).round() as i64)).collect();
    let sv = |k1: i64, k2: i64| {
        let xi = [k1 as f64 / grid.l1, k2 as f64 / grid.l2];
        mode_singular_values(&mode_matrix(&phys, drive, xi))
    };
    let kernel_modes = modes
        .iter()
        .map(|&(k1, k2)| {
            let s = sv(k1, k2);
            KernelMode { k1, k2, xi: [k1 as f64 / grid.l1, k2 as f64 / grid.l2], sigma_min: s[2], sigma_min_relative: s[2] / s[0] }
        })
        .collect();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for idx in 0..grid.len() {
        let (k1, k2) = grid.wavenumbers(idx);
        if grid.is_nyquist(idx) || (k1, k2) == (0, 0) || modes.contains(&(k1, k2)) {
            continue;
        }
        let s = sv(k1, k2)[2];
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok(KernelReport {
        mu: phys.mu,
        sigma: phys.sigma,
        gamma: drive.gamma,
        kappa: drive.kappa,
        tag: class.tag(),
        negative_branch: class.is_negative(),
        periods: [grid.l1, grid.l2],
        n1: grid.n1,
        n2: grid.n2,
        frequencies,
        kernel_modes,
        off_kernel_sigma_min: lo,
        off_kernel_sigma_max: hi,
    })
}

pub fn cmd_kernel(cfg: &RunConfig, drive: &DriveParams) -> CliResult<KernelReport> {
    let rep = kernel_report(cfg, drive)?;
    std::fs::create_dir_all(&cfg.out)?;
    write_json(&cfg.out.join(KERNEL_JSON), &rep)?;
    Ok(rep)
}

/// Solves one branch point; terminals in `−E` go through the reflection of the mirrored solve.
///
/// Non-convergence is reported through `converged`, not as an error.
pub fn solve_point(cfg: &RunConfig, drive_star: &DriveParams, amplitude: f64, theta: f64) -> CliResult<BranchPoint> {
    let phys = cfg.phys();
    let class = classify(&phys, drive_star);
    if !class.is_inside() {
        return Err(region_error(drive_star));
    }
    let positive = if class.is_negative() { drive_star.negated() } else { *drive_star };
    let grid = lattice_grid(cfg, &positive)?;
    let basis = kernel_basis(&phys, &positive, grid)?;
    let solver = BranchSolver::new(&phys, &basis, cfg.solver)?;
    if class.is_negative() {
        Ok(reflect_solution(&solver.run(amplitude, -theta, None)?))
    } else {
        Ok(solver.run(amplitude, theta, None)?)
    }
}

/// Solve and write `branch_point.json` plus field CSVs into `dir`.
pub fn cmd_solve(cfg: &RunConfig, drive_star: &DriveParams, amplitude: f64, theta: f64) -> CliResult<BranchPoint> {
    let bp = solve_point(cfg, drive_star, amplitude, theta)?;
    write_branch_point(&cfg.out, &bp)?;
    if !bp.converged {
        return Err(CliError::NoConvergence(format!(
            "residual {:.3e} after {} iterations",
            bp.residual_norm, bp.newton_iters
        )));
    }
    Ok(bp)
}

/// A speed requested from `sweep`: a number or `min` for `γ_min(κ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepGamma {
    Value(f64),
    Min,
}

impl std::str::FromStr for SweepGamma {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("min") {
            return Ok(SweepGamma::Min);
        }
        s.trim().parse::<f64>().map(SweepGamma::Value).map_err(|e| format!("bad speed {s:?}: {e}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub region: &'static str,
    pub l1: Option<f64>,
    pub l2: Option<f64>,
    pub gamma_corrected: Option<f64>,
    pub kappa_corrected: Option<f64>,
    pub residual: Option<f64>,
    pub max_eta: Option<f64>,
    pub converged: bool,
    pub directory: String,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
struct SweepMeta<'a> {
    mu: f64,
    sigma: f64,
    n1: usize,
    n2: usize,
    kappa_star: f64,
    amplitude: f64,
    theta: f64,
    gammas: Vec<f64>,
    gamma_source: &'a str,
    succeeded: usize,
}

fn sweep_entry(cfg: &RunConfig, kappa: f64, gamma: f64, amplitude: f64, theta: f64) -> SweepRow {
    let drive = DriveParams::new(gamma, kappa);
    let dirname = format!("gamma_{gamma:.6}");
    let mut row = SweepRow {
        gamma,
        region: classify(&cfg.phys(), &drive).tag(),
        l1: None,
        l2: None,
        gamma_corrected: None,
        kappa_corrected: None,
        residual: None,
        max_eta: None,
        converged: false,
        directory: dirname.clone(),
        error: String::new(),
    };
    let run = || -> CliResult<BranchPoint> {
        let bp = solve_point(cfg, &drive, amplitude, theta)?;
        write_branch_point(&cfg.out.join(&dirname), &bp)?;
        Ok(bp)
    };
    match run() {
        Ok(bp) => {
            row.l1 = Some(bp.grid().l1);
            row.l2 = Some(bp.grid().l2);
            row.gamma_corrected = Some(bp.drive.gamma);
            row.kappa_corrected = Some(bp.drive.kappa);
            row.residual = Some(bp.residual_norm);
            row.max_eta = Some(bp.state.eta.max_abs());
            row.converged = bp.converged;
            if !bp.converged {
                row.error = "no convergence".into();
            }
        }
        Err(e) => {
            row.directory.clear();
            row.error = e.to_string();
        }
    }
    row
}

/// One solve per speed at fixed tilt, each on its own torus, run on a pool of `cfg.jobs` threads.
pub fn cmd_sweep(
    cfg: &RunConfig,
    kappa: f64,
    gammas: Option<&[SweepGamma]>,
    amplitude: f64,
    theta: f64,
) -> CliResult<Vec<SweepRow>> {
    let source = if gammas.is_some() { "user" } else { "default list chosen by rollwaves" };
    let requested: Vec<SweepGamma> = match gammas {
        Some(g) => g.to_vec(),
        None => DEFAULT_SWEEP_GAMMAS.iter().map(|&g| SweepGamma::Value(g)).collect(),
    };
    if requested.is_empty() {
        return Err(CliError::Config("empty speed list".into()));
    }
    let values: Vec<f64> = requested
        .iter()
        .map(|g| match g {
            SweepGamma::Value(v) => Ok(*v),
            SweepGamma::Min => gamma_min(&cfg.phys(), kappa.abs())
                .map(|v| v * kappa.signum())
                .map_err(|e| CliError::Config(e.to_string())),
        })
        .collect::<CliResult<_>>()?;
    std::fs::create_dir_all(&cfg.out)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let rows: Vec<SweepRow> =
        pool.install(|| values.par_iter().map(|&g| sweep_entry(cfg, kappa, g, amplitude, theta)).collect());

    let mut w = csv::Writer::from_path(cfg.out.join(SWEEP_CSV))?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let succeeded = rows.iter().filter(|r| r.converged).count();
    let meta = SweepMeta {
        mu: cfg.mu,
        sigma: cfg.sigma,
        n1: cfg.n1,
        n2: cfg.n2,
        kappa_star: kappa,
        amplitude,
        theta,
        gammas: values,
        gamma_source: source,
        succeeded,
    };
    write_json(&cfg.out.join(SWEEP_META), &meta)?;
    if succeeded == 0 {
        return Err(CliError::NoConvergence("no sweep entry converged".into()));
    }
    Ok(rows)
}

/// Labels of the region classes for printing.
pub fn describe(class: RegionClass) -> String {
    let side = if class.is_negative() { "-E" } else { "E" };
    match class {
        RegionClass::Outside => "outside".into(),
        _ => format!("{} of {side}", class.tag()),
    }
}

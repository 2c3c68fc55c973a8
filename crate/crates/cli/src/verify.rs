//! Self-checks behind `rollwaves verify`.
//!
//! `fast` runs everything on the configured grid at the default parameters;
//! `full` adds a rerun with doubled resolution and the nonexistence probes.

use rollwaves::linear::{apply_p, kernel_basis, KernelBasis, LinearOperator, RANK_RTOL};
use rollwaves::params::{chi, gamma_min, kernel_frequencies, DriveParams, PhysicalParams};
use rollwaves::solver::{
    continue_branch, loglog_slope, nonexistence_probe, quadratic_constant, reflect_solution, shape_report, BranchPoint,
    BranchSolver,
};
use rollwaves::spectral::TorusGrid;
use serde::Serialize;

use crate::commands::lattice_grid;
use crate::config::RunConfig;
use crate::error::CliResult;

/// Amplitudes of the existence and shape sweeps.
pub const AMPLITUDES: [f64; 5] = [0.00125, 0.0025, 0.005, 0.01, 0.02];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Fast,
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub requirement: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub mu: f64,
    pub sigma: f64,
    pub n1: usize,
    pub n2: usize,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, passed: bool, value: f64, requirement: &str) {
        self.0.push(Check { name: name.into(), passed, value, requirement: requirement.into() });
    }

    fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.push(name, value <= bound, value, &format!("<= {bound:e}"));
    }

    fn within(&mut self, name: &str, value: f64, lo: f64, hi: f64) {
        self.push(name, (lo..=hi).contains(&value), value, &format!("in [{lo}, {hi}]"));
    }
}

/// Plain bisection for the lower boundary of E, kept apart from the library root finder.
fn bisect_gamma_min(phys: &PhysicalParams, kappa: f64) -> f64 {
    let c = phys.sigma / (4.0 * phys.mu);
    let f = |g: f64| kappa - g - g * (g * g - 1.0) / c;
    let (mut lo, mut hi) = (1.0, kappa);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn ratio_spread(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    hi / lo
}

/// Slopes and worst residual of one branch sweep.
struct Sweep {
    drift_slope: f64,
    z_slope: f64,
    eta_slope: f64,
    velocity_spread: f64,
    min_cross_stream: f64,
    worst_residual: f64,
    all_converged: bool,
    points: Vec<BranchPoint>,
}

fn branch_sweep(cfg: &RunConfig, drive: &DriveParams, n1: usize, n2: usize) -> CliResult<(Sweep, KernelBasis)> {
    let phys = cfg.phys();
    let grid = lattice_grid(cfg, drive)?.with_modes(n1, n2)?;
    let basis = kernel_basis(&phys, drive, grid)?;
    let pts = continue_branch(&phys, drive, &basis, 0.0, &AMPLITUDES, &cfg.solver)?;
    let all_converged = pts.len() == AMPLITUDES.len() && pts.iter().all(|p| p.converged);
    let reps = pts.iter().map(|p| shape_report(p, &basis)).collect::<Result<Vec<_>, _>>()?;
    let a: Vec<f64> = pts.iter().map(|p| p.amplitude).collect();
    let drift: Vec<f64> = pts.iter().map(|p| p.drift()).collect();
    let z: Vec<f64> = reps.iter().map(|r| r.z_norm).collect();
    let eta: Vec<f64> = reps.iter().map(|r| r.eta_deviation).collect();
    let vel: Vec<f64> = reps.iter().map(|r| r.u_deviation / (r.amplitude * r.amplitude)).collect();
    let sweep = Sweep {
        drift_slope: loglog_slope(&a, &drift),
        z_slope: loglog_slope(&a, &z),
        eta_slope: loglog_slope(&a, &eta),
        velocity_spread: ratio_spread(&vel),
        min_cross_stream: reps.iter().map(|r| r.cross_stream_fraction).fold(f64::INFINITY, f64::min),
        worst_residual: pts.iter().map(|p| p.residual_norm).fold(0.0, f64::max),
        all_converged,
        points: pts,
    };
    Ok((sweep, basis))
}

pub fn run_suite(cfg: &RunConfig, suite: Suite) -> CliResult<VerifyReport> {
    let phys = cfg.phys();
    let mut c = Checks(Vec::new());
    let interior = DriveParams::new(5.0, 10.0);
    let border = DriveParams::new(2.0, 3.8);

    // region geometry
    let gm = gamma_min(&phys, 10.0)?;
    c.at_most("region.gamma_min_vs_bisection", (gm - bisect_gamma_min(&phys, 10.0)).abs(), 1e-10);
    let border_chi = (chi(&phys, &border)? - 1.0).abs();
    let border_freqs = kernel_frequencies(&phys, &border)?.len();
    c.push("region.border_chi_and_count", border_chi <= 1e-12 && border_freqs == 2, border_chi, "|chi-1| <= 1e-12, 2 frequencies");
    let grid = lattice_grid(cfg, &interior)?;
    let freqs = kernel_frequencies(&phys, &interior)?;
    let off_lattice = freqs
        .iter()
        .map(|f| ((f[0] * grid.l1).round() - f[0] * grid.l1).abs().max(((f[1] * grid.l2).round() - f[1] * grid.l2).abs()))
        .fold(0.0, f64::max);
    c.push("region.interior_lattice", freqs.len() == 4 && off_lattice <= 1e-12, off_lattice, "4 frequencies on the lattice");

    // kernel and transversality
    let basis = kernel_basis(&phys, &interior, grid)?;
    let exact = [&basis.v_plus, &basis.v_minus]
        .iter()
        .map(|v| apply_p(&phys, &interior, v).norm() / v.norm())
        .fold(0.0, f64::max);
    c.at_most("linear.kernel_exactness", exact, 1e-11);
    let deficient = LinearOperator::new(phys, interior, grid).rank_deficient_modes(RANK_RTOL).len();
    c.push("linear.rank_deficient_modes", deficient == 4, deficient as f64, "== 4");
    let t = basis.transversality()?;
    c.push(
        "linear.transversality",
        t.max_relative_error <= 1e-10 && t.condition.is_finite(),
        t.max_relative_error,
        "<= 1e-10 relative, invertible",
    );

    // existence, shape, reflection
    let (sw, basis) = branch_sweep(cfg, &interior, cfg.n1, cfg.n2)?;
    c.push("solver.existence", sw.all_converged && sw.worst_residual <= 1e-10, sw.worst_residual, "all converged, <= 1e-10");
    c.within("solver.drift_slope", sw.drift_slope, 0.85, 1.15);
    c.within("solver.z_slope", sw.z_slope, 1.8, 2.2);
    c.within("solver.shape_eta_slope", sw.eta_slope, 1.8, 2.2);
    c.push("solver.shape_velocity_ratio", sw.velocity_spread < 2.0, sw.velocity_spread, "max/min < 2");
    c.push("solver.cross_stream_interior", sw.min_cross_stream >= 0.4, sw.min_cross_stream, ">= 0.4");
    let reflected = sw.points.iter().map(|p| reflect_solution(p).residual_norm).fold(0.0, f64::max);
    c.at_most("solver.reflection", reflected, 1e-10);
    let quad: Vec<f64> = sw.points.iter().filter_map(|p| quadratic_constant(&p.residual_history, 1e-14)).collect();
    c.push("solver.quadratic_newton", !quad.is_empty() && ratio_spread(&quad) < 10.0, ratio_spread(&quad), "max/min < 10");
    let solver = BranchSolver::new(&phys, &basis, cfg.solver)?;
    let last = sw.points.last().expect("non-empty sweep");
    let dist = solver.uniqueness_check(last, 0.1, cfg.seed)?;
    c.at_most("solver.local_uniqueness", dist, 1e-8);

    let bgrid = lattice_grid(cfg, &border)?;
    let bbasis = kernel_basis(&phys, &border, bgrid)?;
    let a = 0.02;
    let bp = BranchSolver::new(&phys, &bbasis, cfg.solver)?.solve(a, 0.0, None)?;
    let frac = bp.state.eta.cross_stream_energy_fraction();
    c.at_most("solver.cross_stream_border", frac, a * a);

    if suite == Suite::Full {
        let (fine, _) = branch_sweep(cfg, &interior, 2 * cfg.n1, 2 * cfg.n2)?;
        let change = [
            (fine.drift_slope - sw.drift_slope).abs(),
            (fine.z_slope - sw.z_slope).abs(),
            (fine.eta_slope - sw.eta_slope).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        c.at_most("discretization.slope_change", change, 0.05);
        c.push(
            "discretization.fine_residuals",
            fine.all_converged && fine.worst_residual <= 1e-10,
            fine.worst_residual,
            "all converged, <= 1e-10",
        );
        let pgrid = TorusGrid::new(10.0, 10.0, cfg.n1, cfg.n2)?;
        for (g, k) in [(0.5, 10.0), (5.0, 4.0), (5.0, -10.0)] {
            let name = format!("nonexistence.({g}, {k})");
            match nonexistence_probe(&phys, &DriveParams::new(g, k), pgrid, 20, 1e-3, &cfg.solver, cfg.seed) {
                Ok(rep) => {
                    let worst = rep.trials.iter().map(|t| t.final_norm).fold(0.0, f64::max);
                    c.push(&name, rep.all_zero(), worst, "every trial ends at norm <= 1e-12");
                }
                Err(e) => c.push(&name, false, f64::NAN, &format!("probe failed: {e}")),
            }
        }
    }

    let checks = c.0;
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { suite, mu: cfg.mu, sigma: cfg.sigma, n1: cfg.n1, n2: cfg.n2, seed: cfg.seed, checks, passed })
}

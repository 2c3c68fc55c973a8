//! Bordered Newton-Krylov construction of bifurcating roll waves.
//!
//! The unknowns are the state, `γ` and `κ`. The equations are
//! `(P + N)(γ, κ, state) = 0` together with the two amplitude-phase
//! constraints `⟨η, φ₊⟩ = a cos θ` and `⟨η, φ₋⟩ = a sin θ`. Parameter updates
//! are carried as `p = a δλ`, so the bordered matrix stays well scaled as
//! `a → 0`.

use nalgebra::{Matrix2, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krylov::{gmres, GmresOptions};
use crate::linear::{
    apply_ps, apply_pt, s_gamma_unchecked, shape_velocity, KernelBasis, LinearOperator, LinearSolver, Residual, SolveMode, State,
};
use crate::nonlinear::NonlinearMap;
use crate::params::{classify, DriveParams, PhysicalParams, RegionClass};
use crate::spectral::TorusGrid;

mod record;
pub use record::{read_branch_point, write_branch_point, BranchRecord, BRANCH_JSON, FIELD_FILES};

/// Tolerances and caps for the Newton and Krylov loops.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    /// Absolute target on the `L²` norm of the residual.
    pub tol_residual: f64,
    pub max_iter: usize,
    /// Relative target for each linear solve.
    pub krylov_tol: f64,
    pub krylov_max: usize,
    pub krylov_restart: usize,
    /// Initial step fraction of each Newton update.
    pub damping: f64,
    /// Largest amplitude accepted by the branch solver.
    pub max_amplitude: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol_residual: 1e-10,
            max_iter: 25,
            krylov_tol: 1e-12,
            krylov_max: 500,
            krylov_restart: 60,
            damping: 1.0,
            max_amplitude: 0.2,
        }
    }
}

impl NewtonOptions {
    pub fn validate(&self) -> Result<()> {
        let pos = [self.tol_residual, self.krylov_tol, self.damping, self.max_amplitude];
        if pos.iter().any(|v| !(v.is_finite() && *v > 0.0)) || self.max_iter == 0 || self.krylov_max == 0 || self.krylov_restart == 0 {
            return Err(Error::Domain("newton options must all be positive".into()));
        }
        if self.tol_residual >= 1.0 || self.damping > 1.0 {
            return Err(Error::Domain("need tol_residual < 1 and damping <= 1".into()));
        }
        Ok(())
    }

    fn gmres(&self) -> GmresOptions {
        GmresOptions { tol: self.krylov_tol, max_iter: self.krylov_max, restart: self.krylov_restart }
    }
}

/// One computed roll wave.
#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub phys: PhysicalParams,
    pub amplitude: f64,
    pub theta: f64,
    pub drive_star: DriveParams,
    pub drive: DriveParams,
    pub state: State,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub converged: bool,
    /// Residual norm before each Newton step and after the last.
    pub residual_history: Vec<f64>,
    pub krylov_iters: Vec<usize>,
}

impl BranchPoint {
    pub fn grid(&self) -> &TorusGrid {
        self.state.grid()
    }

    /// `|drive − drive_star|`.
    pub fn drift(&self) -> f64 {
        self.drive.distance(&self.drive_star)
    }
}

/// Sign-aware check that a basis and a starting drive agree.
fn check_basis(phys: &PhysicalParams, drive_star: &DriveParams, basis: &KernelBasis) -> Result<()> {
    if !matches!(classify(phys, drive_star), RegionClass::InteriorE | RegionClass::BorderE) {
        return Err(Error::Domain(format!(
            "branch solves start in E, got ({}, {})",
            drive_star.gamma, drive_star.kappa
        )));
    }
    if basis.drive != *drive_star || basis.phys != *phys {
        return Err(Error::Domain("kernel basis was built for different parameters".into()));
    }
    Ok(())
}

/// Exact inverse of the bordered operator with `a = 0`:
/// `[[P, P_s v, P_t v], [⟨·, φ₊⟩, 0, 0], [⟨·, φ₋⟩, 0, 0]]` with `v = cos θ V₊ + sin θ V₋`.
struct BorderedPreconditioner<'a> {
    basis: &'a KernelBasis,
    pseudo: LinearSolver,
    ps_v: Residual,
    pt_v: Residual,
    /// Inverse of the 2×2 map `(α, β) ↦ Π S_γ (α P_s v + β P_t v)`.
    reduced_inv: Matrix2<f64>,
    mu: f64,
    gamma: f64,
}

impl<'a> BorderedPreconditioner<'a> {
    fn new(basis: &'a KernelBasis, theta: f64) -> Result<Self> {
        let pseudo = LinearSolver::new(&basis.phys, &basis.drive, *basis.grid(), SolveMode::PseudoOnZ)?;
        let v = basis.combine(theta.cos(), theta.sin());
        let ps_v = apply_ps(&v);
        let pt_v = apply_pt(&v);
        let (mu, gamma) = (basis.phys.mu, basis.drive.gamma);
        let cs = basis.project_kernel(&s_gamma_unchecked(mu, gamma, &ps_v));
        let ct = basis.project_kernel(&s_gamma_unchecked(mu, gamma, &pt_v));
        let m = Matrix2::new(cs.0, ct.0, cs.1, ct.1);
        let reduced_inv = m.try_inverse().ok_or_else(|| Error::Domain("parameter columns are not transverse".into()))?;
        Ok(Self { basis, pseudo, ps_v, pt_v, reduced_inv, mu, gamma })
    }

    fn apply(&self, r: &Residual, c: [f64; 2]) -> Result<(State, [f64; 2])> {
        let h = self.basis.project_kernel(&s_gamma_unchecked(self.mu, self.gamma, r));
        let ab = self.reduced_inv * Vector2::new(h.0, h.1);
        let mut rt = r.clone();
        rt.axpy(-ab[0], &self.ps_v);
        rt.axpy(-ab[1], &self.pt_v);
        let mut z = self.pseudo.solve(&rt)?;
        z.axpy(c[0], &self.basis.v_plus);
        z.axpy(c[1], &self.basis.v_minus);
        Ok((z.parity_project(), [ab[0], ab[1]]))
    }
}

fn pack_bordered(s: &State, tail: [f64; 2]) -> Vec<f64> {
    let mut v = s.pack();
    v.extend_from_slice(&tail);
    v
}

fn split_bordered(grid: TorusGrid, v: &[f64]) -> Result<(State, [f64; 2])> {
    let n = v.len() - 2;
    Ok((State::unpack(grid, &v[..n])?.parity_project(), [v[n], v[n + 1]]))
}

fn norm2(r: f64, c: [f64; 2]) -> f64 {
    (r * r + c[0] * c[0] + c[1] * c[1]).sqrt()
}

/// Reusable branch solver bound to one kernel basis.
pub struct BranchSolver<'a> {
    pub phys: PhysicalParams,
    pub basis: &'a KernelBasis,
    pub opts: NewtonOptions,
    nl: NonlinearMap,
}

impl<'a> BranchSolver<'a> {
    pub fn new(phys: &PhysicalParams, basis: &'a KernelBasis, opts: NewtonOptions) -> Result<Self> {
        opts.validate()?;
        check_basis(phys, &basis.drive, basis)?;
        Ok(Self { phys: *phys, basis, opts, nl: NonlinearMap::new(*phys, *basis.grid()) })
    }

    fn constraints(&self, s: &State, a: f64, theta: f64) -> [f64; 2] {
        let (p, m) = self.basis.project_kernel(&s.eta);
        [p - a * theta.cos(), m - a * theta.sin()]
    }

    fn residual(&self, drive: &DriveParams, s: &State) -> Residual {
        let lin = LinearOperator::new(self.phys, *drive, *self.basis.grid());
        self.nl.residual(&lin, s).parity_project()
    }

    /// Runs Newton from the default or a supplied initial guess and always returns the
    /// final iterate; `converged` tells whether the tolerance was met.
    pub fn run(&self, a: f64, theta: f64, warm: Option<(&State, DriveParams)>) -> Result<BranchPoint> {
        let grid = *self.basis.grid();
        let drive_star = self.basis.drive;
        if !a.is_finite() || a.abs() > self.opts.max_amplitude {
            return Err(Error::Domain(format!("amplitude {a} exceeds the cap {}", self.opts.max_amplitude)));
        }
        let mut bp = BranchPoint {
            phys: self.phys,
            amplitude: a,
            theta,
            drive_star,
            drive: drive_star,
            state: State::zeros(grid),
            residual_norm: 0.0,
            newton_iters: 0,
            converged: true,
            residual_history: vec![0.0],
            krylov_iters: Vec::new(),
        };
        if a == 0.0 {
            return Ok(bp);
        }

        let (mut x, mut drive) = match warm {
            Some((s, d)) => {
                grid.check_same(s.grid())?;
                (s.parity_project(), d)
            }
            None => {
                let vp = &self.basis.v_plus;
                let vm = &self.basis.v_minus;
                let mut s = vp.scale(a * theta.cos() / vp.norm());
                s.axpy(a * theta.sin() / vm.norm(), vm);
                (s, drive_star)
            }
        };
        let pre = BorderedPreconditioner::new(self.basis, theta)?;
        let mut f = self.residual(&drive, &x);
        let mut c = self.constraints(&x, a, theta);
        let mut history = vec![f.norm()];
        let mut krylov = Vec::new();
        let mut iters = 0;
        let cons_tol = 1e-12;

        while !(f.norm() <= self.opts.tol_residual && c[0].abs().max(c[1].abs()) <= cons_tol) && iters < self.opts.max_iter {
            let lin = LinearOperator::new(self.phys, drive, grid);
            let dn = self.nl.linearize(&drive, &x);
            let jg = self.nl.jac_gamma(&x).parity_project().scale(1.0 / a);
            let jk = self.nl.jac_kappa(&x).parity_project().scale(1.0 / a);
            let apply_j = |v: &[f64]| -> Result<Vec<f64>> {
                let (dx, p) = split_bordered(grid, v)?;
                let mut out = lin.apply(&dx).add(&dn.apply_dn(&dx));
                out.axpy(p[0], &jg);
                out.axpy(p[1], &jk);
                let out = out.parity_project();
                let (cp, cm) = self.basis.project_kernel(&dx.eta);
                Ok(pack_bordered(&State { u: out.f, eta: out.g }, [cp, cm]))
            };
            let apply_m = |v: &[f64]| -> Result<Vec<f64>> {
                let n = v.len() - 2;
                let r = Residual::unpack(grid, &v[..n])?.parity_project();
                let (z, ab) = pre.apply(&r, [v[n], v[n + 1]])?;
                Ok(pack_bordered(&z, ab))
            };
            let rhs = pack_bordered(&State { u: f.f.scale(-1.0), eta: f.g.scale(-1.0) }, [-c[0], -c[1]]);
            let out = gmres(apply_j, apply_m, &rhs, &self.opts.gmres())?;
            krylov.push(out.iterations);
            if out.relative_residual > 1e-6 {
                return Err(Error::KrylovStall { iterations: out.iterations, relative: out.relative_residual });
            }
            let (dx, p) = split_bordered(grid, &out.x)?;

            // backtracking on the combined residual
            let merit = norm2(f.norm(), c);
            let mut t = self.opts.damping;
            loop {
                let mut xt = x.clone();
                xt.axpy(t, &dx);
                let dt = DriveParams::new(drive.gamma + t * p[0] / a, drive.kappa + t * p[1] / a);
                let ft = self.residual(&dt, &xt);
                let ct = self.constraints(&xt, a, theta);
                if norm2(ft.norm(), ct) < merit || t < 1.0 / 64.0 {
                    x = xt;
                    drive = dt;
                    f = ft;
                    c = ct;
                    break;
                }
                t *= 0.5;
            }
            iters += 1;
            history.push(f.norm());
        }

        bp.converged = f.norm() <= self.opts.tol_residual && c[0].abs().max(c[1].abs()) <= cons_tol;
        bp.drive = drive;
        bp.state = x;
        bp.residual_norm = f.norm();
        bp.newton_iters = iters;
        bp.residual_history = history;
        bp.krylov_iters = krylov;
        Ok(bp)
    }

    /// Like [`Self::run`] but turns a missed tolerance into [`Error::NoConvergence`].
    pub fn solve(&self, a: f64, theta: f64, warm: Option<(&State, DriveParams)>) -> Result<BranchPoint> {
        let bp = self.run(a, theta, warm)?;
        if !bp.converged {
            return Err(Error::NoConvergence { iterations: bp.newton_iters, residual: bp.residual_norm });
        }
        Ok(bp)
    }
}

/// Solves the bordered system at amplitude `a` and kernel phase `theta`.
pub fn solve_branch_point(
    phys: &PhysicalParams,
    drive_star: &DriveParams,
    basis: &KernelBasis,
    a: f64,
    theta: f64,
    opts: &NewtonOptions,
    warm_start: Option<(&State, DriveParams)>,
) -> Result<BranchPoint> {
    check_basis(phys, drive_star, basis)?;
    BranchSolver::new(phys, basis, *opts)?.solve(a, theta, warm_start)
}

/// Continues a branch through increasing amplitudes, warm-starting each point
/// from the previous one scaled to the new amplitude.
///
/// Stops after the first point that fails to converge; that point is included
/// with `converged = false`.
pub fn continue_branch(
    phys: &PhysicalParams,
    drive_star: &DriveParams,
    basis: &KernelBasis,
    theta: f64,
    a_list: &[f64],
    opts: &NewtonOptions,
) -> Result<Vec<BranchPoint>> {
    check_basis(phys, drive_star, basis)?;
    if a_list.windows(2).any(|w| w[1].abs() < w[0].abs()) {
        return Err(Error::Domain("amplitudes must be sorted by magnitude".into()));
    }
    let solver = BranchSolver::new(phys, basis, *opts)?;
    let mut out: Vec<BranchPoint> = Vec::with_capacity(a_list.len());
    for &a in a_list {
        let warm = out.last().filter(|p| p.amplitude != 0.0).map(|p| (p.state.scale(a / p.amplitude), p.drive));
        let bp = match solver.run(a, theta, warm.as_ref().map(|(s, d)| (s, *d))) {
            Ok(bp) => bp,
            Err(Error::KrylovStall { iterations, relative }) => {
                let mut bp = solver.run(0.0, theta, None)?;
                bp.amplitude = a;
                bp.converged = false;
                bp.residual_norm = relative;
                bp.newton_iters = iterations;
                bp
            }
            Err(e) => return Err(e),
        };
        let failed = !bp.converged;
        out.push(bp);
        if failed {
            break;
        }
    }
    Ok(out)
}

/// Maps a solution at `(γ, κ)` to the solution at `(−γ, −κ)` given by
/// `h = η∘R`, `w = R u∘R`, `R(y1, y2) = (−y1, y2)`.
///
/// The kernel phase changes sign because `φ₋` is odd in `x1`.
pub fn reflect_solution(bp: &BranchPoint) -> BranchPoint {
    let state = bp.state.reflect_x1();
    let drive = bp.drive.negated();
    let lin = LinearOperator::new(bp.phys, drive, *state.grid());
    let residual_norm = NonlinearMap::new(bp.phys, *state.grid()).residual(&lin, &state).norm();
    BranchPoint {
        phys: bp.phys,
        amplitude: bp.amplitude,
        theta: -bp.theta,
        drive_star: bp.drive_star.negated(),
        drive,
        state,
        residual_norm,
        newton_iters: bp.newton_iters,
        converged: bp.converged,
        residual_history: bp.residual_history.clone(),
        krylov_iters: bp.krylov_iters.clone(),
    }
}

/// Outcome of one random start of the nonexistence probe.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeTrial {
    pub seed: u64,
    pub initial_norm: f64,
    pub final_norm: f64,
    pub final_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub drive: DriveParams,
    pub grid: TorusGrid,
    pub zero_threshold: f64,
    pub trials: Vec<ProbeTrial>,
}

impl ProbeReport {
    /// Every trial converged and landed on the zero state.
    pub fn all_zero(&self) -> bool {
        self.trials.iter().all(|t| t.converged && t.final_norm <= self.zero_threshold)
    }
}

/// Final state norms at or below this count as the zero state.
pub const PROBE_ZERO: f64 = 1e-12;

/// Highest wavenumber populated in random probe states.
pub const PROBE_KMAX: i64 = 4;

/// Newton at fixed `(γ, κ)` outside E ∪ (−E), without parity restrictions,
/// from `n_trials` random states of norm `init_norm`.
///
/// Trial `i` is seeded with `seed + i`.
pub fn nonexistence_probe(
    phys: &PhysicalParams,
    drive: &DriveParams,
    grid: TorusGrid,
    n_trials: usize,
    init_norm: f64,
    opts: &NewtonOptions,
    seed: u64,
) -> Result<ProbeReport> {
    opts.validate()?;
    if classify(phys, drive) != RegionClass::Outside {
        return Err(Error::Domain(format!(
            "nonexistence probes run outside E and -E, got ({}, {})",
            drive.gamma, drive.kappa
        )));
    }
    let lin = LinearOperator::new(*phys, *drive, grid);
    let full = LinearSolver::new(phys, drive, grid, SolveMode::Full)?;
    let nl = NonlinearMap::new(*phys, grid);
    let mut trials = Vec::with_capacity(n_trials);
    for i in 0..n_trials {
        let trial_seed = seed.wrapping_add(i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let raw = State::random(grid, &mut rng, PROBE_KMAX, false);
        let mut x = raw.scale(init_norm / raw.norm());
        let mut f = nl.residual(&lin, &x);
        let mut iterations = 0;
        while iterations < opts.max_iter {
            let dn = nl.linearize(drive, &x);
            let apply_j = |v: &[f64]| -> Result<Vec<f64>> {
                let dx = State::unpack(grid, v)?;
                let r = lin.apply(&dx).add(&dn.apply_dn(&dx));
                Ok(State { u: r.f, eta: r.g }.pack())
            };
            let apply_m = |v: &[f64]| -> Result<Vec<f64>> { Ok(full.solve(&Residual::unpack(grid, v)?)?.pack()) };
            let rhs = State { u: f.f.scale(-1.0), eta: f.g.scale(-1.0) }.pack();
            let out = gmres(apply_j, apply_m, &rhs, &opts.gmres())?;
            let dx = State::unpack(grid, &out.x)?;
            x.axpy(1.0, &dx);
            f = nl.residual(&lin, &x);
            iterations += 1;
            if dx.norm() <= 1e-16 || x.norm() <= 1e-20 {
                break;
            }
        }
        let t = ProbeTrial {
            seed: trial_seed,
            initial_norm: init_norm,
            final_norm: x.norm(),
            final_residual: f.norm(),
            iterations,
            converged: f.norm() <= opts.tol_residual,
        };
        if t.converged && t.final_norm > PROBE_ZERO {
            return Err(Error::ProbeFailure(format!(
                "trial with seed {} converged to a state of norm {:.3e} at ({}, {})",
                t.seed, t.final_norm, drive.gamma, drive.kappa
            )));
        }
        trials.push(t);
    }
    Ok(ProbeReport { drive: *drive, grid, zero_threshold: PROBE_ZERO, trials })
}

/// Leading-order shape of a branch point: `η = a(cos θ φ₊ + sin θ φ₋)` and
/// `u = aυ` with `υ` from the Riesz/resolvent formulas at `drive_star`.
pub fn leading_order(bp: &BranchPoint, basis: &KernelBasis) -> Result<State> {
    let (c, s) = (bp.theta.cos(), bp.theta.sin());
    let mut eta = basis.phi_plus.scale(c * bp.amplitude);
    eta.axpy(s * bp.amplitude, &basis.phi_minus);
    let u = shape_velocity(&bp.phys, &bp.drive_star, &eta)?;
    Ok(State { u, eta })
}

/// Deviations of a branch point from its leading-order shape.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShapeReport {
    pub amplitude: f64,
    /// `‖η_a − aυη‖_∞`.
    pub eta_deviation: f64,
    /// `max(‖u1 − aυ1‖_∞, ‖u2 − aυ2‖_∞)`.
    pub u_deviation: f64,
    /// `L²` norm of the part of the state outside the kernel.
    pub z_norm: f64,
    /// Share of `‖η‖²` carried by modes with `ξ2 ≠ 0`.
    pub cross_stream_fraction: f64,
}

pub fn shape_report(bp: &BranchPoint, basis: &KernelBasis) -> Result<ShapeReport> {
    bp.grid().check_same(basis.grid())?;
    let lead = leading_order(bp, basis)?;
    let d = bp.state.sub(&lead);
    Ok(ShapeReport {
        amplitude: bp.amplitude,
        eta_deviation: d.eta.max_abs(),
        u_deviation: d.u.c1.max_abs().max(d.u.c2.max_abs()),
        z_norm: basis.project_z(&bp.state).norm(),
        cross_stream_fraction: bp.state.eta.cross_stream_energy_fraction(),
    })
}

impl BranchSolver<'_> {
    /// Perturbs a converged point by a random `Z`-direction of norm `rel_noise · |a|`,
    /// re-solves from there and returns the state distance to the original.
    pub fn uniqueness_check(&self, bp: &BranchPoint, rel_noise: f64, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = self.basis.project_z(&State::random(*self.basis.grid(), &mut rng, PROBE_KMAX, true));
        let mut start = bp.state.clone();
        start.axpy(rel_noise * bp.amplitude.abs() / noise.norm(), &noise);
        let again = self.solve(bp.amplitude, bp.theta, Some((&start, bp.drive)))?;
        Ok(again.state.sub(&bp.state).norm())
    }
}

/// Log-log least-squares slope of `y` against `x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (a.abs().ln(), b.abs().ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `r_k / r_{k−1}²` for the last Newton step whose residual is above the round-off floor.
pub fn quadratic_constant(history: &[f64], floor: f64) -> Option<f64> {
    history.windows(2).rev().find(|w| w[1] > floor && w[0] > 0.0).map(|w| w[1] / (w[0] * w[0]))
}

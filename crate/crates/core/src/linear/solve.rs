//! Mode-by-mode solves with `P(γ, κ)`.

use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;

use super::{apply_blocks, mode_matrix, mode_singular_values, q_scale, q_symbol, range_covector, standard_tags, Residual, State};
use crate::error::{Error, Result};
use crate::params::{classify, kernel_frequencies, period_lengths, DriveParams, PhysicalParams, RegionClass};
use crate::spectral::{helmholtz_symbol, TorusGrid};

use super::kernel::PERIOD_RTOL;

/// Mode blocks with a larger condition number are treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    /// Exact inverse, available when `P` is an isomorphism (drive outside E ∪ (−E)).
    Full,
    /// Inverse on the range complement construction: `η̂ = ℓ·r̂/q` off the kernel
    /// modes, `η̂ = 0` on them, velocity recovered from `(f, g, η)`.
    PseudoOnZ,
}

/// Precomputed per-mode solution operators `(û1, û2, η̂) = B(ξ) (f̂1, f̂2, ĝ)`.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    pub mode: SolveMode,
    pub grid: TorusGrid,
    blocks: Vec<Matrix3<Complex64>>,
}

fn zero_mode_block() -> Matrix3<Complex64> {
    Matrix3::new(ONE, ZERO, ZERO, ZERO, ONE, ZERO, ZERO, ZERO, ZERO)
}

impl LinearSolver {
    pub fn new(phys: &PhysicalParams, drive: &DriveParams, grid: TorusGrid, mode: SolveMode) -> Result<Self> {
        let blocks = match mode {
            SolveMode::Full => full_blocks(phys, drive, &grid)?,
            SolveMode::PseudoOnZ => pseudo_blocks(phys, drive, &grid)?,
        };
        Ok(Self { mode, grid, blocks })
    }

    pub fn solve(&self, rhs: &Residual) -> Result<State> {
        self.grid.check_same(rhs.grid())?;
        let out = apply_blocks(&self.grid, &self.blocks, rhs.fields());
        let mut s = if rhs.has_standard_parity() { State::from_parts(standard_tags(out)) } else { State::from_parts(out) };
        s.eta.coeffs_mut()[0] = ZERO;
        Ok(s)
    }
}

/// One-shot solve; see [`LinearSolver`] to reuse the per-mode factorizations.
pub fn solve_p(phys: &PhysicalParams, drive: &DriveParams, rhs: &Residual, mode: SolveMode) -> Result<State> {
    LinearSolver::new(phys, drive, *rhs.grid(), mode)?.solve(rhs)
}

fn full_blocks(phys: &PhysicalParams, drive: &DriveParams, grid: &TorusGrid) -> Result<Vec<Matrix3<Complex64>>> {
    if classify(phys, drive) != RegionClass::Outside {
        return Err(Error::Domain(format!(
            "full solve needs (gamma, kappa) outside E and -E, got ({}, {})",
            drive.gamma, drive.kappa
        )));
    }
    let mut blocks = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        if i == 0 {
            blocks.push(zero_mode_block());
            continue;
        }
        if grid.is_nyquist(i) {
            blocks.push(Matrix3::zeros());
            continue;
        }
        let m = mode_matrix(phys, drive, grid.xi(i));
        let sv = mode_singular_values(&m);
        let condition = sv[0] / sv[2];
        let inv = if condition > SINGULAR_CONDITION { None } else { m.lu().try_inverse() };
        match inv {
            Some(inv) => blocks.push(inv),
            None => {
                let (k1, k2) = grid.wavenumbers(i);
                return Err(Error::SingularMode { k1, k2, condition });
            }
        }
    }
    Ok(blocks)
}

fn pseudo_blocks(phys: &PhysicalParams, drive: &DriveParams, grid: &TorusGrid) -> Result<Vec<Matrix3<Complex64>>> {
    if !matches!(classify(phys, drive), RegionClass::InteriorE | RegionClass::BorderE) {
        return Err(Error::Domain(format!(
            "pseudo-solve needs (gamma, kappa) in E, got ({}, {})",
            drive.gamma, drive.kappa
        )));
    }
    let (l1, l2) = period_lengths(phys, drive)?;
    if ((grid.l1 - l1) / l1).abs() > PERIOD_RTOL || ((grid.l2 - l2) / l2).abs() > PERIOD_RTOL {
        return Err(Error::Domain(format!(
            "grid periods ({}, {}) differ from the kernel periods ({l1}, {l2})",
            grid.l1, grid.l2
        )));
    }
    let kernel: Vec<usize> = kernel_frequencies(phys, drive)?
        .iter()
        .filter_map(|xi| grid.index_of((xi[0] * grid.l1).round() as i64, (xi[1] * grid.l2).round() as i64))
        .collect();

    let (g, k, mu) = (drive.gamma, drive.kappa, phys.mu);
    let mut blocks = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        if i == 0 {
            blocks.push(zero_mode_block());
            continue;
        }
        if grid.is_nyquist(i) {
            blocks.push(Matrix3::zeros());
            continue;
        }
        let xi = grid.xi(i);
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        let s = 4.0 * PI * PI * r2;
        let d = [Complex64::new(0.0, 2.0 * PI * xi[0]), Complex64::new(0.0, 2.0 * PI * xi[1])];

        // η row
        let eta_row = if kernel.contains(&i) {
            [ZERO; 3]
        } else {
            let q = q_symbol(phys, drive, xi);
            if q.norm() <= 1e-12 * q_scale(phys, drive, xi) {
                let (k1, k2) = grid.wavenumbers(i);
                return Err(Error::SingularMode { k1, k2, condition: f64::INFINITY });
            }
            range_covector(mu, g, xi).map(|l| l / q)
        };

        // u = H⁻¹ℙ(κη e1 + f) + γ(I − ℙ)(η e1) − d g / s
        let hinv = helmholtz_symbol(g, mu, xi).inv();
        let proj = |a: usize, b: usize| {
            let delta = if a == b { 1.0 } else { 0.0 };
            delta - xi[a] * xi[b] / r2
        };
        let mut m = Matrix3::zeros();
        for a in 0..2 {
            // coefficient multiplying η̂ in row a
            let eta_coef = hinv * (k * proj(a, 0)) + g * (if a == 0 { 1.0 } else { 0.0 } - proj(a, 0));
            for b in 0..3 {
                let mut v = eta_coef * eta_row[b];
                if b < 2 {
                    v += hinv * proj(a, b);
                } else {
                    v -= d[a] / s;
                }
                m[(a, b)] = v;
            }
        }
        for b in 0..3 {
            m[(2, b)] = eta_row[b];
        }
        blocks.push(m);
    }
    Ok(blocks)
}

//! Linearization of the traveling-wave system about the trivial solution.
//!
//! With `d = 2πiξ`, `s = 4π²|ξ|²` the operator `P(γ, κ)` acts on each lattice
//! mode `(û1, û2, η̂)` as a 3×3 complex matrix. The scalar reduction `Q`, the
//! range operator `S_γ` and the kernel lift `R_{γ,κ}` are plain Fourier
//! multipliers.

mod kernel;
mod solve;
mod state;

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

pub use kernel::{kernel_basis, KernelBasis, Transversality};
pub use solve::{solve_p, LinearSolver, SolveMode, SINGULAR_CONDITION};
pub use state::{Residual, State};

use crate::error::{Error, Result};
use crate::params::{DriveParams, PhysicalParams};
use crate::spectral::{helmholtz_symbol, Parity, ScalarField, SymbolParity, TorusGrid, VectorField};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative singular-value threshold for counting rank-deficient mode matrices.
pub const RANK_RTOL: f64 = 1e-8;

/// `q_{γ,κ}(ξ) = 2πiξ1(γ − κ + 16π²μγ|ξ|²) − 4π²(|ξ|² − γ²ξ1² + 4π²σ|ξ|⁴)`.
pub fn q_symbol(phys: &PhysicalParams, drive: &DriveParams, xi: [f64; 2]) -> Complex64 {
    let (g, k) = (drive.gamma, drive.kappa);
    let r2 = xi[0] * xi[0] + xi[1] * xi[1];
    let im = 2.0 * PI * xi[0] * (g - k + 16.0 * PI * PI * phys.mu * g * r2);
    let re = -4.0 * PI * PI * (r2 - g * g * xi[0] * xi[0] + 4.0 * PI * PI * phys.sigma * r2 * r2);
    Complex64::new(re, im)
}

/// A size for `q` at `ξ`, the sum of the magnitudes of its terms.
pub(crate) fn q_scale(phys: &PhysicalParams, drive: &DriveParams, xi: [f64; 2]) -> f64 {
    let (g, k) = (drive.gamma, drive.kappa);
    let r2 = xi[0] * xi[0] + xi[1] * xi[1];
    2.0 * PI * xi[0].abs() * ((g - k).abs() + 16.0 * PI * PI * phys.mu * g.abs() * r2)
        + 4.0 * PI * PI * (r2 + g * g * xi[0] * xi[0] + 4.0 * PI * PI * phys.sigma * r2 * r2)
}

/// Per-mode block of `P(γ, κ)`; rows are the two momentum equations and continuity.
///
/// At `ξ = 0` the block is `[[1, 0, −κ], [0, 1, 0], [0, 0, 0]]`; the η slot is
/// never populated there because `η` has zero mean.
pub fn mode_matrix(phys: &PhysicalParams, drive: &DriveParams, xi: [f64; 2]) -> Matrix3<Complex64> {
    let (g, k, mu, sigma) = (drive.gamma, drive.kappa, phys.mu, phys.sigma);
    let d1 = Complex64::new(0.0, 2.0 * PI * xi[0]);
    let d2 = Complex64::new(0.0, 2.0 * PI * xi[1]);
    let s = 4.0 * PI * PI * (xi[0] * xi[0] + xi[1] * xi[1]);
    let a = helmholtz_symbol(g, mu, xi);
    let grad = 1.0 + sigma * s;
    Matrix3::new(
        a - d1 * d1 * (3.0 * mu),
        -d1 * d2 * (3.0 * mu),
        d1 * grad - k,
        -d2 * d1 * (3.0 * mu),
        a - d2 * d2 * (3.0 * mu),
        d2 * grad,
        d1,
        d2,
        -d1 * g,
    )
}

/// Singular values of a mode block, largest first.
pub fn mode_singular_values(m: &Matrix3<Complex64>) -> [f64; 3] {
    let sv = m.svd(false, false).singular_values;
    let mut v = [sv[0], sv[1], sv[2]];
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Applies per-mode 3×3 blocks to a triple of fields.
pub(crate) fn apply_blocks(grid: &TorusGrid, blocks: &[Matrix3<Complex64>], input: [&ScalarField; 3]) -> [ScalarField; 3] {
    let n = grid.len();
    let mut out = [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]];
    let (a, b, c) = (input[0].coeffs(), input[1].coeffs(), input[2].coeffs());
    for i in 0..n {
        if grid.is_nyquist(i) {
            continue;
        }
        let v = blocks[i] * Vector3::new(a[i], b[i], c[i]);
        out[0][i] = v[0];
        out[1][i] = v[1];
        out[2][i] = v[2];
    }
    out.map(|c| ScalarField::from_coeffs(*grid, c, Parity::Any).expect("block output has grid length"))
}

fn standard_tags(parts: [ScalarField; 3]) -> [ScalarField; 3] {
    let [a, b, c] = parts;
    [a.with_parity(Parity::Even), b.with_parity(Parity::Odd), c.with_parity(Parity::Even)]
}

/// `P(γ, κ)` assembled once per drive and grid as per-mode blocks.
#[derive(Clone, Debug)]
pub struct LinearOperator {
    pub phys: PhysicalParams,
    pub drive: DriveParams,
    pub grid: TorusGrid,
    blocks: Vec<Matrix3<Complex64>>,
}

impl LinearOperator {
    pub fn new(phys: PhysicalParams, drive: DriveParams, grid: TorusGrid) -> Self {
        let blocks = (0..grid.len()).map(|i| mode_matrix(&phys, &drive, grid.xi(i))).collect();
        Self { phys, drive, grid, blocks }
    }

    pub fn block(&self, idx: usize) -> &Matrix3<Complex64> {
        &self.blocks[idx]
    }

    /// Momentum rows `−γ∂1u + u − μ∇·𝕊u + ∇(1 − σΔ)η − κηe1`, continuity row `−γ∂1η + ∇·u`.
    pub fn apply(&self, state: &State) -> Residual {
        debug_assert!(self.grid.same_shape(state.grid()));
        let out = apply_blocks(&self.grid, &self.blocks, state.fields());
        if state.has_standard_parity() {
            Residual::from_parts(standard_tags(out))
        } else {
            Residual::from_parts(out)
        }
    }

    /// Lattice modes (excluding `ξ = 0` and Nyquist) whose block has
    /// `σ_min < rtol · σ_max`.
    pub fn rank_deficient_modes(&self, rtol: f64) -> Vec<(i64, i64)> {
        (0..self.grid.len())
            .filter(|&i| i != 0 && !self.grid.is_nyquist(i))
            .filter(|&i| {
                let sv = mode_singular_values(&self.blocks[i]);
                sv[2] < rtol * sv[0]
            })
            .map(|i| self.grid.wavenumbers(i))
            .collect()
    }

    /// Largest block condition number over the band, excluding `ξ = 0`.
    pub fn max_condition(&self) -> f64 {
        (1..self.grid.len())
            .filter(|&i| !self.grid.is_nyquist(i))
            .map(|i| {
                let sv = mode_singular_values(&self.blocks[i]);
                sv[0] / sv[2]
            })
            .fold(0.0, f64::max)
    }
}

pub fn apply_p(phys: &PhysicalParams, drive: &DriveParams, state: &State) -> Residual {
    LinearOperator::new(*phys, *drive, *state.grid()).apply(state)
}

fn require_zero_mean(f: &ScalarField, what: &str) -> Result<()> {
    if f.mean_coeff() != ZERO {
        return Err(Error::Domain(format!("{what} must have zero mean")));
    }
    Ok(())
}

/// `Q(γ, κ) = Δ⁻²[((γ − κ) − 4μγΔ)∂1 + Δ − γ²∂1² − σΔ²]`, the multiplier `q/(4π²|ξ|²)²`.
pub fn apply_q(phys: &PhysicalParams, drive: &DriveParams, eta: &ScalarField) -> Result<ScalarField> {
    require_zero_mean(eta, "Q input")?;
    Ok(eta.apply_multiplier(
        |xi| {
            let s = 4.0 * PI * PI * (xi[0] * xi[0] + xi[1] * xi[1]);
            if s == 0.0 {
                ZERO
            } else {
                q_symbol(phys, drive, xi) / (s * s)
            }
        },
        SymbolParity::Even,
    ))
}

/// Row vector `ℓ(ξ)` with `ℓ · P̂(ξ) = (0, 0, q(ξ))`; `S_γ` is `ℓ · r̂ / s²`.
pub(crate) fn range_covector(mu: f64, gamma: f64, xi: [f64; 2]) -> [Complex64; 3] {
    let d1 = Complex64::new(0.0, 2.0 * PI * xi[0]);
    let d2 = Complex64::new(0.0, 2.0 * PI * xi[1]);
    let s = 4.0 * PI * PI * (xi[0] * xi[0] + xi[1] * xi[1]);
    [d1, d2, -(Complex64::new(1.0 + 4.0 * mu * s, 0.0) - d1 * gamma)]
}

/// `S_γ` without the mean check; the zero mode maps to zero.
pub(crate) fn s_gamma_unchecked(mu: f64, gamma: f64, r: &Residual) -> ScalarField {
    let grid = *r.grid();
    let (f1, f2, g) = (r.f.c1.coeffs(), r.f.c2.coeffs(), r.g.coeffs());
    let coeffs = (0..grid.len())
        .map(|i| {
            if i == 0 || grid.is_nyquist(i) {
                return ZERO;
            }
            let xi = grid.xi(i);
            let s = 4.0 * PI * PI * (xi[0] * xi[0] + xi[1] * xi[1]);
            let l = range_covector(mu, gamma, xi);
            (l[0] * f1[i] + l[1] * f2[i] + l[2] * g[i]) / (s * s)
        })
        .collect();
    let parity = if r.has_standard_parity() { Parity::Even } else { Parity::Any };
    ScalarField::from_coeffs(grid, coeffs, parity).expect("grid length")
}

/// `S_γ(f, g) = Δ⁻²[∇·f − (1 − γ∂1 − 4μΔ)g]`.
pub fn apply_s(phys: &PhysicalParams, gamma: f64, r: &Residual) -> Result<ScalarField> {
    require_zero_mean(&r.g, "continuity row")?;
    Ok(s_gamma_unchecked(phys.mu, gamma, r))
}

/// Symbols of the kernel lift at `ξ ≠ 0`: `(û1, û2) = (m1, m2) η̂`.
fn lift_symbols(phys: &PhysicalParams, drive: &DriveParams, xi: [f64; 2]) -> [Complex64; 2] {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1];
    if r2 == 0.0 {
        return [ZERO, ZERO];
    }
    let hinv = helmholtz_symbol(drive.gamma, phys.mu, xi).inv();
    let (g, k) = (drive.gamma, drive.kappa);
    let m1 = hinv * (k * xi[1] * xi[1] / r2) + g * xi[0] * xi[0] / r2;
    let m2 = (Complex64::new(g, 0.0) - hinv * k) * (xi[0] * xi[1] / r2);
    [m1, m2]
}

/// `R_{γ,κ}η = (κ(1 − γ∂1 − μΔ)⁻¹(I + ℛ⊗ℛ)(ηe1) − γℛ⊗ℛ(ηe1), η)`.
pub fn lift_r(phys: &PhysicalParams, drive: &DriveParams, eta: &ScalarField) -> Result<State> {
    require_zero_mean(eta, "lift input")?;
    let u1 = eta.apply_multiplier(|xi| lift_symbols(phys, drive, xi)[0], SymbolParity::Even);
    let u2 = eta.apply_multiplier(|xi| lift_symbols(phys, drive, xi)[1], SymbolParity::Odd);
    Ok(State { u: VectorField { c1: u1, c2: u2 }, eta: eta.band_limit() })
}

/// Leading-order velocity written with Riesz transforms and the resolvent:
/// `υ1 = −κH⁻¹ℛ2²η − γℛ1²η`, `υ2 = κH⁻¹ℛ1ℛ2η − γℛ1ℛ2η` with `H = 1 − γ∂1 − μΔ`.
///
/// This is an independent route to the velocity part of [`lift_r`].
pub fn shape_velocity(phys: &PhysicalParams, drive: &DriveParams, eta: &ScalarField) -> Result<VectorField> {
    require_zero_mean(eta, "shape input")?;
    let (g, k) = (drive.gamma, drive.kappa);
    let r1 = eta.riesz(1);
    let r2 = eta.riesz(2);
    let r11 = r1.riesz(1);
    let r22 = r2.riesz(2);
    let r12 = r2.riesz(1);
    let c1 = r22.helmholtz_inverse(g, phys.mu).scale(-k).sub(&r11.scale(g));
    let c2 = r12.helmholtz_inverse(g, phys.mu).scale(k).sub(&r12.scale(g));
    Ok(VectorField { c1, c2 })
}

/// `P_s(u, η) = −(∂1u, ∂1η)`, the γ-derivative of `P`.
pub fn apply_ps(state: &State) -> Residual {
    Residual {
        f: state.u.map(|c| c.d1().scale(-1.0)),
        g: state.eta.d1().scale(-1.0),
    }
}

/// `P_t(u, η) = −(ηe1, 0)`, the κ-derivative of `P`.
pub fn apply_pt(state: &State) -> Residual {
    let grid = *state.grid();
    Residual {
        f: VectorField {
            c1: state.eta.band_limit().scale(-1.0),
            c2: ScalarField::zeros(grid).with_parity(state.eta.parity().flipped()),
        },
        g: ScalarField::zeros(grid).with_parity(state.eta.parity()),
    }
}

//! Kernel of `P` on the lattice fixed by the period-length map.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use super::{apply_ps, apply_pt, lift_r, s_gamma_unchecked, State};
use crate::error::{Error, Result};
use crate::params::{classify, kernel_frequencies, period_lengths, rho, chi, DriveParams, PhysicalParams, RegionClass};
use crate::spectral::{Parity, ScalarField, TorusGrid};

/// Relative mismatch allowed between grid periods and the period-length map.
pub const PERIOD_RTOL: f64 = 1e-10;

/// Orthonormal kernel functions `φ±`, their lifts `V± = R_{γ,κ}φ±`, and the kernel modes.
#[derive(Clone, Debug)]
pub struct KernelBasis {
    pub phys: PhysicalParams,
    pub drive: DriveParams,
    pub class: RegionClass,
    pub frequencies: Vec<[f64; 2]>,
    /// Integer wavenumbers of the kernel frequencies.
    pub modes: Vec<(i64, i64)>,
    pub phi_plus: ScalarField,
    pub phi_minus: ScalarField,
    pub v_plus: State,
    pub v_minus: State,
}

/// Builds the kernel basis at a drive in E on the torus `𝔩(γ, κ)`.
pub fn kernel_basis(phys: &PhysicalParams, drive: &DriveParams, grid: TorusGrid) -> Result<KernelBasis> {
    let class = classify(phys, drive);
    if !matches!(class, RegionClass::InteriorE | RegionClass::BorderE) {
        return Err(Error::Domain(format!(
            "kernel basis needs (gamma, kappa) in E, got ({}, {}) classified {class:?}",
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
    let frequencies = kernel_frequencies(phys, drive)?;
    let modes = frequencies
        .iter()
        .map(|xi| ((xi[0] * grid.l1).round() as i64, (xi[1] * grid.l2).round() as i64))
        .collect();

    let half = Complex64::new(0.5, 0.0);
    let (phi_plus, phi_minus) = if class == RegionClass::BorderE {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ScalarField::from_modes(grid, Parity::Even, |k1, k2| {
            if k1.abs() == 1 && k2 == 0 {
                Complex64::new(r, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let minus = ScalarField::from_modes(grid, Parity::Even, |k1, k2| {
            if k1.abs() == 1 && k2 == 0 {
                Complex64::new(0.0, -r * k1 as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        (plus, minus)
    } else {
        let plus = ScalarField::from_modes(grid, Parity::Even, |k1, k2| {
            if k1.abs() == 1 && k2.abs() == 1 {
                half
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let minus = ScalarField::from_modes(grid, Parity::Even, |k1, k2| {
            if k1.abs() == 1 && k2.abs() == 1 {
                Complex64::new(0.0, -0.5 * k1 as f64)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        (plus, minus)
    };
    let v_plus = lift_r(phys, drive, &phi_plus)?;
    let v_minus = lift_r(phys, drive, &phi_minus)?;
    Ok(KernelBasis { phys: *phys, drive: *drive, class, frequencies, modes, phi_plus, phi_minus, v_plus, v_minus })
}

/// The 2×2 matrix of `Π S_γ P_s V₊` and `Π S_γ P_t V₊` in the basis `{φ₊, ∂1φ₊}`, with
/// the closed form it should reproduce.
#[derive(Clone, Debug, Serialize)]
pub struct Transversality {
    /// `matrix[i][j]`: coordinate `i` of column `j` (`j = 0` for `P_s`, `j = 1` for `P_t`).
    pub matrix: [[f64; 2]; 2],
    pub closed_form: [[f64; 2]; 2],
    pub condition: f64,
    /// Largest entrywise relative deviation; the zero entry is measured against the largest entry.
    pub max_relative_error: f64,
}

impl KernelBasis {
    pub fn grid(&self) -> &TorusGrid {
        self.phi_plus.grid()
    }

    /// `(⟨η, φ₊⟩, ⟨η, φ₋⟩)`.
    pub fn project_kernel(&self, eta: &ScalarField) -> (f64, f64) {
        (eta.dot(&self.phi_plus), eta.dot(&self.phi_minus))
    }

    /// `a₊V₊ + a₋V₋`.
    pub fn combine(&self, a_plus: f64, a_minus: f64) -> State {
        let mut s = self.v_plus.scale(a_plus);
        s.axpy(a_minus, &self.v_minus);
        s
    }

    /// Removes the lifted kernel component and clears `η̂` on the kernel modes.
    pub fn project_z(&self, state: &State) -> State {
        let (ap, am) = self.project_kernel(&state.eta);
        let mut z = state.sub(&self.combine(ap, am));
        let idx = self.mode_indices();
        let coeffs = z.eta.coeffs_mut();
        for i in idx {
            coeffs[i] = Complex64::new(0.0, 0.0);
        }
        z
    }

    /// Storage indices of the kernel modes.
    pub fn mode_indices(&self) -> Vec<usize> {
        self.modes.iter().filter_map(|&(a, b)| self.grid().index_of(a, b)).collect()
    }

    /// Coordinates of a field in span{φ₊, ∂1φ₊}, using `∂1φ₊ = −(2π/L1)φ₋`.
    fn eta_dx_coordinates(&self, w: &ScalarField) -> [f64; 2] {
        let (cp, cm) = self.project_kernel(w);
        [cp, cm / (-2.0 * PI / self.grid().l1)]
    }

    pub fn transversality(&self) -> Result<Transversality> {
        let gamma = self.drive.gamma;
        let ws = s_gamma_unchecked(self.phys.mu, gamma, &apply_ps(&self.v_plus));
        let wt = s_gamma_unchecked(self.phys.mu, gamma, &apply_pt(&self.v_plus));
        let cs = self.eta_dx_coordinates(&ws);
        let ct = self.eta_dx_coordinates(&wt);
        let matrix = [[cs[0], ct[0]], [cs[1], ct[1]]];

        let r = rho(&self.phys, &self.drive)?;
        let c = chi(&self.phys, &self.drive)?;
        let pre = 1.0 / (16.0 * PI.powi(4) * r.powi(4));
        let closed_form = [
            [pre * 8.0 * gamma * PI * PI * r * r * c * c, 0.0],
            [pre * (1.0 + 16.0 * PI * PI * self.phys.mu * r * r), -pre],
        ];
        let scale = closed_form.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let max_relative_error = matrix
            .iter()
            .flatten()
            .zip(closed_form.iter().flatten())
            .map(|(a, b)| (a - b).abs() / if *b == 0.0 { scale } else { b.abs() })
            .fold(0.0, f64::max);
        let m = Matrix2::new(matrix[0][0], matrix[0][1], matrix[1][0], matrix[1][1]);
        let sv = m.singular_values();
        let condition = sv.max() / sv.min();
        Ok(Transversality { matrix, closed_form, condition, max_relative_error })
    }
}

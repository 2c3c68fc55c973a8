use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rectangular torus `T²_L = (L1 T) × (L2 T)` sampled on an `n1 × n2` grid.
///
/// Coefficients are stored in FFT order, row-major with index `i1 * n2 + i2`.
/// Index `i` in a direction of size `n` carries wavenumber `i` for `i < n/2`
/// and `i − n` otherwise; the Nyquist index `n/2` lies outside the operator
/// band and is zeroed by every multiplier and product.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub l1: f64,
    pub l2: f64,
    pub n1: usize,
    pub n2: usize,
}

fn wavenumber(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn mirror(i: usize, n: usize) -> usize {
    (n - i) % n
}

impl TorusGrid {
    pub fn new(l1: f64, l2: f64, n1: usize, n2: usize) -> Result<Self> {
        if !(l1.is_finite() && l1 > 0.0 && l2.is_finite() && l2 > 0.0) {
            return Err(Error::Domain(format!("torus periods must be positive, got ({l1}, {l2})")));
        }
        if n1 < 8 || n2 < 8 || !n1.is_multiple_of(2) || !n2.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "collocation counts must be even and at least 8, got ({n1}, {n2})"
            )));
        }
        Ok(Self { l1, l2, n1, n2 })
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn area(&self) -> f64 {
        self.l1 * self.l2
    }

    /// Same periods, different resolution.
    pub fn with_modes(&self, n1: usize, n2: usize) -> Result<Self> {
        Self::new(self.l1, self.l2, n1, n2)
    }

    pub fn same_shape(&self, other: &TorusGrid) -> bool {
        self == other
    }

    pub fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!("grid mismatch: {self:?} vs {other:?}")))
        }
    }

    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.n2, idx % self.n2)
    }

    /// Integer wavenumbers `(k1, k2)` of a storage index.
    pub fn wavenumbers(&self, idx: usize) -> (i64, i64) {
        let (i1, i2) = self.split(idx);
        (wavenumber(i1, self.n1), wavenumber(i2, self.n2))
    }

    /// Lattice frequency `ξ = (k1/L1, k2/L2)` of a storage index.
    pub fn xi(&self, idx: usize) -> [f64; 2] {
        let (k1, k2) = self.wavenumbers(idx);
        [k1 as f64 / self.l1, k2 as f64 / self.l2]
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        let (i1, i2) = self.split(idx);
        i1 == self.n1 / 2 || i2 == self.n2 / 2
    }

    /// Storage index of `(k1, k2)` if it lies inside the operator band.
    pub fn index_of(&self, k1: i64, k2: i64) -> Option<usize> {
        let h1 = (self.n1 / 2) as i64;
        let h2 = (self.n2 / 2) as i64;
        if k1.abs() >= h1 || k2.abs() >= h2 {
            return None;
        }
        let i1 = k1.rem_euclid(self.n1 as i64) as usize;
        let i2 = k2.rem_euclid(self.n2 as i64) as usize;
        Some(i1 * self.n2 + i2)
    }

    /// Index of `−ξ`.
    pub fn negate(&self, idx: usize) -> usize {
        let (i1, i2) = self.split(idx);
        mirror(i1, self.n1) * self.n2 + mirror(i2, self.n2)
    }

    /// Index of `(ξ1, −ξ2)`.
    pub fn flip_x2(&self, idx: usize) -> usize {
        let (i1, i2) = self.split(idx);
        i1 * self.n2 + mirror(i2, self.n2)
    }

    /// Index of `(−ξ1, ξ2)`.
    pub fn flip_x1(&self, idx: usize) -> usize {
        let (i1, i2) = self.split(idx);
        mirror(i1, self.n1) * self.n2 + i2
    }

    /// Physical coordinates of sample `(i1, i2)`.
    pub fn node(&self, i1: usize, i2: usize) -> [f64; 2] {
        [i1 as f64 * self.l1 / self.n1 as f64, i2 as f64 * self.l2 / self.n2 as f64]
    }
}

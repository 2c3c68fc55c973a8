//! Dealiased pointwise products.
//!
//! Band-limited fields are synthesized on a zero-padded grid, multiplied
//! pointwise there, and truncated back to the band. Quadratic products need
//! a 3/2 padding, triple products a factor of 2.

use super::field::{Parity, ScalarField};
use super::grid::TorusGrid;
use crate::error::Result;

/// A refined sampling grid for evaluating products of fields on `grid`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Padding {
    pub grid: TorusGrid,
    pub m1: usize,
    pub m2: usize,
}

impl Padding {
    /// Padding exact for products of two band-limited fields.
    pub fn quadratic(grid: TorusGrid) -> Self {
        Self { grid, m1: 3 * grid.n1 / 2, m2: 3 * grid.n2 / 2 }
    }

    /// Padding exact for products of three band-limited fields.
    pub fn cubic(grid: TorusGrid) -> Self {
        Self { grid, m1: 2 * grid.n1, m2: 2 * grid.n2 }
    }

    pub fn len(&self) -> usize {
        self.m1 * self.m2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn samples(&self, f: &ScalarField) -> Vec<f64> {
        f.synthesize_padded(self.m1, self.m2)
    }

    pub fn collect(&self, values: &[f64], parity: Parity) -> ScalarField {
        ScalarField::analyze_padded(self.grid, values, self.m1, self.m2, parity)
    }
}

/// `f g`, exact whenever the product's spectrum fits inside the band.
pub fn dealiased_product(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    f.check_grid(g)?;
    let pad = Padding::quadratic(*f.grid());
    let a = pad.samples(f);
    let b = pad.samples(g);
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Ok(pad.collect(&prod, f.parity().times(g.parity())))
}

/// `f g h` on a doubled grid.
pub fn dealiased_triple(f: &ScalarField, g: &ScalarField, h: &ScalarField) -> Result<ScalarField> {
    f.check_grid(g)?;
    f.check_grid(h)?;
    let pad = Padding::cubic(*f.grid());
    let a = pad.samples(f);
    let b = pad.samples(g);
    let c = pad.samples(h);
    let prod: Vec<f64> = a.iter().zip(&b).zip(&c).map(|((x, y), z)| x * y * z).collect();
    Ok(pad.collect(&prod, f.parity().times(g.parity()).times(h.parity())))
}

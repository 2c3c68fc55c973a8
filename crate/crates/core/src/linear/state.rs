use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::spectral::{Parity, ScalarField, TorusGrid, VectorField};

macro_rules! triple_ops {
    ($ty:ident, $vec:ident, $scal:ident) => {
        impl $ty {
            pub fn zeros(grid: TorusGrid) -> Self {
                Self { $vec: VectorField::zeros(grid), $scal: ScalarField::zeros(grid) }
            }

            /// Random low-mode triple; the scalar component has zero mean.
            pub fn random<R: Rng + ?Sized>(grid: TorusGrid, rng: &mut R, kmax: i64, parity: bool) -> Self {
                let tag = |p: Parity| if parity { p } else { Parity::Any };
                let a = ScalarField::random(grid, rng, kmax, tag(Parity::Even), false);
                let b = ScalarField::random(grid, rng, kmax, tag(Parity::Odd), false);
                let c = ScalarField::random(grid, rng, kmax, tag(Parity::Even), true);
                Self { $vec: VectorField { c1: a, c2: b }, $scal: c }
            }

            pub fn grid(&self) -> &TorusGrid {
                self.$scal.grid()
            }

            pub fn fields(&self) -> [&ScalarField; 3] {
                [&self.$vec.c1, &self.$vec.c2, &self.$scal]
            }

            /// True if the components carry the tags (even, odd, even).
            pub fn has_standard_parity(&self) -> bool {
                self.$vec.c1.parity() == Parity::Even
                    && self.$vec.c2.parity() == Parity::Odd
                    && self.$scal.parity() == Parity::Even
            }

            pub fn add(&self, o: &Self) -> Self {
                Self { $vec: self.$vec.add(&o.$vec), $scal: self.$scal.add(&o.$scal) }
            }

            pub fn sub(&self, o: &Self) -> Self {
                Self { $vec: self.$vec.sub(&o.$vec), $scal: self.$scal.sub(&o.$scal) }
            }

            pub fn scale(&self, a: f64) -> Self {
                Self { $vec: self.$vec.scale(a), $scal: self.$scal.scale(a) }
            }

            /// `self += a * x`.
            pub fn axpy(&mut self, a: f64, x: &Self) {
                self.$vec.axpy(a, &x.$vec);
                self.$scal.axpy(a, &x.$scal);
            }

            pub fn dot(&self, o: &Self) -> f64 {
                self.$vec.dot(&o.$vec) + self.$scal.dot(&o.$scal)
            }

            /// Combined `L²` norm of the three components.
            pub fn norm(&self) -> f64 {
                self.dot(self).sqrt()
            }

            /// Projection onto the (even, odd, even) parity class.
            pub fn parity_project(&self) -> Self {
                Self {
                    $vec: VectorField {
                        c1: self.$vec.c1.parity_project(Parity::Even),
                        c2: self.$vec.c2.parity_project(Parity::Odd),
                    },
                    $scal: self.$scal.parity_project(Parity::Even),
                }
            }

            /// `L²` mass of the part violating the (even, odd, even) parity class.
            pub fn parity_defect(&self) -> f64 {
                self.sub(&self.parity_project()).norm()
            }

            pub fn max_hermitian_defect(&self) -> f64 {
                self.fields().iter().map(|f| f.hermitian_defect()).fold(0.0, f64::max)
            }

            /// Real and imaginary parts of all coefficients, component by component.
            /// The Euclidean norm of the result equals [`Self::norm`].
            pub fn pack(&self) -> Vec<f64> {
                let mut out = Vec::with_capacity(6 * self.grid().len());
                for f in self.fields() {
                    for c in f.coeffs() {
                        out.push(c.re);
                        out.push(c.im);
                    }
                }
                out
            }

            pub fn unpack(grid: TorusGrid, data: &[f64]) -> Result<Self> {
                let n = grid.len();
                if data.len() != 6 * n {
                    return Err(Error::Shape(format!("expected {} reals, got {}", 6 * n, data.len())));
                }
                let part = |j: usize, parity: Parity| {
                    let coeffs = data[2 * j * n..2 * (j + 1) * n]
                        .chunks_exact(2)
                        .map(|p| Complex64::new(p[0], p[1]))
                        .collect();
                    ScalarField::from_coeffs(grid, coeffs, parity)
                };
                Ok(Self {
                    $vec: VectorField { c1: part(0, Parity::Any)?, c2: part(1, Parity::Any)? },
                    $scal: part(2, Parity::Any)?,
                })
            }

            /// Re-tags all three components as having no parity.
            pub fn untagged(self) -> Self {
                Self {
                    $vec: VectorField {
                        c1: self.$vec.c1.with_parity(Parity::Any),
                        c2: self.$vec.c2.with_parity(Parity::Any),
                    },
                    $scal: self.$scal.with_parity(Parity::Any),
                }
            }

            pub(crate) fn from_parts(parts: [ScalarField; 3]) -> Self {
                let [a, b, c] = parts;
                Self { $vec: VectorField { c1: a, c2: b }, $scal: c }
            }
        }
    };
}

/// Velocity and free-surface perturbation `(u1, u2, η)`.
///
/// In the parity-restricted setting `u1` and `η` are even in `x2`, `u2` is odd,
/// and `η` has zero mean.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub u: VectorField,
    pub eta: ScalarField,
}

/// Momentum rows `f = (f1, f2)` and continuity row `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub f: VectorField,
    pub g: ScalarField,
}

triple_ops!(State, u, eta);
triple_ops!(Residual, f, g);

impl State {
    pub fn new(u: VectorField, eta: ScalarField) -> Result<Self> {
        u.c1.check_grid(&eta)?;
        u.c2.check_grid(&eta)?;
        Ok(Self { u, eta })
    }

    /// `(w, h)` with `h = η∘R`, `w = R u∘R` and `R(y1, y2) = (−y1, y2)`.
    pub fn reflect_x1(&self) -> Self {
        Self { u: self.u.reflect_x1(), eta: self.eta.reflect_x1() }
    }
}

impl Residual {
    pub fn new(f: VectorField, g: ScalarField) -> Result<Self> {
        f.c1.check_grid(&g)?;
        f.c2.check_grid(&g)?;
        Ok(Self { f, g })
    }
}

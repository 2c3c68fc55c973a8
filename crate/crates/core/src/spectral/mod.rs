//! Truncated Fourier representation of real periodic fields on a rectangular torus.

mod fft;
mod field;
mod grid;
mod io;
mod product;

pub use field::{Parity, ScalarField, SymbolParity, VectorField};
pub(crate) use field::helmholtz_symbol;
pub use grid::TorusGrid;
pub use io::{read_field_csv, write_field_csv, CoefficientRecord, FieldRecord};
pub use product::{dealiased_product, dealiased_triple, Padding};

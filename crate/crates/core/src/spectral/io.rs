//! Field serialization: nodal CSV and sparse coefficient JSON.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{Parity, ScalarField};
use super::grid::TorusGrid;
use crate::error::{Error, Result};

/// Writes nodal samples row-major under the header `x1,x2,value`.
pub fn write_field_csv<W: Write>(field: &ScalarField, out: W) -> Result<()> {
    let g = field.grid();
    let values = field.synthesize();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x1", "x2", "value"]).map_err(csv_error)?;
    for i1 in 0..g.n1 {
        for i2 in 0..g.n2 {
            let [x1, x2] = g.node(i1, i2);
            let v = values[i1 * g.n2 + i2];
            w.write_record(&[x1.to_string(), x2.to_string(), v.to_string()]).map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads samples written by [`write_field_csv`] on a known grid.
pub fn read_field_csv<R: Read>(grid: TorusGrid, input: R) -> Result<ScalarField> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x1", "x2", "value"] {
        return Err(Error::Format(format!("unexpected CSV header {headers:?}")));
    }
    let mut values = Vec::with_capacity(grid.len());
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let v: f64 = rec
            .get(2)
            .ok_or_else(|| Error::Format("missing value column".into()))?
            .parse()
            .map_err(|e| Error::Format(format!("bad value: {e}")))?;
        values.push(v);
    }
    ScalarField::analyze(grid, &values)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// One nonzero Fourier coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub k1: i64,
    pub k2: i64,
    pub xi1: f64,
    pub xi2: f64,
    pub re: f64,
    pub im: f64,
}

/// Sparse spectral representation of a field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub grid: TorusGrid,
    pub parity: Parity,
    pub coefficients: Vec<CoefficientRecord>,
}

impl FieldRecord {
    pub fn from_field(field: &ScalarField) -> Self {
        let g = *field.grid();
        let coefficients = field
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
            .map(|(idx, c)| {
                let (k1, k2) = g.wavenumbers(idx);
                let [xi1, xi2] = g.xi(idx);
                CoefficientRecord { k1, k2, xi1, xi2, re: c.re, im: c.im }
            })
            .collect();
        Self { grid: g, parity: field.parity(), coefficients }
    }

    pub fn to_field(&self) -> Result<ScalarField> {
        let g = TorusGrid::new(self.grid.l1, self.grid.l2, self.grid.n1, self.grid.n2)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); g.len()];
        for c in &self.coefficients {
            let i1 = c.k1.rem_euclid(g.n1 as i64) as usize;
            let i2 = c.k2.rem_euclid(g.n2 as i64) as usize;
            if c.k1.unsigned_abs() as usize > g.n1 / 2 || c.k2.unsigned_abs() as usize > g.n2 / 2 {
                return Err(Error::Format(format!("wavenumber ({}, {}) outside the grid", c.k1, c.k2)));
            }
            coeffs[i1 * g.n2 + i2] = Complex64::new(c.re, c.im);
        }
        ScalarField::from_coeffs(g, coeffs, self.parity)
    }
}

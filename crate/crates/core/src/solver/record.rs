//! JSON record of a branch point plus nodal CSVs of its fields.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::BranchPoint;
use crate::error::Result;
use crate::linear::State;
use crate::params::{DriveParams, PhysicalParams};
use crate::spectral::{read_field_csv, write_field_csv, Parity, TorusGrid, VectorField};

pub const BRANCH_JSON: &str = "branch_point.json";
pub const FIELD_FILES: [&str; 3] = ["u1.csv", "u2.csv", "eta.csv"];

/// Parameters, norms and solver diagnostics; the fields themselves live in the CSVs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub phys: PhysicalParams,
    pub grid: TorusGrid,
    pub amplitude: f64,
    pub theta: f64,
    pub drive_star: DriveParams,
    pub drive: DriveParams,
    pub drift: f64,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub converged: bool,
    pub residual_history: Vec<f64>,
    pub krylov_iters: Vec<usize>,
    pub eta_l2: f64,
    pub eta_max: f64,
    pub u_max: f64,
    pub cross_stream_fraction: f64,
}

impl BranchRecord {
    pub fn from_point(bp: &BranchPoint) -> Self {
        let s = &bp.state;
        Self {
            phys: bp.phys,
            grid: *bp.grid(),
            amplitude: bp.amplitude,
            theta: bp.theta,
            drive_star: bp.drive_star,
            drive: bp.drive,
            drift: bp.drift(),
            residual_norm: bp.residual_norm,
            newton_iters: bp.newton_iters,
            converged: bp.converged,
            residual_history: bp.residual_history.clone(),
            krylov_iters: bp.krylov_iters.clone(),
            eta_l2: s.eta.norm_l2(),
            eta_max: s.eta.max_abs(),
            u_max: s.u.c1.max_abs().max(s.u.c2.max_abs()),
            cross_stream_fraction: s.eta.cross_stream_energy_fraction(),
        }
    }
}

/// Writes `branch_point.json`, `u1.csv`, `u2.csv` and `eta.csv` into `dir`.
pub fn write_branch_point(dir: &Path, bp: &BranchPoint) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join(BRANCH_JSON))?);
    serde_json::to_writer_pretty(&mut w, &BranchRecord::from_point(bp))?;
    w.write_all(b"\n")?;
    w.flush()?;
    let s = &bp.state;
    for (name, field) in FIELD_FILES.iter().zip([&s.u.c1, &s.u.c2, &s.eta]) {
        write_field_csv(field, BufWriter::new(File::create(dir.join(name))?))?;
    }
    Ok(())
}

/// Reads back a directory written by [`write_branch_point`].
pub fn read_branch_point(dir: &Path) -> Result<BranchPoint> {
    let rec: BranchRecord = serde_json::from_reader(BufReader::new(File::open(dir.join(BRANCH_JSON))?))?;
    let read = |name: &str| -> Result<_> { read_field_csv(rec.grid, BufReader::new(File::open(dir.join(name))?)) };
    let c1 = read(FIELD_FILES[0])?.with_parity(Parity::Even);
    let c2 = read(FIELD_FILES[1])?.with_parity(Parity::Odd);
    let eta = read(FIELD_FILES[2])?.with_parity(Parity::Even);
    Ok(BranchPoint {
        phys: rec.phys,
        amplitude: rec.amplitude,
        theta: rec.theta,
        drive_star: rec.drive_star,
        drive: rec.drive,
        state: State { u: VectorField { c1, c2 }, eta },
        residual_norm: rec.residual_norm,
        newton_iters: rec.newton_iters,
        converged: rec.converged,
        residual_history: rec.residual_history,
        krylov_iters: rec.krylov_iters,
    })
}

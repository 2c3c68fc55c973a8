//! Small-amplitude viscous roll waves on periodic domains.
//!
//! The crate evaluates the linearized and full traveling-wave operators of the
//! tilted shallow water system pseudospectrally, constructs bifurcating branches
//! with a bordered Newton-Krylov solver, and checks their predicted
//! structure numerically.

pub mod error;
pub mod krylov;
pub mod linear;
pub mod nonlinear;
pub mod params;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};

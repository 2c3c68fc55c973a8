use thiserror::Error;

/// Errors raised by the roll-wave toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Array or grid shapes do not agree.
    #[error("shape error: {0}")]
    Shape(String),

    /// A per-mode block that should be invertible is numerically singular.
    #[error("singular mode at k = ({k1}, {k2}): condition number {condition:.3e}")]
    SingularMode { k1: i64, k2: i64, condition: f64 },

    /// Newton iteration hit its cap without meeting the residual tolerance.
    #[error("no convergence after {iterations} Newton iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The Krylov solver failed to reach its tolerance.
    #[error("krylov solver stalled after {iterations} iterations (relative residual {relative:.3e})")]
    KrylovStall { iterations: usize, relative: f64 },

    /// A nonexistence probe found something other than the zero state.
    #[error("nonexistence probe failed: {0}")]
    ProbeFailure(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

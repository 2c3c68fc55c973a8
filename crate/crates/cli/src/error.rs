//! Command failures and their process exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("region error: {0}")]
    Region(String),
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    #[error("verification failed: {0} check(s) did not pass")]
    VerifyFailed(usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] rollwaves::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Region(_) => 3,
            CliError::NoConvergence(_) => 4,
            CliError::Core(e) => match e {
                rollwaves::Error::NoConvergence { .. } | rollwaves::Error::KrylovStall { .. } => 4,
                _ => 2,
            },
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

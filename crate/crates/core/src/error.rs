use thiserror::Error;

use crate::dlfp::SaddlePoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unsupported schedule: {0}")]
    UnsupportedSchedule(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no convergence after {iterations} iterations (best gap {:e}, residual {:e})", best.gap, best.residual)]
    NonConvergence {
        iterations: usize,
        best: Box<SaddlePoint>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dims(what: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what,
            expected,
            found,
        }
    }
}

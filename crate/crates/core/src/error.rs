use std::path::PathBuf;

use thiserror::Error;

use crate::solver::SolverReport;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse failure: {0}")]
    Parse(String),

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Every sample point lies inside the exclusion ball of the current
    /// iterate, so the update has no terms left.
    #[error("degenerate MM step: all sample points excluded")]
    DegenerateStep,

    #[error("solver did not converge within {} iterations (last step {:e})", .0.iterations, .0.final_step)]
    MaxIterExceeded(Box<SolverReport>),

    #[error("non-finite field value at stencil point {0:?}")]
    NonFiniteField(Vec<f64>),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Returns true for filesystem failures, as opposed to data or domain errors.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

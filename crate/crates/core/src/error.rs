use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("quadrature did not converge after {evaluations} evaluations (estimated error {abs_error:e})")]
    NonConvergence { evaluations: usize, abs_error: f64 },

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{trial}.{arm}: {source}")]
    Study {
        trial: String,
        arm: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for this error class: 2 for bad data, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } | Error::InternalConsistency(_) => 3,
            Error::Study { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

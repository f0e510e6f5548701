use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degree {k} exceeds the hard cap {cap}")]
    DegreeCap { k: usize, cap: usize },
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("input is not z-radial: residual {0:.3e}")]
    NonRadial(f64),
    #[error("reality symmetry violated: imaginary residual {0:.3e}")]
    Symmetry(f64),
    #[error("step rejected at t = {t}: {reason}")]
    StepRejected { t: f64, reason: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization: {0}")]
    Serde(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid(_)
                | Error::DegreeCap { .. }
                | Error::Precondition(_)
                | Error::NonRadial(_)
                | Error::Serde(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the laboratory.
///
/// `Contract` marks a violated mathematical precondition or postcondition;
/// the CLI maps it to exit code 2. Everything else is an I/O or
/// configuration failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("solver blew up at t = {t}: {reason}")]
    NonFinite { t: f64, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("bad snapshot {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for mathematical contract failures, as opposed to bad input files.
    pub fn is_contract(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Contract(_) | Error::Quadrature(_) | Error::NonFinite { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the lab.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("structural invariant violated: {0}")]
    Structure(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("equation not solvable: residual {residual:.3e} exceeds {bound:.1e}")]
    Solvability { residual: f64, bound: f64 },

    #[error("no gauge transformation reaches the slice: {0}")]
    Gauge(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("cannot parse expression: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_size(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

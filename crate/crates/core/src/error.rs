use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point {point:?} lies outside the domain closure (signed distance {distance:e})")]
    OutsideDomain { point: Vec<f64>, distance: f64 },

    #[error("domain construction failed: {0}")]
    Construction(String),

    #[error("path too short: {steps} steps, need at least {required}")]
    PathTooShort { steps: usize, required: usize },

    #[error("resolution cutoff violated: finest box {finest:e} is below {limit:e}")]
    Resolution { finest: f64, limit: f64 },

    #[error("not enough usable scales for a log-log fit: {usable} < 4")]
    TooFewScales { usable: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("subordinator reaches {needed:.4} but the simulated horizon is {available:.4}")]
    HorizonExceeded { needed: f64, available: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{failed} of {total} paths failed; first error: {first}")]
    TooManyPathFailures {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error at {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

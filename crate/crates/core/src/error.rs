use std::path::PathBuf;

use thiserror::Error;

use crate::optimizer::IterateRecord;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),

    #[error("shape mismatch: expected {expected} qubits, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid instance: {0}")]
    Instance(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("approximation ratio undefined: degenerate spectrum (c_min = c_max = {0})")]
    MetricUndefined(f64),

    #[error("norm drift {drift:e} exceeds tolerance")]
    NormDrift { drift: f64 },

    /// The objective left the spectrum bounds or became non-finite. Carries
    /// the trace recorded up to the failing iteration.
    #[error("divergence at iteration {iter}: objective value {value}")]
    Divergence {
        iter: usize,
        value: f64,
        partial: Box<Vec<IterateRecord>>,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

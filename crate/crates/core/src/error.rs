use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("stream length mismatch: {left} vs {right}")]
    StreamLengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("bad IDX magic 0x{found:08x} (expected 0x{expected:08x})")]
    BadMagic { expected: u32, found: u32 },

    #[error("truncated IDX payload: header claims {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("IDX dimensions overflow the addressable size")]
    DimensionOverflow,

    #[error("dataset validation failed: {0}")]
    Validation(String),

    #[error("missing dataset files in {dir}: {}", missing.join(", "))]
    MissingFiles { dir: PathBuf, missing: Vec<String> },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("seed mismatch between logs: {0}")]
    SeedMismatch(String),

    #[error("noise budget exceeded: components total {used:.3} nV/rtHz against {total:.3}")]
    OverBudget { total: f64, used: f64 },

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

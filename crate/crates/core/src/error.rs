use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid root specification: {0}")]
    InvalidSpec(String),

    #[error("expected {expected} coefficients (one per basis signal), got {got}")]
    CoefficientLength { expected: usize, got: usize },

    #[error("root {root} overflows on the window [{lo}, {hi}] (log-magnitude {log_mag:.1})")]
    Overflow {
        root: String,
        lo: i64,
        hi: i64,
        log_mag: f64,
    },

    #[error("sequence of length {len} is too short, at least {required} samples are needed")]
    WindowTooShort { len: usize, required: usize },

    #[error("support [{lo}, {hi}] is not contained in [{min}, {max}]")]
    SupportViolation { lo: i64, hi: i64, min: i64, max: i64 },

    #[error("ill-conditioned subspace basis (numerical rank {rank} < {dim}) for roots {roots}")]
    IllConditioned {
        rank: usize,
        dim: usize,
        roots: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {path}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("CSV error on {path}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config space: {0}")]
    InvalidSpace(String),

    #[error("parameter `{param}`: {msg}")]
    Domain { param: String, msg: String },

    #[error("configuration has {got} values, space has {expected} parameters")]
    Arity { expected: usize, got: usize },

    #[error("cannot draw {requested} distinct configurations ({found} found)")]
    PoolExhausted { requested: usize, found: usize },

    #[error("empty training set")]
    EmptyTrainingSet,

    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("no unsampled candidates remain")]
    CandidatesExhausted,

    #[error("configuration is not present in the trace")]
    UnknownConfiguration,

    #[error("run {0} is not live")]
    RunClosed(u64),

    #[error("run failed: {0}")]
    RunFailed(String),

    #[error("relative error undefined for a zero optimum")]
    ZeroOptimum,

    #[error("invalid trace: {0}")]
    InvalidTrace(String),

    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn domain(param: &str, msg: impl Into<String>) -> Self {
        Error::Domain {
            param: param.to_string(),
            msg: msg.into(),
        }
    }
}

use std::path::PathBuf;

/// Errors raised by the library layers (geometry, polynomials, resultants,
/// solving and statistics).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{op} is not supported in dimension {n}")]
    UnsupportedDimension { op: &'static str, n: usize },

    #[error("eliminant vanishes identically: the zero set is not isolated")]
    NonIsolated,

    #[error("exact angle discrepancy needs at most {limit} points, cycle has {points}; use grid mode")]
    ExactModeTooLarge { points: usize, limit: usize },

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("bound violation at d={d}, trial {trial}: {detail} (system dumped to {})", dump.display())]
    BoundViolation {
        d: u32,
        trial: u64,
        detail: String,
        dump: PathBuf,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

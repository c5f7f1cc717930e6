use std::path::PathBuf;

/// Crate-wide error type. Numeric kernels fail loudly rather than
/// returning poisoned values; IO and format errors carry enough context
/// to identify the offending artifact.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("eigenvalue iteration exceeded {sweeps} sweeps without deflating")]
    EigenNoConvergence { sweeps: usize },

    #[error("degenerate (zero-variance) input to {0}")]
    DegenerateVariance(&'static str),

    #[error("zero total weight in {0}")]
    ZeroWeight(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format { path: path.into(), msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The induced channel matrix is not of full row rank.
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("insufficient data: no samples for symbol {symbol}")]
    InsufficientData { symbol: usize },

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("training diverged at epoch {epoch}: loss became non-finite")]
    TrainingDiverged { epoch: usize },

    #[error("complexity cap exceeded: {base}^{exponent} = {size} tuples exceeds cap {cap}")]
    ComplexityCap {
        base: usize,
        exponent: usize,
        size: u128,
        cap: u128,
    },

    #[error("numerical underflow at position {position}")]
    NumericalUnderflow { position: usize },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

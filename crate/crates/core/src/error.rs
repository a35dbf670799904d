use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unit error: {0}")]
    Unit(String),
    #[error("eigen-solver did not converge: {0}")]
    NonConvergence(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("cannot bend: {0}")]
    Bend(String),
    #[error("bond mismatch: {0}")]
    Bond(String),
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

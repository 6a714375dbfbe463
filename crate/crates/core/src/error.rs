use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group action: {0}")]
    InvalidAction(String),
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

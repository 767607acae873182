use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpcaError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("argument outside its domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, SpcaError>;

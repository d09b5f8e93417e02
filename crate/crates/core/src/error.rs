use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("corner {0} is a kink")]
    Kink(usize),
    #[error("paths are not of the same type")]
    TypeMismatch,
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("generator outside the complex basis: {0}")]
    OutsideBasis(String),
    #[error("truncation is not closed under the differential: {0}")]
    NotClosed(String),
    #[error("not a chain map at generator {0}")]
    NotChainMap(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

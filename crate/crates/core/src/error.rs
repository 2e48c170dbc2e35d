use thiserror::Error;

/// Errors raised by oracle construction, the simulators and the distinguishers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Inconsistent or out-of-range parameters.
    #[error("configuration error: {0}")]
    Config(String),
    /// The request is well formed but exceeds the desk-scale table or qubit limits.
    #[error("capacity guard: {0}")]
    Capacity(String),
    /// An internal invariant was violated (e.g. a zero-norm collapse).
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn capacity<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Capacity(msg.into()))
}

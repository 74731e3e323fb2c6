use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed rotation system or edge pairing.
    #[error("structural input error: {0}")]
    Structural(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("capacity exceeded: {what} is {got}, limit {limit}; {hint}")]
    Capacity { what: &'static str, got: usize, limit: usize, hint: &'static str },

    #[error("not a square: {0}")]
    NotASquare(String),

    #[error("no Kasteleyn orientation exists: {0}")]
    NoOrientation(String),

    /// A condition that can only fail through a bug in this crate.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("geometric input error: {0}")]
    GeometricInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn invariant(msg: impl Into<String>) -> Error {
    Error::Invariant(msg.into())
}

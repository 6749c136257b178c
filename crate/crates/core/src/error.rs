use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("relation is not functional at point {point}: it carries more than one label")]
    NotFunctional { point: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no free coordinate slot on axis {axis}")]
    Capacity { axis: usize },

    #[error("task generation failed: {0}")]
    Generation(String),

    #[error("malformed task file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

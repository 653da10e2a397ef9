//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input data violate a structural invariant (shape, finiteness, labels).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Hyperparameter values violate their invariants.
    #[error("invalid hyperparameters: {0}")]
    InvalidHyper(String),

    /// Two objects that must agree in shape do not.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A numerical operation failed (non-PD precision, non-finite bound, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Reading or writing a serialized artifact failed.
    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

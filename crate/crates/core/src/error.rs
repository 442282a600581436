use thiserror::Error;

use crate::circuits::CircuitError;

/// Errors raised by capq-core operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("negative eigenvalue {0:e} below clamping threshold")]
    NegativeEigenvalue(f64),

    #[error("parameter out of range: {0}")]
    ParameterRange(String),

    #[error("dimension cap exceeded: {0}")]
    DimensionCap(String),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid density state: {0}")]
    InvalidState(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Circuit(#[from] CircuitError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}

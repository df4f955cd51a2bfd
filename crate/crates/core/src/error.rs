use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid mode: {0}")]
    Mode(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("QSVD did not converge after {sweeps} sweeps (off-bidiagonal residual {residual:e})")]
    Convergence { sweeps: usize, residual: f64 },

    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("image error: {0}")]
    Image(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}

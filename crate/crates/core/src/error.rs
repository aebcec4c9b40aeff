use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{qubits} qubits exceeds the configured cap of {cap}")]
    SizeLimit { qubits: usize, cap: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A bound or estimator formula was evaluated too close to a pole.
    #[error("numeric singularity in `{parameter}` at {value}")]
    Singularity { parameter: &'static str, value: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("protocol aborted: {0}")]
    Aborted(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

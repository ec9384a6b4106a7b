use thiserror::Error;

/// Errors raised by estimators, numerics and I/O.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum RocError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate fit: {0}")]
    Degenerate(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("separation: {0}")]
    Separation(String),
    #[error("no convergence after {iterations} iterations (score norm {gradient_norm:e}): {message}")]
    Convergence {
        message: String,
        iterations: usize,
        gradient_norm: f64,
    },
    #[error("numeric error: {message} (partial estimate {partial})")]
    Numeric { message: String, partial: f64 },
    #[error("bootstrap failed: {failed} of {total} replicates failed")]
    Bootstrap { failed: usize, total: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl RocError {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            RocError::Validation(_) => "validation",
            RocError::Domain(_) => "domain",
            RocError::Degenerate(_) => "degenerate",
            RocError::InsufficientData(_) => "insufficient_data",
            RocError::Separation(_) => "separation",
            RocError::Convergence { .. } => "convergence",
            RocError::Numeric { .. } => "numeric",
            RocError::Bootstrap { .. } => "bootstrap",
            RocError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for RocError {
    fn from(e: std::io::Error) -> Self {
        RocError::Io(e.to_string())
    }
}

impl From<csv::Error> for RocError {
    fn from(e: csv::Error) -> Self {
        RocError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, RocError>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver hit its iteration cap.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// Quadrature could not reach the requested tolerance.
    #[error("accuracy not reached: estimate {estimate:e}, error estimate {error:e}")]
    Accuracy { estimate: f64, error: f64 },

    /// A series term is not representable in double precision.
    #[error("term {index} overflows double precision (log-magnitude {log_magnitude:.1})")]
    Range { index: usize, log_magnitude: f64 },

    /// Not enough valid entries to form an estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Validation failures (bad shapes, unsupported parameter combinations) are kept
/// apart from numerical-guard failures so the CLI can map them to distinct exit
/// codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("dimension guard exceeded: {what} (limit {limit})")]
    DimensionGuard { what: String, limit: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("numerical guard: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for failures caused by numerical guards rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::DimensionGuard { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by state validation, domain checks and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),

    #[error("expected {expected} quantum numbers for dimension {dimension}, got {got}")]
    QuantumNumberCount {
        dimension: usize,
        expected: usize,
        got: usize,
    },

    #[error("quantum-number chain violated at index {index}: {values:?}")]
    ChainViolation { index: usize, values: Vec<i64> },

    #[error("{0}")]
    Domain(String),

    #[error("angle {index} out of range: {value}")]
    AngleOutOfRange { index: usize, value: f64 },

    #[error("unsupported moment order: {0}")]
    UnsupportedOrder(String),

    #[error("cannot parse state literal {literal:?}: {reason}")]
    ParseState { literal: String, reason: String },

    #[error("eigenvalue iteration failed to converge for {0}-point rule")]
    EigenConvergence(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A grid side was smaller than 2, or the grid had no coordinates.
    #[error("invalid grid shape: {0}")]
    InvalidShape(String),

    /// A point, restriction or coordinate index did not fit the grid.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// An argument violated an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Dense enumeration would exceed the configured size cap.
    #[error("capacity exceeded: {what} needs {needed} cells, cap is {cap}")]
    Capacity {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    /// The subcube selected by a restriction carries no probability mass.
    #[error("restriction selects a zero-mass subcube")]
    ZeroMassSubcube,

    /// Probability table failed validation.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Tester configuration cannot be executed as requested.
    #[error("configuration error: {0}")]
    Config(String),

    /// Recursive tester exceeded its depth budget.
    #[error("recursion depth {depth} exceeds configured maximum {max}")]
    DepthExceeded { depth: usize, max: usize },

    /// File or serialization failure in the harness.
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

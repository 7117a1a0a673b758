use thiserror::Error;

/// Errors raised by the simulator.
///
/// The variants map onto the exit-code classes used by the `bscsim` binary:
/// configuration problems, I/O failures, and everything else.
#[derive(Debug, Error)]
pub enum SimError {
    /// An argument lies outside the domain of a mathematical operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inconsistent or infeasible configuration (array sizes, counts, ranks).
    #[error("configuration error: {0}")]
    Config(String),
    /// API misuse such as empty inputs or mismatched slot counts.
    #[error("usage error: {0}")]
    Usage(String),
    /// The backscatter energy is zero, so the test cannot discriminate.
    #[error("degenerate test: backscatter energy is zero")]
    DegenerateTest,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

pub(crate) fn domain(msg: impl Into<String>) -> SimError {
    SimError::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> SimError {
    SimError::Config(msg.into())
}

use thiserror::Error;

/// Errors produced by the simulation and bound evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input had the wrong length or dimension.
    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    /// A structural parameter was invalid (β·n not an integer, odd n, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A numeric argument fell outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// The channel never produces a conclusive round, so the QBER is undefined.
    #[error("degenerate channel: abort probability is 1")]
    DegenerateChannel,

    /// A bit stream did not contain a valid integer encoding.
    #[error("malformed encoding: {0}")]
    Malformed(String),

    /// The request is too large for exhaustive evaluation.
    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn parameter(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

use thiserror::Error;

/// Errors surfaced by the oracles, the EME algebra and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// Exact EME evaluation would enumerate more than `2^cap` realizations.
    #[error("fractional support {frac} exceeds the evaluation cap {cap}; raise --frac-cap or use a larger epsilon")]
    Budget { frac: usize, cap: usize },

    /// A documented precondition of an algorithm does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    /// `(1 - y_S)` is zero, so the partial derivative is not defined by the endpoint identity.
    #[error("partial derivative undefined: coordinate is already at probability 1")]
    UndefinedDerivative,

    /// Malformed instance, configuration or argument.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Exhaustive oracle asked to scan a ground set that is too large.
    #[error("ground set of size {n} exceeds the exhaustive limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("instance digest mismatch: report has {report}, instance hashes to {instance}")]
    DigestMismatch { report: String, instance: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

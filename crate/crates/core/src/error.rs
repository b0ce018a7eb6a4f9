//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure categories for the numeric and scheme operations.
///
/// The CLI maps these onto its exit-code contract: invalid input exits
/// with 1, numerical failures with 2 and constraint violations (including
/// singular inputs) with 3.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed input: bad dimensions, non-finite entries, non-Hermitian
    /// matrix where a Hermitian one is required, out-of-range indices.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A documented precondition on the values was violated (determinant
    /// mismatch, too few channel uses, power budget exceeded).
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// The input is singular or numerically rank deficient.
    #[error("singular input: {0}")]
    Singular(String),

    /// An iterative procedure failed to converge or a staged schedule
    /// could not be completed.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation (zero vector, zero scalar, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Matrix or vector dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A matrix that must be invertible is singular.
    #[error("singular matrix: {0}")]
    Singular(String),
    /// A convex body description is not a valid symmetric body.
    #[error("invalid body: {0}")]
    InvalidBody(String),
    /// A bundle description violates its invariants.
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    /// The operation needs a hermitian archimedean metric.
    #[error("unsupported metric: {0}; use the John/Lowner bracket instead")]
    UnsupportedMetric(String),
    /// An iterative solver stopped before reaching its tolerance.
    #[error("solver did not converge: {message} (best gap {gap:e})")]
    Solver { message: String, gap: f64 },
    /// A size guard was exceeded.
    #[error("size guard exceeded: {0}")]
    Guard(String),
    /// A lattice search could not certify its result.
    #[error("uncertified result: {0}")]
    Uncertified(String),
    /// A structural statement that must hold failed (uniqueness, nesting, ...).
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by curvature, quadrature and tube-volume routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A tensor, vector or integrand sample contained NaN or infinity.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A direction that must be a unit vector is not.
    #[error("vector is not unit length (norm {norm})")]
    NotUnit { norm: f64 },

    /// Two vectors that must be orthogonal are not.
    #[error("vectors are not orthogonal (inner product {inner})")]
    NotOrthogonal { inner: f64 },

    /// A curvature tensor failed its symmetry checks on ingest.
    #[error("curvature tensor violates {class} symmetry (residual {residual})")]
    Symmetry { class: &'static str, residual: f64 },

    /// A spectral argument sqrt(lambda) * rho reached the radius of convergence
    /// or a conjugate point.
    #[error("spectral guard violated: sqrt(lambda)*rho = {argument} exceeds {limit}")]
    Guard { argument: f64, limit: f64 },

    /// A truncated series could not reach the requested tail bound.
    #[error("series did not converge: tail bound {tail_bound} at order {order}")]
    Convergence { order: usize, tail_bound: f64 },

    /// Input outside the supported parameter range.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// A curvature condition (e.g. Einstein) required by an operation does not hold.
    #[error("condition failed: {0}")]
    Condition(String),

    /// An algebraic axiom (Jacobi identity, Heisenberg relations) is violated.
    #[error("axiom violated: {what} (residual {residual})")]
    Axiom { what: String, residual: f64 },

    /// Malformed serialized input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

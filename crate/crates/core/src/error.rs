use thiserror::Error;

use crate::scalar::Arithmetic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unsupported dimension {n}: {reason}")]
    UnsupportedDimension { n: usize, reason: &'static str },

    #[error("arithmetic mode mismatch: expected {expected}, got {actual}")]
    ModeMismatch {
        expected: Arithmetic,
        actual: Arithmetic,
    },

    #[error("plane is not orthonormal (residual {residual:e})")]
    NonOrthonormalPlane { residual: f64 },

    #[error(
        "pinching constant {eps} is at or above 1/(n(n-1)) = 1/{bound} for n = {n}; \
         the modified scalar curvature R̄ = (1 - n(n-1)ε)R degenerates"
    )]
    DegeneratePinching { eps: String, n: usize, bound: usize },

    #[error("convex weight s = {0} is outside [0, 1]")]
    WeightOutOfRange(String),

    #[error("eigenvalue vector is not traceless (sum = {0})")]
    NotTraceless(String),

    #[error("source does not satisfy Sec >= eps*R: min sectional {min_sec} < {bound}")]
    Uncertified { min_sec: f64, bound: f64 },

    #[error("{what} did not converge after {iterations} iterations (best value {best})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        best: f64,
    },

    #[error("tensor violates {invariant} (residual {residual})")]
    InvariantViolation {
        invariant: &'static str,
        residual: String,
    },

    #[error("invalid value {input:?}: {reason}")]
    ParseNumber { input: String, reason: &'static str },

    #[error("invalid tensor document: {0}")]
    TensorFormat(String),

    #[error("unknown model {0:?}")]
    UnknownModel(String),

    #[error("model {0} has no closed-form potential")]
    NoClosedFormPotential(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

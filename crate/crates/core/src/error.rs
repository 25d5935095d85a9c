//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QresError {
    /// Input failed a structural validation (Hermiticity, trace, positivity, ...).
    #[error("validation failed: {0}")]
    Validation(String),

    /// Operands have incompatible dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A Kraus set does not resolve the identity.
    #[error("Kraus completeness violated: ‖ΣK†K − 1‖_∞ = {residual:.3e}")]
    KrausCompleteness { residual: f64 },

    /// A unitary list is not closed under multiplication.
    #[error("not a finite group: product of elements {0} and {1} is missing")]
    NotAGroup(usize, usize),

    /// Operation requires a linear resource-destroying map.
    #[error("unsupported for non-linear resource-destroying maps: {0}")]
    NonLinearMap(String),

    /// Negative GKLS rate: outside the CP-divisible regime handled here.
    #[error("negative rate {rate} for jump operator {index} (non-CP-divisible input)")]
    NegativeRate { index: usize, rate: f64 },

    /// Closed-form expression requested outside its parameter regime.
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// Unsupported option (divergence choice, sampler kind, ...).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, QresError>;

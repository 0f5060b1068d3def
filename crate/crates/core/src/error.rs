//! Error taxonomy shared by all modules.

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A value violated a precondition (negative density, bad exponent, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    QuadratureAccuracy(String),

    /// A structural hypothesis on the viscous-stress tensor failed.
    #[error("hypothesis {name} violated: {detail}")]
    Hypothesis { name: String, detail: String },

    /// Density dropped below the configured floor during a run.
    #[error("positivity failure at t = {t}: min rho = {rho_min}")]
    Positivity { t: f64, rho_min: f64 },

    /// A NaN/Inf appeared in a state field (blow-up indicator).
    #[error("non-finite value at t = {t} in field {field}")]
    NonFinite { t: f64, field: String },

    /// Initial-data regularization could not complete.
    #[error("initial-data regularization failed: {0}")]
    Regularization(String),

    /// Grid/shape mismatch between operands.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Not enough diagnostic samples for a time-integrated quantity.
    #[error("diagnostic cadence error: {0}")]
    Cadence(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised while building or integrating a cascade.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CascadeError {
    /// A parameter violates its documented invariant. `field` names the
    /// offending field (e.g. `kappa[1]`).
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("time step {dt} exceeds the stability bound {max} (0.01 of the fastest rate)")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("non-finite amplitude encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("time grid is not uniform (step {index} differs from dt = {dt})")]
    NonUniformGrid { index: usize, dt: f64 },

    #[error("time grids differ: {0}")]
    GridMismatch(String),

    #[error("empty grid: {0}")]
    EmptyGrid(&'static str),

    #[error("parameters outside the closed-form scope: {0}")]
    Unsupported(String),
}

impl CascadeError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CascadeError::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CascadeError>;

use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The unscaled exponential weights would leave the representable range.
    #[error(
        "overflow risk: exponent bound {bound:.3} exceeds {limit}; use the scaled weight path"
    )]
    OverflowRisk { bound: f64, limit: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// An assembled quantity violated an invariant that the construction guarantees.
    #[error("internal consistency: {0}")]
    InternalConsistency(String),

    #[error("ill-conditioned fit: condition estimate {condition:.3e} exceeds {limit:.1e}")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("degenerate density {value:e} at x = {x}")]
    DegenerateDensity { x: f64, value: f64 },

    /// An orbit step would move more than the allowed fraction of a period.
    #[error("step {step} too large: |v|*dt = {displacement:.4} > {limit}")]
    StepTooLarge {
        step: usize,
        displacement: f64,
        limit: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

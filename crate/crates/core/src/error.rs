use alloc::string::String;
use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "detailed balance violated: max |pi(x)P(x,y) - pi(y)P(y,x)| = {violation:e} \
         exceeds tolerance {tolerance:e}"
    )]
    NotReversible { violation: f64, tolerance: f64 },

    #[error("stationary distribution is not unique (eigenvalue 1 of P is not simple)")]
    NonUniqueStationary,

    #[error("kernel is not variance bounding: right spectral gap {rho_right:e} is below 1e-10")]
    NotVarianceBounding { rho_right: f64 },

    #[error("state space too large for exact enumeration: n = {n} exceeds the limit {max}")]
    TooLarge { n: usize, max: usize },

    #[error("linear system is singular or numerically rank deficient")]
    SingularSystem,

    #[error("numerical consistency check failed: {0}")]
    Inconsistency(String),
}

pub type Result<T> = core::result::Result<T, Error>;

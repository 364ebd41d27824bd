use thiserror::Error;

/// Errors raised by model construction, numerics and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model parameter violates its constraint; the message names the condition.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("net profit condition violated: premium rate {premium} must exceed mean claim rate {claim_mean}")]
    NetProfit { premium: f64, claim_mean: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A series or evaluation was requested outside the range where it is accurate.
    #[error("outside numerical domain: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("insufficient samples for {check}: need {required}, got {got}")]
    InsufficientSamples {
        check: String,
        required: usize,
        got: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidModel(msg()))
    }
}

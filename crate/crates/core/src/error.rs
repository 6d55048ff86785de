use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the estimation, transform, prediction and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("number of runs must be at least 1")]
    ZeroRuns,

    #[error("click count {clicks} exceeds number of runs {runs}")]
    ClicksExceedRuns { clicks: u64, runs: u64 },

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("transform `{transform}` is not differentiable at p = {p}")]
    NonDifferentiable { transform: String, p: f64 },

    #[error("integral diverges or fails to converge on [0, {upper}]")]
    DivergentIntegral { upper: f64 },

    #[error("predicted probability {raw} lies outside [0, 1]")]
    OutOfModel { raw: f64 },

    #[error("inconsistent data: cos(phi) would be {argument}, outside [-1, 1]")]
    InconsistentData { argument: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("sweep needs at least one config")]
    EmptySweep,
}

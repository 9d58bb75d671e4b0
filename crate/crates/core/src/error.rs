use thiserror::Error;

/// Errors raised by state validation, map evaluation and the integrators.
///
/// Numeric payloads are reported in `f64` regardless of the working scalar.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("time must be non-negative and finite, got {0}")]
    InvalidTime(f64),

    #[error("decay profile crosses zero at tau = {tau}; time-local rates are singular there")]
    SingularRate { tau: f64 },

    #[error("state pair is identical; the flow rate is undefined")]
    DegeneratePair,

    #[error("map at tau = {tau} is not invertible: {component} vanishes")]
    NonInvertible { component: &'static str, tau: f64 },

    #[error("step size underflow at t = {t} (last step {step})")]
    StepUnderflow { t: f64, step: f64 },

    #[error("tolerance {0} outside the accepted range [1e-12, 1e-4]")]
    InvalidTolerance(f64),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced anywhere in the encode / compute / decode pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base mismatch: {left} vs {right}")]
    BaseMismatch { left: u32, right: u32 },

    #[error("invalid base {0}: must be at least 2")]
    InvalidBase(u32),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("inner dimension {inner} is not divisible by p = {p}")]
    NotDivisible { inner: usize, p: usize },

    #[error("evaluation points are not pairwise distinct")]
    RepeatedPoint,

    #[error("recovery threshold not met: need {required} answers, have {available}")]
    ThresholdViolation { required: usize, available: usize },

    #[error("epsilon outside the achievable range (0, {max}]")]
    EpsilonRange { max: String },

    #[error("singular system")]
    Singular,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

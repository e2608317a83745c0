use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability vector is empty")]
    Empty,
    #[error("mass at index {index} is negative ({value})")]
    NegativeMass { index: usize, value: f64 },
    #[error("mass at index {index} is not finite")]
    NonFinite { index: usize },
    #[error("masses sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("collection of distributions is empty")]
    EmptyCollection,
    #[error("support size {support} exceeds the enumeration limit of {max}")]
    TooLarge { support: usize, max: usize },
    #[error("majorization fails at prefix length {prefix} (deficit {deficit:e})")]
    NotMajorized { prefix: usize, deficit: f64 },
    #[error("masses are not in descending order at index {index}")]
    NotSorted { index: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("probability {value} at index {index} is outside [0, 1]")]
    BadProbability { index: usize, value: f64 },
    #[error("row {index} of the joint table has zero mass")]
    ZeroRow { index: usize },
    #[error("column {index} of the joint table has zero mass")]
    ZeroColumn { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

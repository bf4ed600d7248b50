use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("values are not a rearrangement of 1..={n}")]
    NotABijection { n: usize },
    #[error("cycles do not partition 1..={n}")]
    NotAPartition { n: usize },
    #[error("operation undefined on the empty permutation")]
    EmptyPermutation,
    #[error("position {position} outside 1..={n}")]
    PositionOutOfRange { position: usize, n: usize },
    #[error("theta must be positive and finite, got {0}")]
    NonPositiveTheta(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pmf for size {n} exceeds the cap {cap}")]
    SupportTooLarge { n: usize, cap: usize },
    #[error("size {n} exceeds the enumeration cap {cap}")]
    NTooLarge { n: usize, cap: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("parse error: {0}")]
    Parse(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

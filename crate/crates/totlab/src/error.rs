use thiserror::Error;

/// Crate-wide error type. Everything here is a configuration problem: the
/// numerical operations themselves cannot fail once their inputs validate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector length {got} does not match network size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("component at position {index} is {value}, expected +1 or -1")]
    InvalidComponent { index: usize, value: i64 },

    #[error("empty pattern set")]
    EmptyPatternSet,

    #[error("index {index} out of range for network size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dead-input set of size {count} leaves no surviving input (n = {n})")]
    AllInputsDead { count: usize, n: usize },

    #[error("curve sizes differ: {left} vs {right}")]
    CurveSizeMismatch { left: usize, right: usize },

    #[error("noise position count {m} exceeds network size {n}")]
    CueOutOfRange { m: usize, n: usize },

    #[error("requested {requested} severed links but only {present} links are present")]
    TooManyLinks { requested: usize, present: usize },

    #[error("unknown part {0:?}")]
    UnknownPart(String),

    #[error("part {0:?} was not selected during localization")]
    PartNotSelected(String),

    #[error("episode trace missing expected event: {0}")]
    SignatureMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

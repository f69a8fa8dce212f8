use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("q = infinity is not supported here: {0}")]
    InfiniteQ(String),

    #[error("q = 1 is not supported here: {0}")]
    DegenerateQ(String),

    #[error("rejection oracle limited to n <= {max}, requested n = {n}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("sampler requires p = 1, got p = {0}")]
    UnsupportedP(f64),

    #[error("non-finite data at index {0}")]
    NonFiniteData(usize),

    #[error("invalid shooting bracket: classification is {0} at both ends")]
    InvalidBracket(String),

    #[error("ODE state became non-finite at x = {x}")]
    OdeOverflow { x: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

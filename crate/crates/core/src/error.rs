use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameter: {0}")]
    InvalidModel(String),

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("series order {0} out of range (0..=12)")]
    SeriesOrder(usize),

    #[error("duality is only defined for families k1, k2, k3 (got {0})")]
    UnsupportedFamily(&'static str),

    #[error("f(t) vanishes at t = {t}; ladder operators are undefined at a commutative instant")]
    DegenerateTime { t: f64 },

    #[error("dimension {0} outside the supported range 2..=1024")]
    Dimension(usize),

    #[error("level index {n} out of range for dimension {dim}")]
    LevelIndex { n: usize, dim: usize },

    #[error("empty window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("periodic enumeration requires the minus (trigonometric) variant")]
    WrongVariant,
}

pub type Result<T> = std::result::Result<T, Error>;

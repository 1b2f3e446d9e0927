use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("series error: {0}")]
    Series(String),
    #[error("least squares: {0}")]
    RankDeficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;

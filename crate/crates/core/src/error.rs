use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point outside chart: {0}")]
    Range(String),
    #[error("degenerate metric: {0}")]
    Degenerate(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("non-finite value at {0}")]
    NonFinite(String),
    #[error("instability detected: {0}")]
    Unstable(String),
    #[error("fit rejected: {0}")]
    Fit(String),
    #[error("inconsistent extrapolation: {0}")]
    Extrapolation(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("iteration diverged: {0}")]
    Divergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

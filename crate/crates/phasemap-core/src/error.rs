use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum PhasemapError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("truncation too severe: {0}")]
    Truncation(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate kernel parameters: {0}")]
    Degenerate(String),
    #[error("degenerate tomographic frame: {0}")]
    DegenerateFrame(String),
    #[error("square-root branch undefined: 4 mu^2 nu^2 = {0} > 1")]
    Branch(f64),
    #[error("time stepping unstable: {0}")]
    Stability(String),
    #[error("resource budget exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, PhasemapError>;

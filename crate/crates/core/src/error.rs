use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid multiplicity: {0}")]
    InvalidMultiplicity(String),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("root index {index} out of range for {count} positive roots")]
    RootIndex { index: usize, count: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("capability missing: {0}")]
    Capability(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical breakdown: {0}")]
    Numerical(String),
    /// Two independent computations of the same exact object disagreed.
    /// Always an arithmetic bug, never a property of the input.
    #[error("cross-path inconsistency: {0}")]
    CrossPath(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

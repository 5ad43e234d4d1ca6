use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("frequency out of range: {0}")]
    Range(String),

    #[error("size guard: quadrant size {q} exceeds limit {limit}")]
    SizeGuard { q: usize, limit: usize },

    #[error("surface kind mismatch: expected {expected}, got {actual}")]
    KindMismatch {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("invalid format: {0}")]
    Format(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("vector length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("too few examples: {0}")]
    TooFewExamples(String),

    #[error("missing image: {}", .0.display())]
    MissingImage(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

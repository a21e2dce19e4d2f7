//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: expected {expected_width}x{expected_height}, got {actual_width}x{actual_height}")]
    ShapeError {
        expected_width: usize,
        expected_height: usize,
        actual_width: usize,
        actual_height: usize,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("generation failed: {0}")]
    GenerationFailed(String),

    #[error("no background available")]
    NoBackgroundAvailable,

    #[error("invalid probability stack: {0}")]
    InvalidStack(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient pool: requested {requested}, available {available}")]
    InsufficientPool { requested: usize, available: usize },

    #[error("dataset error:\n{}", .0.join("\n"))]
    DatasetError(Vec<String>),

    #[error("format error: {0}")]
    FormatError(String),

    #[error("trainer error: {0}")]
    TrainerError(String),

    #[error("config error: {0}")]
    ConfigError(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),
}

impl Error {
    /// Shape-mismatch constructor used wherever two rasters must agree.
    pub fn shape(expected: (usize, usize), actual: (usize, usize)) -> Self {
        Error::ShapeError {
            expected_width: expected.0,
            expected_height: expected.1,
            actual_width: actual.0,
            actual_height: actual.1,
        }
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported channel count {channels} for mode {mode}")]
    UnsupportedChannels { channels: usize, mode: &'static str },

    #[error("buffer length {actual} does not match {width}x{height}x{channels}")]
    BufferSize { width: usize, height: usize, channels: usize, actual: usize },

    #[error("image dimensions must be at least 1x1")]
    EmptyImage,

    #[error("image {width}x{height} is too small, need at least {min}x{min}")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },

    #[error("region of interest {0:?} is empty or outside the image")]
    EmptyRoi(crate::imgproc::Rect),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("optic disk not located: no candidate region at any threshold fraction")]
    NotLocated,

    #[error("empty batch")]
    EmptyBatch,
}

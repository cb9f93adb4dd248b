//! Error type shared by every module in the crate.

use alloc::boxed::Box;
use core::fmt;

/// Errors raised by cineloop-core operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two grids that must share a resolution do not.
    ShapeMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
    /// A grid was constructed with a zero dimension.
    EmptyGrid,
    /// Backing buffer length does not match width × height × channels.
    DataLength { expected: usize, actual: usize },
    /// A grid value is NaN or infinite.
    NonFinite,
    /// A mask value is neither 0 nor 1.
    NotBinary { value: u8 },
    /// Frame index outside the loop range [0, N].
    FrameOutOfRange { t: usize, n: usize },
    /// Loop length N must be at least 1.
    EmptyLoop,
    /// Motion field has no measurable speed over the dynamic region.
    DegenerateMotion,
    /// Area-ratio threshold outside the open interval (0, 1).
    InvalidThreshold { value: f64 },
    /// Channel index beyond the grid's channel count.
    ChannelOutOfRange { channel: usize, channels: usize },
    /// Image dimensions not divisible by the pyramid's required factor.
    IndivisibleDimensions {
        width: usize,
        height: usize,
        divisor: usize,
    },
    /// Pyramid levels do not form an exact factor-of-two size chain.
    BrokenDyadicChain {
        level: usize,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    /// Pyramid must have at least one level.
    EmptyPyramid,
    /// Hole mask covers the whole grid, leaving no values to fill from.
    NothingToFillFrom,
    /// Metric support (mask or frame list) is empty.
    EmptySupport,
    /// Image smaller than the metric's minimum window.
    ImageTooSmall { width: usize, height: usize, min: usize },
    /// Style interpolation weight outside [0, 1].
    InvalidBeta { value: f32 },
    /// Style target standard deviation must be positive.
    NonPositiveStd { value: f32 },
    /// Rendering frame `index` failed.
    Frame { index: usize, source: Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { expected, actual } => write!(
                f,
                "shape mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, actual.0, actual.1
            ),
            Error::EmptyGrid => write!(f, "grid dimensions must be positive"),
            Error::DataLength { expected, actual } => {
                write!(f, "data length {actual} does not match expected {expected}")
            }
            Error::NonFinite => write!(f, "grid contains non-finite values"),
            Error::NotBinary { value } => write!(f, "mask value {value} is not 0 or 1"),
            Error::FrameOutOfRange { t, n } => {
                write!(f, "frame index {t} outside loop range [0, {n}]")
            }
            Error::EmptyLoop => write!(f, "loop length N must be at least 1"),
            Error::DegenerateMotion => write!(f, "degenerate motion field"),
            Error::InvalidThreshold { value } => {
                write!(f, "area threshold {value} outside (0, 1)")
            }
            Error::ChannelOutOfRange { channel, channels } => {
                write!(f, "channel {channel} out of range for {channels}-channel grid")
            }
            Error::IndivisibleDimensions { width, height, divisor } => write!(
                f,
                "dimensions {width}x{height} must be divisible by {divisor}"
            ),
            Error::BrokenDyadicChain { level, expected, actual } => write!(
                f,
                "pyramid level {} is {}x{}, expected {}x{}",
                level, actual.0, actual.1, expected.0, expected.1
            ),
            Error::EmptyPyramid => write!(f, "pyramid has no levels"),
            Error::NothingToFillFrom => write!(f, "nothing to fill from: every cell is a hole"),
            Error::EmptySupport => write!(f, "empty support: no pixels or frames to measure"),
            Error::ImageTooSmall { width, height, min } => write!(
                f,
                "image {width}x{height} smaller than the {min}x{min} analysis window"
            ),
            Error::InvalidBeta { value } => write!(f, "beta {value} outside [0, 1]"),
            Error::NonPositiveStd { value } => {
                write!(f, "target standard deviation {value} must be positive")
            }
            Error::Frame { index, source } => write!(f, "frame {index}: {source}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::Frame { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

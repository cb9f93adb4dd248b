//! Middlebury `.flo` optical-flow interchange: little-endian float magic
//! 202021.25, i32 width, i32 height, then h×w interleaved (u, v) f32.

use std::fs;
use std::path::Path;

use cineloop_core::FlowField;
use thiserror::Error;

/// Magic tag at the head of every `.flo` file.
pub const FLO_MAGIC: f32 = 202021.25;

/// Values with magnitude above this are the Middlebury "unknown flow"
/// sentinel and are zeroed on read.
pub const UNKNOWN_FLOW_THRESHOLD: f32 = 1e9;

#[derive(Debug, Error)]
pub enum FloError {
    #[error("invalid .flo magic: expected {FLO_MAGIC}, found {found}")]
    BadMagic { found: f32 },
    #[error("truncated .flo file: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error(".flo dimensions {width}x{height} must be positive")]
    BadDimensions { width: i32, height: i32 },
    #[error("field data length {actual} does not match {width}x{height}")]
    BadDataLength { width: usize, height: usize, actual: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A decoded `.flo` file plus the count of sentinel/non-finite values that
/// were zeroed to keep the field finite.
#[derive(Debug, Clone)]
pub struct FloContents {
    pub field: FlowField,
    pub zeroed_values: usize,
}

pub fn read_flo(path: impl AsRef<Path>) -> Result<FloContents, FloError> {
    let bytes = fs::read(path)?;
    if bytes.len() < 12 {
        return Err(FloError::Truncated { expected: 12, actual: bytes.len() });
    }
    let magic = f32::from_le_bytes(bytes[0..4].try_into().expect("slice of 4"));
    if magic != FLO_MAGIC {
        return Err(FloError::BadMagic { found: magic });
    }
    let width = i32::from_le_bytes(bytes[4..8].try_into().expect("slice of 4"));
    let height = i32::from_le_bytes(bytes[8..12].try_into().expect("slice of 4"));
    if width <= 0 || height <= 0 {
        return Err(FloError::BadDimensions { width, height });
    }
    let (w, h) = (width as usize, height as usize);
    let expected = 12 + w * h * 8;
    if bytes.len() != expected {
        return Err(FloError::Truncated { expected, actual: bytes.len() });
    }
    let mut zeroed = 0usize;
    let data: Vec<f32> = bytes[12..]
        .chunks_exact(4)
        .map(|b| {
            let v = f32::from_le_bytes(b.try_into().expect("slice of 4"));
            if !v.is_finite() || v.abs() > UNKNOWN_FLOW_THRESHOLD {
                zeroed += 1;
                0.0
            } else {
                v
            }
        })
        .collect();
    let field = FlowField::from_data(w, h, data).expect("sanitized .flo data is valid");
    Ok(FloContents { field, zeroed_values: zeroed })
}

/// Write an interleaved (u, v) grid. Works for flow and displacement data
/// alike since the on-disk layout is identical.
pub fn write_flo(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    data: &[f32],
) -> Result<(), FloError> {
    if data.len() != width * height * 2 {
        return Err(FloError::BadDataLength { width, height, actual: data.len() });
    }
    let mut bytes = Vec::with_capacity(12 + data.len() * 4);
    bytes.extend_from_slice(&FLO_MAGIC.to_le_bytes());
    bytes.extend_from_slice(&(width as i32).to_le_bytes());
    bytes.extend_from_slice(&(height as i32).to_le_bytes());
    for v in data {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub fn write_flow(path: impl AsRef<Path>, field: &FlowField) -> Result<(), FloError> {
    write_flo(path, field.width(), field.height(), field.data())
}

//! PNG bindings for images and masks: 8-bit sRGB, floats quantized by
//! round(v·255); masks are strict 0/255 single-channel files.

use std::path::Path;

use cineloop_core::{ImageRGB, Mask};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PngIoError {
    #[error(transparent)]
    Image(#[from] image::ImageError),
    #[error("mask pixel value {value} is neither 0 nor 255")]
    MaskNotBinary { value: u8 },
    #[error("decoded buffer does not match {width}x{height}")]
    BadBuffer { width: u32, height: u32 },
}

/// Quantize a unit float to its 8-bit code.
#[inline]
pub fn quantize(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn save_image(path: impl AsRef<Path>, image: &ImageRGB) -> Result<(), PngIoError> {
    let bytes: Vec<u8> = image.data().iter().map(|&v| quantize(v)).collect();
    let buffer = image::RgbImage::from_raw(image.width() as u32, image.height() as u32, bytes)
        .ok_or(PngIoError::BadBuffer {
            width: image.width() as u32,
            height: image.height() as u32,
        })?;
    buffer.save(path)?;
    Ok(())
}

pub fn load_image(path: impl AsRef<Path>) -> Result<ImageRGB, PngIoError> {
    let decoded = image::open(path)?.to_rgb8();
    let (w, h) = decoded.dimensions();
    let data: Vec<f32> = decoded.as_raw().iter().map(|&b| b as f32 / 255.0).collect();
    Ok(ImageRGB::from_data(w as usize, h as usize, data).expect("decoded PNG is finite"))
}

pub fn save_mask(path: impl AsRef<Path>, mask: &Mask) -> Result<(), PngIoError> {
    let bytes: Vec<u8> = mask.data().iter().map(|&v| v * 255).collect();
    let buffer = image::GrayImage::from_raw(mask.width() as u32, mask.height() as u32, bytes)
        .ok_or(PngIoError::BadBuffer {
            width: mask.width() as u32,
            height: mask.height() as u32,
        })?;
    buffer.save(path)?;
    Ok(())
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<Mask, PngIoError> {
    let decoded = image::open(path)?.to_luma8();
    let (w, h) = decoded.dimensions();
    let mut data = Vec::with_capacity((w * h) as usize);
    for &b in decoded.as_raw() {
        match b {
            0 => data.push(0u8),
            255 => data.push(1u8),
            value => return Err(PngIoError::MaskNotBinary { value }),
        }
    }
    Ok(Mask::from_data(w as usize, h as usize, data).expect("binary data is valid"))
}

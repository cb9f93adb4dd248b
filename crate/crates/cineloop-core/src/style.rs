//! Appearance-style interpolation via per-channel moment matching.
//!
//! The full transform shifts each channel of the source image to the target
//! mean and standard deviation; the blend weight `beta` interpolates between
//! the source (beta = 0) and the fully transferred image (beta = 1). The
//! signed per-pixel delta is computed once so that applying the style and
//! adding the delta are bitwise the same operation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::pyramid::ImageRGB;

/// Standard deviations are floored here to keep the transfer finite on
/// constant channels.
pub const STD_FLOOR: f32 = 1e-4;

/// Per-channel target statistics plus the interpolation weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StyleParams {
    target_mean: [f32; 3],
    target_std: [f32; 3],
    beta: f32,
}

impl StyleParams {
    pub fn from_stats(target_mean: [f32; 3], target_std: [f32; 3], beta: f32) -> Result<Self> {
        for &s in &target_std {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::NonPositiveStd { value: s });
            }
        }
        if target_mean.iter().any(|m| !m.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidBeta { value: beta });
        }
        Ok(Self { target_mean, target_std, beta })
    }

    pub fn with_beta(mut self, beta: f32) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidBeta { value: beta });
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn target_mean(&self) -> [f32; 3] {
        self.target_mean
    }

    pub fn target_std(&self) -> [f32; 3] {
        self.target_std
    }

    pub fn beta(&self) -> f32 {
        self.beta
    }
}

/// Per-channel population mean and standard deviation of an image, the std
/// floored at [`STD_FLOOR`].
fn channel_stats(image: &ImageRGB) -> ([f64; 3], [f64; 3]) {
    let n = (image.width() * image.height()) as f64;
    let mut mean = [0.0f64; 3];
    for px in image.data().chunks_exact(3) {
        for c in 0..3 {
            mean[c] += px[c] as f64;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut var = [0.0f64; 3];
    for px in image.data().chunks_exact(3) {
        for c in 0..3 {
            let d = px[c] as f64 - mean[c];
            var[c] += d * d;
        }
    }
    let mut std = [0.0f64; 3];
    for c in 0..3 {
        std[c] = math::sqrt64(var[c] / n).max(STD_FLOOR as f64);
    }
    (mean, std)
}

/// Measure the target image's per-channel statistics. Beta starts at 0 and is
/// supplied at use via [`StyleParams::with_beta`].
pub fn fit_style(target: &ImageRGB) -> StyleParams {
    let (mean, std) = channel_stats(target);
    StyleParams {
        target_mean: [mean[0] as f32, mean[1] as f32, mean[2] as f32],
        target_std: [std[0] as f32, std[1] as f32, std[2] as f32],
        beta: 0.0,
    }
}

/// The signed beta-scaled color shift: beta · (transfer(I) − I), unclamped.
fn compute_delta(image: &ImageRGB, params: &StyleParams) -> Vec<f32> {
    let (src_mean, src_std) = channel_stats(image);
    let beta = params.beta as f64;
    let mut gain = [0.0f64; 3];
    for c in 0..3 {
        gain[c] = params.target_std[c] as f64 / src_std[c];
    }
    let mut delta = Vec::with_capacity(image.data().len());
    for px in image.data().chunks_exact(3) {
        for c in 0..3 {
            let v = px[c] as f64;
            let transferred = (v - src_mean[c]) * gain[c] + params.target_mean[c] as f64;
            delta.push((beta * (transferred - v)) as f32);
        }
    }
    delta
}

/// Signed per-pixel color difference such that adding it to the source image
/// reproduces `apply_style` before its final clamp, bitwise.
pub fn style_delta(image: &ImageRGB, params: &StyleParams) -> ImageRGB {
    let delta = compute_delta(image, params);
    ImageRGB::from_data(image.width(), image.height(), delta).expect("delta is finite")
}

/// Source image plus the style delta, without the output clamp.
pub fn apply_style_unclamped(image: &ImageRGB, params: &StyleParams) -> ImageRGB {
    let delta = compute_delta(image, params);
    let data: Vec<f32> = image.data().iter().zip(delta.iter()).map(|(v, d)| v + d).collect();
    ImageRGB::from_data(image.width(), image.height(), data).expect("styled image is finite")
}

/// Blend the image toward the target statistics and clamp to [0, 1].
pub fn apply_style(image: &ImageRGB, params: &StyleParams) -> ImageRGB {
    let unclamped = apply_style_unclamped(image, params);
    let data: Vec<f32> = unclamped.data().iter().map(|v| v.clamp(0.0, 1.0)).collect();
    ImageRGB::from_data(image.width(), image.height(), data).expect("clamped image is finite")
}

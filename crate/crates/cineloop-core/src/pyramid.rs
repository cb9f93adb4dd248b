//! Exactly-invertible multi-scale feature decomposition.
//!
//! `analyze` splits an image into a band-pass pyramid: each finer level
//! stores the residual between a resolution and the upsampled next-coarser
//! one, and the coarsest level stores the low-pass base. Because `synthesize`
//! re-adds residuals with the very same upsampling operator, reconstruction
//! is exact up to float rounding. The up/down pair is the classic separable
//! 5-tap binomial [1,4,6,4,1]/16 with reflected borders.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// 3-channel interleaved float image, values nominally in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRGB {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl ImageRGB {
    pub fn from_data(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyGrid);
        }
        let expected = width * height * 3;
        if data.len() != expected {
            return Err(Error::DataLength { expected, actual: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { width, height, data })
    }

    pub fn constant(width: usize, height: usize, rgb: [f32; 3]) -> Self {
        Self::from_fn(width, height, |_, _| rgb)
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f32; 3]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut data = vec![0.0f32; width * height * 3];
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                assert!(px.iter().all(|v| v.is_finite()), "image values must be finite");
                data[(y * width + x) * 3..(y * width + x) * 3 + 3].copy_from_slice(&px);
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f32; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Real-valued grid with an arbitrary channel count.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl FeatureMap {
    pub fn from_data(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 || channels == 0 {
            return Err(Error::EmptyGrid);
        }
        let expected = width * height * channels;
        if data.len() != expected {
            return Err(Error::DataLength { expected, actual: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { width, height, channels, data })
    }

    pub fn zeros(width: usize, height: usize, channels: usize) -> Self {
        assert!(width > 0 && height > 0 && channels > 0);
        Self { width, height, channels, data: vec![0.0; width * height * channels] }
    }

    pub fn from_image(image: &ImageRGB) -> Self {
        Self {
            width: image.width,
            height: image.height,
            channels: 3,
            data: image.data.clone(),
        }
    }

    /// Convert a 3-channel map back into an image, clamping to [0, 1].
    pub fn into_image_clamped(self) -> Result<ImageRGB> {
        if self.channels != 3 {
            return Err(Error::ChannelOutOfRange { channel: self.channels, channels: 3 });
        }
        let data = self.data.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Ok(ImageRGB { width: self.width, height: self.height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    #[inline]
    pub fn sample(&self, x: usize, y: usize, c: usize) -> f32 {
        self.data[(y * self.width + x) * self.channels + c]
    }
}

/// Ordered multi-resolution stack: index 0 is the coarsest level (the
/// low-pass base), the last index the finest residual. Adjacent levels differ
/// by exactly a factor of two in each dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePyramid {
    levels: Vec<FeatureMap>,
}

impl FeaturePyramid {
    pub fn from_levels(levels: Vec<FeatureMap>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyPyramid);
        }
        validate_chain(&levels)?;
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[FeatureMap] {
        &self.levels
    }

    pub fn levels_mut(&mut self) -> &mut [FeatureMap] {
        &mut self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Finest level's resolution.
    pub fn base_dimensions(&self) -> (usize, usize) {
        let finest = self.levels.last().expect("pyramid is never empty");
        (finest.width, finest.height)
    }
}

fn validate_chain(levels: &[FeatureMap]) -> Result<()> {
    for (k, pair) in levels.windows(2).enumerate() {
        let expected = (pair[0].width * 2, pair[0].height * 2);
        let actual = (pair[1].width, pair[1].height);
        if expected != actual || pair[0].channels != pair[1].channels {
            return Err(Error::BrokenDyadicChain { level: k + 1, expected, actual });
        }
    }
    Ok(())
}

const KERNEL: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Reflect-101 index: mirrors around the borders without repeating the edge
/// sample. A length-1 axis always maps to 0.
#[inline]
fn mirror(i: i64, n: i64) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n - 1);
    let mut i = i % period;
    if i < 0 {
        i += period;
    }
    if i >= n {
        i = period - i;
    }
    i as usize
}

fn blur_pass(src: &[f32], w: usize, h: usize, channels: usize, horizontal: bool, gain: f64) -> Vec<f32> {
    let mut out = vec![0.0f32; src.len()];
    for y in 0..h {
        for x in 0..w {
            for c in 0..channels {
                let mut acc = 0.0f64;
                for (k, &kv) in KERNEL.iter().enumerate() {
                    let offset = k as i64 - 2;
                    let (sx, sy) = if horizontal {
                        (mirror(x as i64 + offset, w as i64), y)
                    } else {
                        (x, mirror(y as i64 + offset, h as i64))
                    };
                    acc += kv * src[(sy * w + sx) * channels + c] as f64;
                }
                out[(y * w + x) * channels + c] = (acc * gain) as f32;
            }
        }
    }
    out
}

fn blur(map: &FeatureMap, gain_per_axis: f64) -> FeatureMap {
    let h = blur_pass(&map.data, map.width, map.height, map.channels, true, gain_per_axis);
    let v = blur_pass(&h, map.width, map.height, map.channels, false, gain_per_axis);
    FeatureMap { width: map.width, height: map.height, channels: map.channels, data: v }
}

/// Blur then keep every second sample. Input dimensions must be even.
fn downsample(map: &FeatureMap) -> FeatureMap {
    debug_assert!(map.width.is_multiple_of(2) && map.height.is_multiple_of(2));
    let blurred = blur(map, 1.0);
    let (nw, nh) = (map.width / 2, map.height / 2);
    let mut data = vec![0.0f32; nw * nh * map.channels];
    for y in 0..nh {
        for x in 0..nw {
            for c in 0..map.channels {
                data[(y * nw + x) * map.channels + c] =
                    blurred.data[((2 * y) * map.width + 2 * x) * map.channels + c];
            }
        }
    }
    FeatureMap { width: nw, height: nh, channels: map.channels, data }
}

/// Zero-insertion upsample followed by the doubled-gain blur.
fn upsample(map: &FeatureMap) -> FeatureMap {
    let (nw, nh) = (map.width * 2, map.height * 2);
    let mut data = vec![0.0f32; nw * nh * map.channels];
    for y in 0..map.height {
        for x in 0..map.width {
            for c in 0..map.channels {
                data[((2 * y) * nw + 2 * x) * map.channels + c] = map.data[(y * map.width + x) * map.channels + c];
            }
        }
    }
    let expanded = FeatureMap { width: nw, height: nh, channels: map.channels, data };
    blur(&expanded, 2.0)
}

/// Decompose an image into a `levels`-deep band-pass pyramid. Dimensions must
/// be divisible by 2^(levels−1).
pub fn analyze(image: &ImageRGB, levels: usize) -> Result<FeaturePyramid> {
    if levels == 0 {
        return Err(Error::EmptyPyramid);
    }
    let divisor = 1usize << (levels - 1);
    if !image.width.is_multiple_of(divisor) || !image.height.is_multiple_of(divisor) {
        return Err(Error::IndivisibleDimensions {
            width: image.width,
            height: image.height,
            divisor,
        });
    }

    let mut residuals: Vec<FeatureMap> = Vec::with_capacity(levels);
    let mut current = FeatureMap::from_image(image);
    for _ in 0..levels - 1 {
        let coarser = downsample(&current);
        let up = upsample(&coarser);
        let mut residual = current;
        for (r, u) in residual.data.iter_mut().zip(up.data.iter()) {
            *r -= u;
        }
        residuals.push(residual);
        current = coarser;
    }

    let mut stack = Vec::with_capacity(levels);
    stack.push(current);
    stack.extend(residuals.into_iter().rev());
    FeaturePyramid::from_levels(stack)
}

/// Coarse-to-fine reconstruction without the final clamp; the inverse of
/// `analyze` for untouched pyramids.
pub fn synthesize_features(pyramid: &FeaturePyramid) -> Result<FeatureMap> {
    validate_chain(&pyramid.levels)?;
    let mut acc = pyramid.levels[0].clone();
    for level in &pyramid.levels[1..] {
        let mut up = upsample(&acc);
        for (u, r) in up.data.iter_mut().zip(level.data.iter()) {
            *u += r;
        }
        acc = up;
    }
    Ok(acc)
}

/// Reconstruct the image, clamping to [0, 1] only at this final step.
pub fn synthesize(pyramid: &FeaturePyramid) -> Result<ImageRGB> {
    synthesize_features(pyramid)?.into_image_clamped()
}

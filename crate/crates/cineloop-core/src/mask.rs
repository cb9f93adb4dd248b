//! Binary static/dynamic segmentation masks and the area-ratio refinement
//! that removes small spurious regions.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pyramid::ImageRGB;

/// Binary segmentation grid: 1 = dynamic, 0 = static.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Mask {
    pub fn from_data(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyGrid);
        }
        let expected = width * height;
        if data.len() != expected {
            return Err(Error::DataLength { expected, actual: data.len() });
        }
        if let Some(&value) = data.iter().find(|&&v| v > 1) {
            return Err(Error::NotBinary { value });
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        assert!(value <= 1, "mask values must be 0 or 1");
        Self { width, height, data: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        let mut data = vec![0u8; width * height];
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                assert!(v <= 1, "mask values must be 0 or 1");
                data[y * width + x] = v;
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

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// Number of dynamic (value 1) cells.
    pub fn dynamic_count(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    /// Nearest-neighbor resample to a new resolution (pixel-center mapping).
    pub fn resize_nearest(&self, width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "mask dimensions must be positive");
        if (width, height) == (self.width, self.height) {
            return self.clone();
        }
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        let mut data = vec![0u8; width * height];
        for y in 0..height {
            let src_y = (((y as f64 + 0.5) * sy) as usize).min(self.height - 1);
            for x in 0..width {
                let src_x = (((x as f64 + 0.5) * sx) as usize).min(self.width - 1);
                data[y * width + x] = self.data[src_y * self.width + src_x];
            }
        }
        Self { width, height, data }
    }
}

/// Flip every 4-connected component (of either label) whose area ratio is
/// below `area_ratio_threshold` to the surrounding label. Components are
/// measured on the input; all sub-threshold ones flip in a single pass.
pub fn refine_mask(mask: &Mask, area_ratio_threshold: f64) -> Result<Mask> {
    if !(area_ratio_threshold > 0.0 && area_ratio_threshold < 1.0) {
        return Err(Error::InvalidThreshold { value: area_ratio_threshold });
    }
    let w = mask.width;
    let h = mask.height;
    let total = w * h;
    let mut labels = vec![u32::MAX; total];
    let mut areas: Vec<usize> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();

    for start in 0..total {
        if labels[start] != u32::MAX {
            continue;
        }
        let label = areas.len() as u32;
        let value = mask.data[start];
        let mut area = 0usize;
        labels[start] = label;
        stack.push(start);
        while let Some(i) = stack.pop() {
            area += 1;
            let x = i % w;
            let y = i / w;
            let mut visit = |j: usize| {
                if labels[j] == u32::MAX && mask.data[j] == value {
                    labels[j] = label;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        areas.push(area);
    }

    let flip: Vec<bool> = areas
        .iter()
        .map(|&a| (a as f64) < area_ratio_threshold * total as f64)
        .collect();
    let data = mask
        .data
        .iter()
        .zip(labels.iter())
        .map(|(&v, &l)| if flip[l as usize] { 1 - v } else { v })
        .collect();
    Ok(Mask { width: w, height: h, data })
}

/// Author a mask from an image: dynamic wherever the selected channel
/// exceeds `cutoff`.
pub fn threshold_mask(image: &ImageRGB, channel: usize, cutoff: f32) -> Result<Mask> {
    if channel >= 3 {
        return Err(Error::ChannelOutOfRange { channel, channels: 3 });
    }
    let data = image
        .data()
        .chunks_exact(3)
        .map(|px| (px[channel] > cutoff) as u8)
        .collect();
    Ok(Mask { width: image.width(), height: image.height(), data })
}

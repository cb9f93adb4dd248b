//! Forward warping of feature maps and its multi-scale orchestration.
//!
//! Each source pixel scatters its feature vector onto the four integer
//! neighbors of its displaced position with bilinear weights. A frame is
//! warped along both the future and the past displacement fields at once,
//! weighting the two directions by the looping weight and normalizing
//! jointly, which is what makes the first and last frames coincide.
//! Destinations no contribution reaches become holes and are filled from
//! their surroundings.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::DisplacementField;
use crate::math;
use crate::pyramid::{FeatureMap, FeaturePyramid};

/// Total splat weight below which a destination counts as a hole.
pub const HOLE_EPSILON: f32 = 1e-8;

/// Hole-area fraction at or above which diffusion inpainting runs before the
/// median pass.
pub const LARGE_HOLE_RATIO: f64 = 0.03;

/// Median filter kernel width for small-hole filling.
pub const MEDIAN_WINDOW: usize = 7;

/// Smoothing sweeps applied over diffusion-inpainted regions.
const DIFFUSION_SMOOTHING_SWEEPS: usize = 20;

/// Weighted feature sums and accumulated splat weights per destination cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SplatAccumulator {
    features: FeatureMap,
    weights: Vec<f32>,
}

impl SplatAccumulator {
    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn weights(&self) -> &[f32] {
        &self.weights
    }

    /// Sum another accumulator of the same shape into this one.
    pub fn merge(mut self, other: &SplatAccumulator) -> Result<SplatAccumulator> {
        let shape = (self.features.width(), self.features.height());
        let other_shape = (other.features.width(), other.features.height());
        if shape != other_shape || self.features.channels() != other.features.channels() {
            return Err(Error::ShapeMismatch { expected: shape, actual: other_shape });
        }
        for (a, b) in self.features.data_mut().iter_mut().zip(other.features.data()) {
            *a += b;
        }
        for (a, b) in self.weights.iter_mut().zip(other.weights.iter()) {
            *a += b;
        }
        Ok(self)
    }

    /// Divide feature sums by total weights; destinations whose weight is
    /// below `eps` become holes and stay zero.
    pub fn normalize(&self, eps: f32) -> (FeatureMap, HoleMask) {
        let w = self.features.width();
        let h = self.features.height();
        let channels = self.features.channels();
        let mut data = vec![0.0f32; w * h * channels];
        let mut holes = vec![0u8; w * h];
        for i in 0..w * h {
            let total = self.weights[i];
            if total < eps {
                holes[i] = 1;
            } else {
                for c in 0..channels {
                    data[i * channels + c] = self.features.data()[i * channels + c] / total;
                }
            }
        }
        let features = FeatureMap::from_data(w, h, channels, data).expect("normalized shape is valid");
        (features, HoleMask { width: w, height: h, data: holes })
    }
}

/// Binary grid marking destinations that received no splat weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleMask {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl HoleMask {
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

    pub fn none(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![0; width * height] }
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

    pub fn hole_count(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }
}

/// Bilinearly resize a displacement field to a new resolution and rescale its
/// values so they stay in destination-pixel units: the u channel is
/// multiplied by target_w / source_w, the v channel by target_h / source_h.
pub fn rescale_displacement(field: &DisplacementField, target_w: usize, target_h: usize) -> DisplacementField {
    assert!(target_w > 0 && target_h > 0, "target dimensions must be positive");
    if (target_w, target_h) == (field.width(), field.height()) {
        return field.clone();
    }
    let sw = field.width();
    let sh = field.height();
    let cu = target_w as f64 / sw as f64;
    let cv = target_h as f64 / sh as f64;
    let sx = sw as f64 / target_w as f64;
    let sy = sh as f64 / target_h as f64;
    let mut data = vec![0.0f32; target_w * target_h * 2];
    for y in 0..target_h {
        let py = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (sh - 1) as f64);
        for x in 0..target_w {
            let px = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (sw - 1) as f64);
            let x0 = (math::floor64(px) as usize).min(sw - 1);
            let y0 = (math::floor64(py) as usize).min(sh - 1);
            let x1 = (x0 + 1).min(sw - 1);
            let y1 = (y0 + 1).min(sh - 1);
            let fx = px - x0 as f64;
            let fy = py - y0 as f64;
            let lerp = |a: f64, b: f64, t: f64| a + t * (b - a);
            for (c, scale) in [(0usize, cu), (1usize, cv)] {
                let at = |xx: usize, yy: usize| field.data()[(yy * sw + xx) * 2 + c] as f64;
                let v = lerp(
                    lerp(at(x0, y0), at(x1, y0), fx),
                    lerp(at(x0, y1), at(x1, y1), fx),
                    fy,
                );
                data[(y * target_w + x) * 2 + c] = (v * scale) as f32;
            }
        }
    }
    DisplacementField::from_data(target_w, target_h, field.base_width(), field.base_height(), data)
        .expect("rescaled field is finite and well-shaped")
}

/// Forward-splat a feature map along a displacement field. Every source pixel
/// contributes feature·weight to the four integer neighbors of its displaced
/// position; neighbors outside the grid are dropped. Accumulation is
/// sequential row-major, which is the reference any parallel variant must
/// reproduce bit-exactly.
pub fn splat(features: &FeatureMap, field: &DisplacementField, weight_scale: f32) -> Result<SplatAccumulator> {
    let w = features.width();
    let h = features.height();
    if (w, h) != (field.width(), field.height()) {
        return Err(Error::ShapeMismatch {
            expected: (w, h),
            actual: (field.width(), field.height()),
        });
    }
    assert!(weight_scale >= 0.0 && weight_scale.is_finite(), "weight scale must be non-negative");
    let channels = features.channels();
    let mut acc = FeatureMap::zeros(w, h, channels);
    let mut weights = vec![0.0f32; w * h];
    let ws = weight_scale as f64;
    for y in 0..h {
        for x in 0..w {
            let (du, dv) = field.get(x, y);
            let px = x as f64 + du as f64;
            let py = y as f64 + dv as f64;
            let fx0 = math::floor64(px);
            let fy0 = math::floor64(py);
            let fx = px - fx0;
            let fy = py - fy0;
            let x0 = fx0 as i64;
            let y0 = fy0 as i64;
            let corners = [
                (x0, y0, (1.0 - fx) * (1.0 - fy)),
                (x0 + 1, y0, fx * (1.0 - fy)),
                (x0, y0 + 1, (1.0 - fx) * fy),
                (x0 + 1, y0 + 1, fx * fy),
            ];
            let src = (y * w + x) * channels;
            for (cx, cy, bw) in corners {
                if cx < 0 || cy < 0 || cx >= w as i64 || cy >= h as i64 {
                    continue;
                }
                let dst = cy as usize * w + cx as usize;
                let wgt = (bw * ws) as f32;
                weights[dst] += wgt;
                let out = &mut acc.data_mut()[dst * channels..dst * channels + channels];
                for (o, f) in out.iter_mut().zip(&features.data()[src..src + channels]) {
                    *o += f * wgt;
                }
            }
        }
    }
    Ok(SplatAccumulator { features: acc, weights })
}

/// Splat the same source along both displacement directions — the future one
/// weighted by `alpha`, the past one by 1−alpha — and normalize the two
/// accumulators jointly. Returns the blended map and the mask of destinations
/// nothing reached.
pub fn joint_splat(
    source: &FeatureMap,
    forward: &DisplacementField,
    backward: &DisplacementField,
    alpha: f32,
) -> Result<(FeatureMap, HoleMask)> {
    assert!((0.0..=1.0).contains(&alpha), "looping weight must lie in [0, 1]");
    let fwd = splat(source, forward, alpha)?;
    let bwd = splat(source, backward, 1.0 - alpha)?;
    let merged = fwd.merge(&bwd)?;
    Ok(merged.normalize(HOLE_EPSILON))
}

/// Lower median: element at index (k−1)/2 of the sorted values.
fn lower_median(values: &mut [f32]) -> f32 {
    let idx = (values.len() - 1) / 2;
    values.sort_unstable_by(f32::total_cmp);
    values[idx]
}

/// Diffusion inpainting: repeatedly assign each unfilled hole the average of
/// its already-known 4-neighbors, then relax the filled region with a fixed
/// number of Jacobi sweeps.
fn diffusion_fill(map: &mut FeatureMap, holes: &[u8]) {
    let w = map.width();
    let h = map.height();
    let channels = map.channels();
    let mut unfilled: Vec<u8> = holes.to_vec();
    let mut remaining: usize = unfilled.iter().map(|&v| v as usize).sum();

    while remaining > 0 {
        let snapshot = unfilled.clone();
        let mut progressed = false;
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if snapshot[i] == 0 {
                    continue;
                }
                let mut sums = vec![0.0f64; channels];
                let mut count = 0usize;
                let take = |xx: usize, yy: usize, sums: &mut [f64], count: &mut usize| {
                    let j = yy * w + xx;
                    if snapshot[j] == 0 {
                        for (s, &v) in sums.iter_mut().zip(&map.data()[j * channels..j * channels + channels]) {
                            *s += v as f64;
                        }
                        *count += 1;
                    }
                };
                if x > 0 {
                    take(x - 1, y, &mut sums, &mut count);
                }
                if x + 1 < w {
                    take(x + 1, y, &mut sums, &mut count);
                }
                if y > 0 {
                    take(x, y - 1, &mut sums, &mut count);
                }
                if y + 1 < h {
                    take(x, y + 1, &mut sums, &mut count);
                }
                if count == 0 {
                    continue;
                }
                for (c, &sum) in sums.iter().enumerate() {
                    map.data_mut()[i * channels + c] = (sum / count as f64) as f32;
                }
                unfilled[i] = 0;
                remaining -= 1;
                progressed = true;
            }
        }
        debug_assert!(progressed, "diffusion fill stalled");
        if !progressed {
            break;
        }
    }

    // Jacobi relaxation over the original hole set; non-holes act as fixed
    // boundary values.
    for _ in 0..DIFFUSION_SMOOTHING_SWEEPS {
        let current = map.data().to_vec();
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if holes[i] == 0 {
                    continue;
                }
                let neighbors = [
                    (x.saturating_sub(1), y),
                    ((x + 1).min(w - 1), y),
                    (x, y.saturating_sub(1)),
                    (x, (y + 1).min(h - 1)),
                ];
                for c in 0..channels {
                    let mut sum = 0.0f64;
                    for (nx, ny) in neighbors {
                        sum += current[(ny * w + nx) * channels + c] as f64;
                    }
                    map.data_mut()[i * channels + c] = (sum / 4.0) as f32;
                }
            }
        }
    }
}

/// Fill hole pixels from their surroundings. Large hole areas (at or above
/// `large_hole_ratio` of the grid) are diffusion-inpainted; small holes take
/// the per-channel lower median of the non-hole values in their 7×7 window,
/// in row-major passes where each pass sees the non-hole set as of its start
/// and pixels without support defer to the next pass. Non-hole pixels are
/// never modified.
pub fn fill_holes(features: &FeatureMap, holes: &HoleMask, large_hole_ratio: f64) -> Result<FeatureMap> {
    let w = features.width();
    let h = features.height();
    if (w, h) != (holes.width, holes.height) {
        return Err(Error::ShapeMismatch { expected: (w, h), actual: (holes.width, holes.height) });
    }
    let total = w * h;
    let hole_count = holes.hole_count();
    if hole_count == total {
        return Err(Error::NothingToFillFrom);
    }
    if hole_count == 0 {
        return Ok(features.clone());
    }

    let mut out = features.clone();
    if hole_count as f64 >= large_hole_ratio * total as f64 {
        diffusion_fill(&mut out, holes.data());
        return Ok(out);
    }

    let channels = features.channels();
    let radius = (MEDIAN_WINDOW - 1) / 2;
    let mut unfilled: Vec<u8> = holes.data().to_vec();
    let mut remaining = hole_count;
    while remaining > 0 {
        let snapshot_state = out.data().to_vec();
        let snapshot_holes = unfilled.clone();
        let mut progressed = false;
        let mut values: Vec<f32> = Vec::with_capacity(MEDIAN_WINDOW * MEDIAN_WINDOW);
        for y in 0..h {
            for x in 0..w {
                let i = y * w + x;
                if snapshot_holes[i] == 0 {
                    continue;
                }
                let x_lo = x.saturating_sub(radius);
                let x_hi = (x + radius).min(w - 1);
                let y_lo = y.saturating_sub(radius);
                let y_hi = (y + radius).min(h - 1);
                let mut has_support = false;
                for c in 0..channels {
                    values.clear();
                    for wy in y_lo..=y_hi {
                        for wx in x_lo..=x_hi {
                            let j = wy * w + wx;
                            if snapshot_holes[j] == 0 {
                                values.push(snapshot_state[j * channels + c]);
                            }
                        }
                    }
                    if values.is_empty() {
                        break;
                    }
                    has_support = true;
                    out.data_mut()[i * channels + c] = lower_median(&mut values);
                }
                if has_support {
                    unfilled[i] = 0;
                    remaining -= 1;
                    progressed = true;
                }
            }
        }
        if remaining > 0 && !progressed {
            // No hole pixel found any support this pass; fall back to
            // diffusion for whatever is left.
            diffusion_fill(&mut out, &unfilled);
            break;
        }
    }
    Ok(out)
}

/// Multi-scale warping: for every pyramid level, rescale both displacement
/// fields to the level's resolution, jointly splat the level, and fill the
/// holes. The output pyramid has the identical shape chain.
pub fn warp_pyramid(
    pyramid: &FeaturePyramid,
    forward: &DisplacementField,
    backward: &DisplacementField,
    alpha: f32,
) -> Result<FeaturePyramid> {
    let mut levels = Vec::with_capacity(pyramid.level_count());
    for level in pyramid.levels() {
        let fwd = rescale_displacement(forward, level.width(), level.height());
        let bwd = rescale_displacement(backward, level.width(), level.height());
        let (warped, holes) = joint_splat(level, &fwd, &bwd, alpha)?;
        levels.push(fill_holes(&warped, &holes, LARGE_HOLE_RATIO)?);
    }
    FeaturePyramid::from_levels(levels)
}

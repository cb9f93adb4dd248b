//! Eulerian motion fields, cumulative displacement fields, and the
//! integration that turns one into the other.
//!
//! A [`FlowField`] holds per-pixel instantaneous velocity in pixels/frame.
//! Repeatedly sampling it at each pixel's displaced position accumulates a
//! [`DisplacementField`]: the offset from a pixel's position at time 0 to its
//! position at time t. The looping construction needs both the future
//! displacement (t steps over the field) and the past displacement (N−t steps
//! over the negated field).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::math;

/// Clamp a continuous position into the grid and bilinearly interpolate a
/// 2-channel grid there. Nested-lerp form: exactly reproduces constants and
/// returns stored values untouched at integer coordinates.
#[inline]
fn sample2(data: &[f32], w: usize, h: usize, x: f64, y: f64) -> (f64, f64) {
    let x = x.clamp(0.0, (w - 1) as f64);
    let y = y.clamp(0.0, (h - 1) as f64);
    let x0 = (math::floor64(x) as usize).min(w - 1);
    let y0 = (math::floor64(y) as usize).min(h - 1);
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let lerp = |a: f64, b: f64, t: f64| a + t * (b - a);
    let at = |xx: usize, yy: usize, c: usize| data[(yy * w + xx) * 2 + c] as f64;
    let u = lerp(
        lerp(at(x0, y0, 0), at(x1, y0, 0), fx),
        lerp(at(x0, y1, 0), at(x1, y1, 0), fx),
        fy,
    );
    let v = lerp(
        lerp(at(x0, y0, 1), at(x1, y0, 1), fx),
        lerp(at(x0, y1, 1), at(x1, y1, 1), fx),
        fy,
    );
    (u, v)
}

fn validate_grid2(width: usize, height: usize, data: &[f32]) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyGrid);
    }
    let expected = width * height * 2;
    if data.len() != expected {
        return Err(Error::DataLength { expected, actual: data.len() });
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Eulerian motion field: per-pixel velocity (u rightward, v downward) in
/// pixels/frame, interleaved row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl FlowField {
    pub fn from_data(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        validate_grid2(width, height, &data)?;
        Ok(Self { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "flow field dimensions must be positive");
        Self { width, height, data: vec![0.0; width * height * 2] }
    }

    /// Build a field from a per-cell velocity function.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> (f32, f32)) -> Self {
        assert!(width > 0 && height > 0, "flow field dimensions must be positive");
        let mut data = vec![0.0f32; width * height * 2];
        for y in 0..height {
            for x in 0..width {
                let (u, v) = f(x, y);
                assert!(u.is_finite() && v.is_finite(), "flow values must be finite");
                data[(y * width + x) * 2] = u;
                data[(y * width + x) * 2 + 1] = v;
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
    pub fn get(&self, x: usize, y: usize) -> (f32, f32) {
        let i = (y * self.width + x) * 2;
        (self.data[i], self.data[i + 1])
    }

    /// Bilinear sample at a continuous position; positions outside the grid
    /// are clamped to the border first.
    pub fn sample_bilinear(&self, x: f32, y: f32) -> (f32, f32) {
        let (u, v) = sample2(&self.data, self.width, self.height, x as f64, y as f64);
        (u as f32, v as f32)
    }

    /// Field with both channels negated; used for past-directed integration.
    pub fn negated(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }
}

/// Cumulative per-pixel displacement in pixels, at this field's own
/// resolution. `base_width`/`base_height` record the resolution the
/// displacements were integrated at.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    width: usize,
    height: usize,
    base_width: usize,
    base_height: usize,
    data: Vec<f32>,
}

impl DisplacementField {
    pub fn from_data(
        width: usize,
        height: usize,
        base_width: usize,
        base_height: usize,
        data: Vec<f32>,
    ) -> Result<Self> {
        validate_grid2(width, height, &data)?;
        if base_width == 0 || base_height == 0 {
            return Err(Error::EmptyGrid);
        }
        Ok(Self { width, height, base_width, base_height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "displacement field dimensions must be positive");
        Self {
            width,
            height,
            base_width: width,
            base_height: height,
            data: vec![0.0; width * height * 2],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn base_width(&self) -> usize {
        self.base_width
    }

    pub fn base_height(&self) -> usize {
        self.base_height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> (f32, f32) {
        let i = (y * self.width + x) * 2;
        (self.data[i], self.data[i + 1])
    }

    pub fn sample_bilinear(&self, x: f32, y: f32) -> (f32, f32) {
        let (u, v) = sample2(&self.data, self.width, self.height, x as f64, y as f64);
        (u as f32, v as f32)
    }

    pub fn negated(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            base_width: self.base_width,
            base_height: self.base_height,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }

    pub(crate) fn from_parts(
        width: usize,
        height: usize,
        base_width: usize,
        base_height: usize,
        data: Vec<f32>,
    ) -> Self {
        Self { width, height, base_width, base_height, data }
    }
}

/// Loop length: the rendered video has N+1 frames, indices 0..=N.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopSpec {
    n: usize,
}

impl LoopSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLoop);
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn frame_count(&self) -> usize {
        self.n + 1
    }

    /// Looping weight 1 − t/N: 1 at the first frame, 0 at the last,
    /// monotonically decreasing in between.
    pub fn looping_weight(&self, t: usize) -> f32 {
        1.0 - t as f32 / self.n as f32
    }
}

/// Euler-integrate a velocity field for `steps` steps: each pixel repeatedly
/// samples the field at its displaced position and accumulates the result.
/// State is carried in f64 so long integrations do not drift; the stored
/// field is f32.
pub fn integrate(flow: &FlowField, steps: usize) -> DisplacementField {
    let w = flow.width;
    let h = flow.height;
    let mut state = vec![0.0f64; w * h * 2];
    for _ in 0..steps {
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) * 2;
                let (du, dv) = sample2(
                    &flow.data,
                    w,
                    h,
                    x as f64 + state[i],
                    y as f64 + state[i + 1],
                );
                state[i] += du;
                state[i + 1] += dv;
            }
        }
    }
    let data = state.iter().map(|&v| v as f32).collect();
    DisplacementField::from_parts(w, h, w, h, data)
}

/// Future and past displacement fields for frame `t` of an N-frame loop:
/// t steps over the field and N−t steps over its negation.
pub fn loop_displacements(
    flow: &FlowField,
    spec: &LoopSpec,
    t: usize,
) -> Result<(DisplacementField, DisplacementField)> {
    if t > spec.n {
        return Err(Error::FrameOutOfRange { t, n: spec.n });
    }
    let forward = integrate(flow, t);
    let backward = integrate(&flow.negated(), spec.n - t);
    Ok((forward, backward))
}

/// Zero the velocity of every static pixel by multiplying both channels with
/// the segmentation mask.
pub fn apply_mask(flow: &FlowField, mask: &Mask) -> Result<FlowField> {
    if (flow.width, flow.height) != (mask.width(), mask.height()) {
        return Err(Error::ShapeMismatch {
            expected: (flow.width, flow.height),
            actual: (mask.width(), mask.height()),
        });
    }
    let mask_data = mask.data();
    let mut data = flow.data.clone();
    for (i, cell) in data.chunks_exact_mut(2).enumerate() {
        let s = mask_data[i] as f32;
        cell[0] *= s;
        cell[1] *= s;
    }
    Ok(FlowField { width: flow.width, height: flow.height, data })
}

/// Rescale the whole field by one scalar so the mean speed over dynamic
/// (mask = 1) pixels equals `target_mean_magnitude`.
pub fn normalize_speed(flow: &FlowField, mask: &Mask, target_mean_magnitude: f32) -> Result<FlowField> {
    if (flow.width, flow.height) != (mask.width(), mask.height()) {
        return Err(Error::ShapeMismatch {
            expected: (flow.width, flow.height),
            actual: (mask.width(), mask.height()),
        });
    }
    assert!(
        target_mean_magnitude.is_finite() && target_mean_magnitude > 0.0,
        "target mean magnitude must be positive"
    );
    let mask_data = mask.data();
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for (i, cell) in flow.data.chunks_exact(2).enumerate() {
        if mask_data[i] == 1 {
            let u = cell[0] as f64;
            let v = cell[1] as f64;
            sum += math::sqrt64(u * u + v * v);
            count += 1;
        }
    }
    if count == 0 || sum == 0.0 {
        return Err(Error::DegenerateMotion);
    }
    let scale = target_mean_magnitude as f64 / (sum / count as f64);
    let data = flow.data.iter().map(|&v| (v as f64 * scale) as f32).collect();
    Ok(FlowField { width: flow.width, height: flow.height, data })
}

//! Bundled synthetic scene: a horizontally periodic wave band over a static
//! gradient. Under constant rightward flow of one pixel/frame the band's
//! ground-truth motion is an exact per-frame translation, because the texture
//! period equals the loop length and both splat directions agree.

use cineloop_core::compose::CinemagraphJob;
use cineloop_core::{FlowField, ImageRGB, LoopSpec, Mask};

#[derive(Debug, Clone, Copy)]
pub struct TranslationScene {
    pub width: usize,
    pub height: usize,
    pub band_top: usize,
    pub band_bottom: usize,
    /// Horizontal texture period; equals the loop length N at speed 1.
    pub period: usize,
}

impl TranslationScene {
    /// Scene sized for a loop of `n` frames at one pixel/frame.
    pub fn new(width: usize, height: usize, n: usize) -> Self {
        let band = height / 2;
        Self {
            width,
            height,
            band_top: (height - band) / 2,
            band_bottom: (height - band) / 2 + band,
            period: n,
        }
    }

    fn band_texel(&self, x: i64, y: usize) -> [f32; 3] {
        let phase = (x.rem_euclid(self.period as i64)) as f32 / self.period as f32;
        let depth = (y - self.band_top) as f32 / (self.band_bottom - self.band_top) as f32;
        let wave = (phase * std::f32::consts::TAU).sin();
        [
            0.5 + 0.13 * wave,
            0.45 + 0.1 * wave * (1.0 - depth),
            0.4 + 0.1 * depth,
        ]
    }

    // x-constant: content bled across the band edge by coarse-level blurs is
    // then translation-invariant, keeping the analytic ground truth exact.
    fn static_texel(&self, y: usize) -> [f32; 3] {
        let fy = y as f32 / self.height as f32;
        [0.2 + 0.25 * fy, 0.3 + 0.2 * fy, 0.6 - 0.2 * fy]
    }

    fn in_band(&self, y: usize) -> bool {
        (self.band_top..self.band_bottom).contains(&y)
    }

    pub fn image(&self) -> ImageRGB {
        ImageRGB::from_fn(self.width, self.height, |x, y| {
            if self.in_band(y) {
                self.band_texel(x as i64, y)
            } else {
                self.static_texel(y)
            }
        })
    }

    pub fn mask(&self) -> Mask {
        Mask::from_fn(self.width, self.height, |_, y| self.in_band(y) as u8)
    }

    /// Raw motion field before mask refinement: one pixel/frame rightward in
    /// the band, plus a spurious drift in the static region of the kind mask
    /// refinement exists to remove. With the mask applied the band translates
    /// cleanly; without it the static drift corrupts the rendered frames.
    pub fn flow(&self) -> FlowField {
        let band_top = self.band_top;
        let band_bottom = self.band_bottom;
        FlowField::from_fn(self.width, self.height, |_, y| {
            if (band_top..band_bottom).contains(&y) {
                (1.0, 0.0)
            } else {
                (1.0, 0.75)
            }
        })
    }

    /// The analytic frame at time t: band translated by t pixels, statics
    /// untouched.
    pub fn ground_truth_frame(&self, t: usize) -> ImageRGB {
        ImageRGB::from_fn(self.width, self.height, |x, y| {
            if self.in_band(y) {
                self.band_texel(x as i64 - t as i64, y)
            } else {
                self.static_texel(y)
            }
        })
    }

    pub fn job(&self, levels: usize) -> CinemagraphJob {
        CinemagraphJob {
            image: self.image(),
            mask: self.mask(),
            flow: self.flow(),
            spec: LoopSpec::new(self.period).expect("period is at least 1"),
            levels,
            style: None,
        }
    }
}

//! Per-frame composition and the full looping-video pipeline.
//!
//! A job renders N+1 frames: for each frame index the refined motion field is
//! integrated into future and past displacement fields, the image's feature
//! pyramid is warped along both with the looping weight, the warped pyramid
//! is synthesized into the dynamic image, and the dynamic region is pasted
//! over the (optionally color-shifted) static input.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{self, DisplacementField, FlowField, LoopSpec};
use crate::mask::Mask;
use crate::pyramid::{self, FeaturePyramid, ImageRGB};
use crate::style::{self, StyleParams};
use crate::warp;

/// Everything needed to render one looping video.
#[derive(Debug, Clone)]
pub struct CinemagraphJob {
    /// Input still image; frames are rendered at its resolution.
    pub image: ImageRGB,
    /// Static/dynamic segmentation; resampled (nearest) to the image and to
    /// the flow resolution where needed.
    pub mask: Mask,
    /// Eulerian motion field at its own base resolution.
    pub flow: FlowField,
    /// Loop length N (N+1 output frames).
    pub spec: LoopSpec,
    /// Pyramid depth.
    pub levels: usize,
    /// Optional appearance shift applied to both regions.
    pub style: Option<StyleParams>,
}

/// Paste the dynamic image over the static one: mask⊙dynamic +
/// (1−mask)⊙(image + delta), clamped to [0, 1] once at the end.
pub fn composite_frame(
    dynamic: &ImageRGB,
    image: &ImageRGB,
    mask: &Mask,
    delta: Option<&ImageRGB>,
) -> Result<ImageRGB> {
    let shape = (image.width(), image.height());
    if (dynamic.width(), dynamic.height()) != shape {
        return Err(Error::ShapeMismatch { expected: shape, actual: (dynamic.width(), dynamic.height()) });
    }
    if (mask.width(), mask.height()) != shape {
        return Err(Error::ShapeMismatch { expected: shape, actual: (mask.width(), mask.height()) });
    }
    if let Some(d) = delta {
        if (d.width(), d.height()) != shape {
            return Err(Error::ShapeMismatch { expected: shape, actual: (d.width(), d.height()) });
        }
    }
    let mut data = Vec::with_capacity(image.data().len());
    for (i, (px_dyn, px_img)) in dynamic
        .data()
        .chunks_exact(3)
        .zip(image.data().chunks_exact(3))
        .enumerate()
    {
        if mask.data()[i] == 1 {
            for &v in px_dyn {
                data.push(v.clamp(0.0, 1.0));
            }
        } else {
            for (c, &v) in px_img.iter().enumerate() {
                let v = match delta {
                    Some(d) => v + d.data()[i * 3 + c],
                    None => v,
                };
                data.push(v.clamp(0.0, 1.0));
            }
        }
    }
    ImageRGB::from_data(image.width(), image.height(), data)
}

/// Preprocessed state shared by every frame of a job: the analyzed pyramid,
/// the mask-refined flow, resampled masks, and the static-region color delta.
/// Frames are independent given a plan, so callers may render them in any
/// order (or in parallel) with results identical to sequential rendering.
#[derive(Debug, Clone)]
pub struct RenderPlan {
    image: ImageRGB,
    image_mask: Mask,
    refined_flow: FlowField,
    pyramid: FeaturePyramid,
    spec: LoopSpec,
    style: Option<StyleParams>,
    delta: Option<ImageRGB>,
}

impl RenderPlan {
    pub fn new(job: &CinemagraphJob) -> Result<Self> {
        let image_mask = job.mask.resize_nearest(job.image.width(), job.image.height());
        let flow_mask = job.mask.resize_nearest(job.flow.width(), job.flow.height());
        let refined_flow = field::apply_mask(&job.flow, &flow_mask)?;
        let pyramid = pyramid::analyze(&job.image, job.levels)?;
        let delta = job.style.as_ref().map(|params| style::style_delta(&job.image, params));
        Ok(Self {
            image: job.image.clone(),
            image_mask,
            refined_flow,
            pyramid,
            spec: job.spec,
            style: job.style,
            delta,
        })
    }

    pub fn frame_count(&self) -> usize {
        self.spec.frame_count()
    }

    pub fn spec(&self) -> &LoopSpec {
        &self.spec
    }

    /// Render frame `t` (0 ≤ t ≤ N). Failures carry the frame index.
    pub fn frame(&self, t: usize) -> Result<ImageRGB> {
        self.frame_inner(t)
            .map_err(|source| Error::Frame { index: t, source: Box::new(source) })
    }

    fn frame_inner(&self, t: usize) -> Result<ImageRGB> {
        let (forward, backward) = field::loop_displacements(&self.refined_flow, &self.spec, t)?;
        let alpha = self.spec.looping_weight(t);
        let warped = warp::warp_pyramid(&self.pyramid, &forward, &backward, alpha)?;
        let mut dynamic = pyramid::synthesize(&warped)?;
        if let Some(params) = &self.style {
            dynamic = style::apply_style(&dynamic, params);
        }
        composite_frame(&dynamic, &self.image, &self.image_mask, self.delta.as_ref())
    }

    /// Displacement fields for frame `t`, exposed for evaluation variants.
    pub fn displacements(&self, t: usize) -> Result<(DisplacementField, DisplacementField)> {
        field::loop_displacements(&self.refined_flow, &self.spec, t)
    }
}

/// Render the whole loop sequentially: N+1 frames, index order.
pub fn render_loop(job: &CinemagraphJob) -> Result<Vec<ImageRGB>> {
    let plan = RenderPlan::new(job)?;
    (0..plan.frame_count()).map(|t| plan.frame(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::constant_flow;
    use crate::metrics;
    use cineloop_testkit as testkit;

    fn test_job(seed: u64) -> CinemagraphJob {
        let data = testkit::structured_image(32, 32, seed);
        let image = ImageRGB::from_data(32, 32, data).unwrap();
        let mask = Mask::from_fn(32, 32, |_, y| (8..24).contains(&y) as u8);
        CinemagraphJob {
            image,
            mask,
            flow: constant_flow(32, 32, 0.5, 0.0),
            spec: LoopSpec::new(4).unwrap(),
            levels: 3,
            style: None,
        }
    }

    #[test]
    fn composite_all_static_returns_input() {
        let job = test_job(1);
        let dynamic = ImageRGB::constant(32, 32, [0.1; 3]);
        let out = composite_frame(&dynamic, &job.image, &Mask::filled(32, 32, 0), None).unwrap();
        assert_eq!(out.data(), job.image.data());
    }

    #[test]
    fn composite_all_dynamic_returns_dynamic() {
        let job = test_job(2);
        let dynamic = ImageRGB::constant(32, 32, [0.1; 3]);
        let out = composite_frame(&dynamic, &job.image, &Mask::filled(32, 32, 1), None).unwrap();
        assert_eq!(out.data(), dynamic.data());
    }

    #[test]
    fn composite_checkerboard_elementwise() {
        let job = test_job(3);
        let dynamic = ImageRGB::constant(32, 32, [0.25; 3]);
        let mask = Mask::from_fn(32, 32, |x, y| ((x + y) % 2) as u8);
        let delta = ImageRGB::constant(32, 32, [0.1; 3]);
        let out = composite_frame(&dynamic, &job.image, &mask, Some(&delta)).unwrap();
        for y in 0..32 {
            for x in 0..32 {
                let got = out.get(x, y);
                for (c, &g) in got.iter().enumerate() {
                    let expected = if (x + y) % 2 == 1 {
                        0.25f32.clamp(0.0, 1.0)
                    } else {
                        (job.image.get(x, y)[c] + 0.1).clamp(0.0, 1.0)
                    };
                    assert_eq!(g, expected);
                }
            }
        }
    }

    #[test]
    fn zero_motion_every_frame_equals_input() {
        let mut job = test_job(4);
        job.flow = constant_flow(32, 32, 0.0, 0.0);
        let frames = render_loop(&job).unwrap();
        assert_eq!(frames.len(), 5);
        for frame in &frames {
            let max = frame
                .data()
                .iter()
                .zip(job.image.data())
                .fold(0.0f32, |m, (a, b)| m.max((a - b).abs()));
            assert!(max <= 1e-6, "deviation {max}");
        }
    }

    #[test]
    fn loop_endpoints_match() {
        let job = test_job(5);
        let frames = render_loop(&job).unwrap();
        let gap = metrics::loop_gap(&frames).unwrap();
        assert!(gap <= 1e-4, "loop gap {gap}");
    }

    #[test]
    fn static_pixels_track_input_exactly() {
        let job = test_job(6);
        let frames = render_loop(&job).unwrap();
        for frame in &frames {
            for y in 0..32 {
                for x in 0..32 {
                    if job.mask.get(x, y) == 0 {
                        let got = frame.get(x, y);
                        let want = job.image.get(x, y);
                        for c in 0..3 {
                            assert!((got[c] - want[c]).abs() <= 1e-6);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn static_pixels_track_styled_input_with_delta() {
        let mut job = test_job(7);
        let target = ImageRGB::constant(8, 8, [0.9, 0.2, 0.4]);
        job.style = Some(style::fit_style(&target).with_beta(0.6).unwrap());
        let plan = RenderPlan::new(&job).unwrap();
        let delta = style::style_delta(&job.image, job.style.as_ref().unwrap());
        let frame = plan.frame(2).unwrap();
        for y in 0..32 {
            for x in 0..32 {
                if job.mask.get(x, y) == 0 {
                    let got = frame.get(x, y);
                    for (c, &g) in got.iter().enumerate() {
                        let want = (job.image.get(x, y)[c] + delta.get(x, y)[c]).clamp(0.0, 1.0);
                        assert_eq!(g, want);
                    }
                }
            }
        }
    }

    #[test]
    fn frame_count_and_dimensions() {
        let job = test_job(8);
        let frames = render_loop(&job).unwrap();
        assert_eq!(frames.len(), job.spec.frame_count());
        for f in &frames {
            assert_eq!((f.width(), f.height()), (32, 32));
        }
    }

    #[test]
    fn frame_error_carries_index() {
        let job = test_job(9);
        let plan = RenderPlan::new(&job).unwrap();
        match plan.frame(99) {
            Err(Error::Frame { index: 99, source }) => {
                assert!(matches!(*source, Error::FrameOutOfRange { .. }));
            }
            other => panic!("expected frame error, got {other:?}"),
        }
    }

    #[test]
    fn flow_at_coarser_base_resolution_renders_and_loops() {
        // the flow's base resolution differs from the image's; displacement
        // fields are rescaled to each pyramid level during warping
        let mut job = test_job(11);
        job.flow = constant_flow(16, 16, 0.25, 0.0);
        let frames = render_loop(&job).unwrap();
        assert_eq!(frames.len(), 5);
        assert!(metrics::loop_gap(&frames).unwrap() <= 1e-4);
        for frame in &frames {
            for y in 0..8 {
                for x in 0..32 {
                    let got = frame.get(x, y);
                    let want = job.image.get(x, y);
                    for c in 0..3 {
                        assert!((got[c] - want[c]).abs() <= 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn mask_resampled_from_other_resolution() {
        let mut job = test_job(10);
        job.mask = Mask::from_fn(16, 16, |_, y| (4..12).contains(&y) as u8);
        let frames = render_loop(&job).unwrap();
        assert_eq!(frames.len(), 5);
        // rows 0..8 of the 32×32 image are static under nearest resampling
        for frame in &frames {
            for x in 0..32 {
                let got = frame.get(x, 2);
                let want = job.image.get(x, 2);
                for c in 0..3 {
                    assert!((got[c] - want[c]).abs() <= 1e-6);
                }
            }
        }
    }
}

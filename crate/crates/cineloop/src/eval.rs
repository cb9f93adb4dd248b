//! Ablation harness: renders the bundled translation scene with individual
//! pipeline components disabled and reports RMSE / MS-SSIM of every arm
//! against the full pipeline's frames and against the analytic ground truth.

use anyhow::{bail, Result};
use cineloop_core::compose::{composite_frame, CinemagraphJob};
use cineloop_core::field::{self, DisplacementField};
use cineloop_core::pyramid::{analyze, synthesize, FeatureMap, FeaturePyramid, ImageRGB};
use cineloop_core::{metrics, warp};

use crate::scene::TranslationScene;

/// One pipeline variant of the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    /// The complete pipeline.
    Full,
    /// Backward gathering instead of forward splatting at every level.
    NoForwardWarp,
    /// No feature decomposition: the raw image is warped directly (depth 1).
    NoDeepWarp,
    /// Single-scale feature warping: only the finest level moves.
    NoMultiScale,
    /// The motion field is not refined by the segmentation mask.
    NoMask,
}

impl Arm {
    pub const ALL: [Arm; 5] = [
        Arm::Full,
        Arm::NoForwardWarp,
        Arm::NoDeepWarp,
        Arm::NoMultiScale,
        Arm::NoMask,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Arm::Full => "full",
            Arm::NoForwardWarp => "no_forward_warp",
            Arm::NoDeepWarp => "no_dfw",
            Arm::NoMultiScale => "no_msdfw",
            Arm::NoMask => "no_mask",
        }
    }
}

/// Clamped bilinear lookup of one feature-map cell.
fn gather_bilinear(map: &FeatureMap, x: f64, y: f64, out: &mut [f32]) {
    let w = map.width();
    let h = map.height();
    let x = x.clamp(0.0, (w - 1) as f64);
    let y = y.clamp(0.0, (h - 1) as f64);
    let x0 = (x.floor() as usize).min(w - 1);
    let y0 = (y.floor() as usize).min(h - 1);
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let lerp = |a: f64, b: f64, t: f64| a + t * (b - a);
    for (c, slot) in out.iter_mut().enumerate() {
        let at = |xx: usize, yy: usize| map.sample(xx, yy, c) as f64;
        *slot = lerp(
            lerp(at(x0, y0), at(x1, y0), fx),
            lerp(at(x0, y1), at(x1, y1), fx),
            fy,
        ) as f32;
    }
}

/// The no-forward-warp arm: gather each destination from its negated
/// displacement along both directions and blend with the looping weight.
fn gather_level(
    level: &FeatureMap,
    forward: &DisplacementField,
    backward: &DisplacementField,
    alpha: f32,
) -> FeatureMap {
    let w = level.width();
    let h = level.height();
    let channels = level.channels();
    let mut data = vec![0.0f32; w * h * channels];
    let mut fwd_px = vec![0.0f32; channels];
    let mut bwd_px = vec![0.0f32; channels];
    for y in 0..h {
        for x in 0..w {
            let (fu, fv) = forward.get(x, y);
            let (bu, bv) = backward.get(x, y);
            gather_bilinear(level, x as f64 - fu as f64, y as f64 - fv as f64, &mut fwd_px);
            gather_bilinear(level, x as f64 - bu as f64, y as f64 - bv as f64, &mut bwd_px);
            for c in 0..channels {
                data[(y * w + x) * channels + c] = alpha * fwd_px[c] + (1.0 - alpha) * bwd_px[c];
            }
        }
    }
    FeatureMap::from_data(w, h, channels, data).expect("gathered level is finite")
}

/// Render every frame of `job` under the given ablation arm.
pub fn render_arm(job: &CinemagraphJob, arm: Arm) -> Result<Vec<ImageRGB>> {
    let image_mask = job.mask.resize_nearest(job.image.width(), job.image.height());
    let flow = if arm == Arm::NoMask {
        job.flow.clone()
    } else {
        let flow_mask = job.mask.resize_nearest(job.flow.width(), job.flow.height());
        field::apply_mask(&job.flow, &flow_mask)?
    };
    let levels = if arm == Arm::NoDeepWarp { 1 } else { job.levels };
    let pyramid = analyze(&job.image, levels)?;

    let mut frames = Vec::with_capacity(job.spec.frame_count());
    for t in 0..job.spec.frame_count() {
        let (forward, backward) = field::loop_displacements(&flow, &job.spec, t)?;
        let alpha = job.spec.looping_weight(t);
        let warped = match arm {
            Arm::NoForwardWarp => {
                let levels: Vec<FeatureMap> = pyramid
                    .levels()
                    .iter()
                    .map(|level| {
                        let fwd = warp::rescale_displacement(&forward, level.width(), level.height());
                        let bwd = warp::rescale_displacement(&backward, level.width(), level.height());
                        gather_level(level, &fwd, &bwd, alpha)
                    })
                    .collect();
                FeaturePyramid::from_levels(levels)?
            }
            Arm::NoMultiScale => {
                let mut levels: Vec<FeatureMap> = pyramid.levels().to_vec();
                let finest = levels.len() - 1;
                let level = &pyramid.levels()[finest];
                let fwd = warp::rescale_displacement(&forward, level.width(), level.height());
                let bwd = warp::rescale_displacement(&backward, level.width(), level.height());
                let (warped, holes) = warp::joint_splat(level, &fwd, &bwd, alpha)?;
                levels[finest] = warp::fill_holes(&warped, &holes, warp::LARGE_HOLE_RATIO)?;
                FeaturePyramid::from_levels(levels)?
            }
            _ => warp::warp_pyramid(&pyramid, &forward, &backward, alpha)?,
        };
        let dynamic = synthesize(&warped)?;
        frames.push(composite_frame(&dynamic, &job.image, &image_mask, None)?);
    }
    Ok(frames)
}

#[derive(Debug, Clone)]
pub struct EvalRow {
    pub method: &'static str,
    pub metric: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn value(&self, method: &str, metric: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.metric == metric)
            .map(|r| r.value)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,metric,value\n");
        for row in &self.rows {
            out.push_str(&format!("{},{},{:.6}\n", row.method, row.metric, row.value));
        }
        out
    }
}

fn mean_metrics(frames: &[ImageRGB], reference: &[ImageRGB]) -> Result<(f64, f64)> {
    if frames.len() != reference.len() || frames.is_empty() {
        bail!("frame sets must be non-empty and equal length");
    }
    let mut rmse_sum = 0.0;
    let mut ssim_sum = 0.0;
    for (a, b) in frames.iter().zip(reference) {
        rmse_sum += metrics::rmse(a, b, None)?;
        ssim_sum += metrics::ms_ssim(a, b)?;
    }
    let n = frames.len() as f64;
    Ok((rmse_sum / n, ssim_sum / n))
}

/// Run the whole ablation study on the bundled translation scene. The report
/// has one row per arm × metric, measured against both the full pipeline's
/// frames and the analytic ground truth.
pub fn run_eval(width: usize, height: usize, n: usize, levels: usize) -> Result<EvalReport> {
    let scene = TranslationScene::new(width, height, n);
    let job = scene.job(levels);
    let ground_truth: Vec<ImageRGB> = (0..=n).map(|t| scene.ground_truth_frame(t)).collect();
    let full_frames = render_arm(&job, Arm::Full)?;

    let mut rows = Vec::new();
    for arm in Arm::ALL {
        let frames = if arm == Arm::Full {
            full_frames.clone()
        } else {
            render_arm(&job, arm)?
        };
        let (rmse_full, ssim_full) = mean_metrics(&frames, &full_frames)?;
        let (rmse_gt, ssim_gt) = mean_metrics(&frames, &ground_truth)?;
        rows.push(EvalRow { method: arm.name(), metric: "rmse_vs_full", value: rmse_full });
        rows.push(EvalRow { method: arm.name(), metric: "ms_ssim_vs_full", value: ssim_full });
        rows.push(EvalRow { method: arm.name(), metric: "rmse_vs_gt", value: rmse_gt });
        rows.push(EvalRow { method: arm.name(), metric: "ms_ssim_vs_gt", value: ssim_gt });
    }
    Ok(EvalReport { rows })
}

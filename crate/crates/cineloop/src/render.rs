//! Frame-parallel rendering driver. Frames of a plan are independent, so a
//! parallel map over the frame index is bit-identical to sequential
//! rendering; `CINELOOP_THREADS` caps the pool size.

use anyhow::{Context, Result};
use cineloop_core::compose::{CinemagraphJob, RenderPlan};
use cineloop_core::ImageRGB;
use rayon::prelude::*;

/// Thread cap from the `CINELOOP_THREADS` environment variable, if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var("CINELOOP_THREADS") {
        Ok(value) => {
            let n: usize = value
                .trim()
                .parse()
                .with_context(|| format!("CINELOOP_THREADS must be an integer, got {value:?}"))?;
            Ok(Some(n.max(1)))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(e).context("reading CINELOOP_THREADS"),
    }
}

/// Render all N+1 frames of a job, fanning out across frames.
pub fn render_frames(job: &CinemagraphJob) -> Result<Vec<ImageRGB>> {
    let plan = RenderPlan::new(job)?;
    let count = plan.frame_count();
    let frames = match thread_cap()? {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .context("building thread pool")?;
            pool.install(|| {
                (0..count)
                    .into_par_iter()
                    .map(|t| plan.frame(t))
                    .collect::<Result<Vec<_>, _>>()
            })?
        }
        None => (0..count)
            .into_par_iter()
            .map(|t| plan.frame(t))
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok(frames)
}

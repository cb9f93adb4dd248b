//! Core algorithms for synthesizing seamlessly looping cinemagraphs from a
//! still image, a dynamic-region mask, and an Eulerian motion field.
//!
//! The pipeline: refine the motion field with the mask, Euler-integrate it
//! into future and past displacement fields per frame, forward-warp an
//! invertible multi-scale feature pyramid of the image along both directions
//! at once (joint splatting, weighted by the looping weight), fill splat
//! holes, synthesize the dynamic image, and composite it over the static
//! input. The crate is `no_std` + `alloc`; file formats and the CLI live in
//! the companion `cineloop` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod compose;
pub mod error;
pub mod field;
pub mod flow;
pub mod mask;
mod math;
pub mod metrics;
pub mod pyramid;
pub mod style;
pub mod warp;

pub use compose::{CinemagraphJob, RenderPlan};
pub use error::{Error, Result};
pub use field::{DisplacementField, FlowField, LoopSpec};
pub use mask::Mask;
pub use pyramid::{FeatureMap, FeaturePyramid, ImageRGB};
pub use style::StyleParams;
pub use warp::{HoleMask, SplatAccumulator};

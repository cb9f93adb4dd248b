//! Procedural motion-field generators for authoring and testing.

use crate::field::FlowField;

/// Uniform velocity everywhere.
pub fn constant_flow(width: usize, height: usize, u: f32, v: f32) -> FlowField {
    FlowField::from_fn(width, height, |_, _| (u, v))
}

/// Rigid rotation around (cx, cy): cell (x, y) gets the tangential velocity
/// ω·(−(y−cy), (x−cx)).
pub fn rotation_flow(width: usize, height: usize, cx: f32, cy: f32, omega: f32) -> FlowField {
    FlowField::from_fn(width, height, |x, y| {
        let dx = x as f32 - cx;
        let dy = y as f32 - cy;
        (-omega * dy, omega * dx)
    })
}

/// Radial expansion (k > 0) or contraction (k < 0) around (cx, cy).
pub fn radial_flow(width: usize, height: usize, cx: f32, cy: f32, k: f32) -> FlowField {
    FlowField::from_fn(width, height, |x, y| (k * (x as f32 - cx), k * (y as f32 - cy)))
}

//! Flow visualization: hue encodes direction, saturation encodes magnitude
//! normalized to the field's maximum. A zero field renders white.

use cineloop_core::{FlowField, ImageRGB};

fn hsv_to_rgb(h_deg: f32, s: f32, v: f32) -> [f32; 3] {
    let c = v * s;
    let hp = (h_deg / 60.0).rem_euclid(6.0);
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [r + m, g + m, b + m]
}

/// Render a flow field with the HSV wheel encoding.
pub fn flow_wheel(field: &FlowField) -> ImageRGB {
    let mut max_mag = 0.0f32;
    for cell in field.data().chunks_exact(2) {
        max_mag = max_mag.max((cell[0] * cell[0] + cell[1] * cell[1]).sqrt());
    }
    ImageRGB::from_fn(field.width(), field.height(), |x, y| {
        let (u, v) = field.get(x, y);
        let mag = (u * u + v * v).sqrt();
        if max_mag == 0.0 || mag == 0.0 {
            return [1.0, 1.0, 1.0];
        }
        let hue = v.atan2(u).to_degrees().rem_euclid(360.0);
        hsv_to_rgb(hue, mag / max_mag, 1.0)
    })
}

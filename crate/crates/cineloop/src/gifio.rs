//! Deterministic animated GIF output: fixed 6×6×6 RGB cube palette, no
//! dithering, infinite loop. Byte-identical for identical frames.

use std::fs::File;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use cineloop_core::ImageRGB;

use crate::pngio::quantize;

const LEVELS: u16 = 6;

fn cube_palette() -> Vec<u8> {
    let mut palette = Vec::with_capacity((LEVELS * LEVELS * LEVELS) as usize * 3);
    for r in 0..LEVELS {
        for g in 0..LEVELS {
            for b in 0..LEVELS {
                palette.push((r * 51) as u8);
                palette.push((g * 51) as u8);
                palette.push((b * 51) as u8);
            }
        }
    }
    palette
}

#[inline]
fn level_of(byte: u8) -> u16 {
    ((byte as u16 * (LEVELS - 1) + 127) / 255).min(LEVELS - 1)
}

#[inline]
fn palette_index(r: u8, g: u8, b: u8) -> u8 {
    (level_of(r) * LEVELS * LEVELS + level_of(g) * LEVELS + level_of(b)) as u8
}

/// Write frames as a looping GIF with a constant per-frame delay in
/// hundredths of a second.
pub fn write_gif(path: impl AsRef<Path>, frames: &[ImageRGB], delay_cs: u16) -> Result<()> {
    ensure!(!frames.is_empty(), "no frames to encode");
    let width = frames[0].width();
    let height = frames[0].height();
    ensure!(
        width <= u16::MAX as usize && height <= u16::MAX as usize,
        "frame dimensions exceed the GIF limit"
    );
    let file = File::create(path.as_ref())
        .with_context(|| format!("creating {}", path.as_ref().display()))?;
    let mut encoder = gif::Encoder::new(file, width as u16, height as u16, &cube_palette())?;
    encoder.set_repeat(gif::Repeat::Infinite)?;
    for frame in frames {
        ensure!(
            frame.width() == width && frame.height() == height,
            "all frames must share one resolution"
        );
        let buffer: Vec<u8> = frame
            .data()
            .chunks_exact(3)
            .map(|px| palette_index(quantize(px[0]), quantize(px[1]), quantize(px[2])))
            .collect();
        let mut gif_frame = gif::Frame {
            width: width as u16,
            height: height as u16,
            buffer: buffer.into(),
            delay: delay_cs,
            ..Default::default()
        };
        gif_frame.make_lzw_pre_encoded();
        encoder.write_lzw_pre_encoded_frame(&gif_frame)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_inputs_produce_identical_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let frames: Vec<ImageRGB> = (0..3)
            .map(|i| ImageRGB::constant(16, 8, [i as f32 * 0.3, 0.5, 1.0 - i as f32 * 0.2]))
            .collect();
        let a = dir.path().join("a.gif");
        let b = dir.path().join("b.gif");
        write_gif(&a, &frames, 4).unwrap();
        write_gif(&b, &frames, 4).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }

    #[test]
    fn palette_index_hits_cube_corners() {
        assert_eq!(palette_index(0, 0, 0), 0);
        assert_eq!(palette_index(255, 255, 255), 215);
        assert_eq!(palette_index(255, 0, 0), 180);
    }
}

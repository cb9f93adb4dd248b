//! Reference oracles and deterministic fixtures for the cineloop test suites.
//!
//! Everything here is written as plainly as possible — scalar loops, full
//! sorts, f64 accumulation — and operates on raw slices so it shares no code
//! with the crates under test. Expected values asserted elsewhere in the
//! workspace were computed by these functions.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Seeded RNG so every suite draws identical fixtures run to run.
pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform random buffer in `[lo, hi)`, row-major, `channels` interleaved.
pub fn uniform_buffer(rng: &mut StdRng, w: usize, h: usize, channels: usize, lo: f32, hi: f32) -> Vec<f32> {
    (0..w * h * channels).map(|_| rng.random_range(lo..hi)).collect()
}

fn clamp_f64(v: f64, lo: f64, hi: f64) -> f64 {
    if v < lo {
        lo
    } else if v > hi {
        hi
    } else {
        v
    }
}

/// Four-tap bilinear lookup of a 2-channel grid, written as the textbook
/// weighted sum (w00·v00 + w01·v01 + w10·v10 + w11·v11) with border clamping.
pub fn bilinear2_reference(data: &[f32], w: usize, h: usize, x: f64, y: f64) -> (f64, f64) {
    let x = clamp_f64(x, 0.0, (w - 1) as f64);
    let y = clamp_f64(y, 0.0, (h - 1) as f64);
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let w00 = (1.0 - fx) * (1.0 - fy);
    let w01 = fx * (1.0 - fy);
    let w10 = (1.0 - fx) * fy;
    let w11 = fx * fy;
    let at = |xx: usize, yy: usize, c: usize| data[(yy * w + xx) * 2 + c] as f64;
    let u = w00 * at(x0, y0, 0) + w01 * at(x1, y0, 0) + w10 * at(x0, y1, 0) + w11 * at(x1, y1, 0);
    let v = w00 * at(x0, y0, 1) + w01 * at(x1, y0, 1) + w10 * at(x0, y1, 1) + w11 * at(x1, y1, 1);
    (u, v)
}

/// Per-pixel Euler integration of a velocity grid: each pixel independently
/// walks `steps` times, sampling the velocity at its displaced position.
/// Returns the accumulated displacement as interleaved (u, v) f32.
pub fn integrate_reference(flow: &[f32], w: usize, h: usize, steps: usize) -> Vec<f32> {
    let mut out = vec![0.0f32; w * h * 2];
    for y in 0..h {
        for x in 0..w {
            let mut du = 0.0f64;
            let mut dv = 0.0f64;
            for _ in 0..steps {
                let (su, sv) = bilinear2_reference(flow, w, h, x as f64 + du, y as f64 + dv);
                du += su;
                dv += sv;
            }
            out[(y * w + x) * 2] = du as f32;
            out[(y * w + x) * 2 + 1] = dv as f32;
        }
    }
    out
}

/// One splat direction accumulated exhaustively in f64: every
/// (source pixel, neighbor) contribution is enumerated and summed.
#[allow(clippy::too_many_arguments)]
fn splat_accumulate(
    features: &[f32],
    w: usize,
    h: usize,
    channels: usize,
    field: &[f32],
    weight_scale: f64,
    feat_sum: &mut [f64],
    weight_sum: &mut [f64],
) {
    for y in 0..h {
        for x in 0..w {
            let px = x as f64 + field[(y * w + x) * 2] as f64;
            let py = y as f64 + field[(y * w + x) * 2 + 1] as f64;
            let x0 = px.floor();
            let y0 = py.floor();
            let fx = px - x0;
            let fy = py - y0;
            let corners = [
                (x0 as i64, y0 as i64, (1.0 - fx) * (1.0 - fy)),
                (x0 as i64 + 1, y0 as i64, fx * (1.0 - fy)),
                (x0 as i64, y0 as i64 + 1, (1.0 - fx) * fy),
                (x0 as i64 + 1, y0 as i64 + 1, fx * fy),
            ];
            for (cx, cy, bw) in corners {
                if cx < 0 || cy < 0 || cx >= w as i64 || cy >= h as i64 {
                    continue;
                }
                let dst = cy as usize * w + cx as usize;
                let contrib = bw * weight_scale;
                weight_sum[dst] += contrib;
                for c in 0..channels {
                    feat_sum[dst * channels + c] += features[(y * w + x) * channels + c] as f64 * contrib;
                }
            }
        }
    }
}

/// Exhaustive-contribution oracle for bidirectional joint splatting.
/// Returns (features, hole mask) with destinations below `eps` total weight
/// marked as holes and left zero.
#[allow(clippy::too_many_arguments)]
pub fn joint_splat_reference(
    features: &[f32],
    w: usize,
    h: usize,
    channels: usize,
    forward: &[f32],
    backward: &[f32],
    alpha: f64,
    eps: f64,
) -> (Vec<f32>, Vec<u8>) {
    let mut feat_sum = vec![0.0f64; w * h * channels];
    let mut weight_sum = vec![0.0f64; w * h];
    splat_accumulate(features, w, h, channels, forward, alpha, &mut feat_sum, &mut weight_sum);
    splat_accumulate(features, w, h, channels, backward, 1.0 - alpha, &mut feat_sum, &mut weight_sum);
    let mut out = vec![0.0f32; w * h * channels];
    let mut holes = vec![0u8; w * h];
    for i in 0..w * h {
        if weight_sum[i] < eps {
            holes[i] = 1;
        } else {
            for c in 0..channels {
                out[i * channels + c] = (feat_sum[i * channels + c] / weight_sum[i]) as f32;
            }
        }
    }
    (out, holes)
}

/// Lower median of a value list: element at index (k−1)/2 of the full sort.
pub fn lower_median(values: &mut [f32]) -> f32 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values[(values.len() - 1) / 2]
}

/// Brute-force 7×7 median hole filling with snapshot-per-pass semantics:
/// each pass computes, for every remaining hole pixel, the per-channel lower
/// median of the values that were non-hole when the pass started; pixels with
/// no support in their window are deferred to the next pass.
pub fn median_fill_reference(features: &[f32], w: usize, h: usize, channels: usize, holes: &[u8]) -> Vec<f32> {
    let mut data: Vec<f32> = features.to_vec();
    let mut hole: Vec<u8> = holes.to_vec();
    loop {
        let snapshot_data = data.clone();
        let snapshot_hole = hole.clone();
        let mut progressed = false;
        let mut remaining = false;
        for y in 0..h {
            for x in 0..w {
                if snapshot_hole[y * w + x] == 0 {
                    continue;
                }
                let mut window: Vec<(usize, usize)> = Vec::new();
                for dy in -3i64..=3 {
                    for dx in -3i64..=3 {
                        let nx = x as i64 + dx;
                        let ny = y as i64 + dy;
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        if snapshot_hole[ny as usize * w + nx as usize] == 0 {
                            window.push((nx as usize, ny as usize));
                        }
                    }
                }
                if window.is_empty() {
                    remaining = true;
                    continue;
                }
                for c in 0..channels {
                    let mut vals: Vec<f32> = window
                        .iter()
                        .map(|&(nx, ny)| snapshot_data[(ny * w + nx) * channels + c])
                        .collect();
                    data[(y * w + x) * channels + c] = lower_median(&mut vals);
                }
                hole[y * w + x] = 0;
                progressed = true;
            }
        }
        if !remaining {
            break;
        }
        assert!(progressed, "median fill reference stalled");
    }
    data
}

/// Scalar-loop RMSE on the 0–255 scale, optionally restricted to mask=1 pixels.
pub fn rmse_reference(a: &[f32], b: &[f32], w: usize, h: usize, mask: Option<&[u8]>) -> f64 {
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for i in 0..w * h {
        if let Some(m) = mask {
            if m[i] == 0 {
                continue;
            }
        }
        for c in 0..3 {
            let d = (a[i * 3 + c] as f64 - b[i * 3 + c] as f64) * 255.0;
            sum += d * d;
            count += 1;
        }
    }
    assert!(count > 0, "rmse reference: empty support");
    (sum / count as f64).sqrt()
}

// ---------------------------------------------------------------------------
// MS-SSIM formula transcription
// ---------------------------------------------------------------------------

const MSSSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
const WINDOW: usize = 11;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

fn gaussian_window() -> Vec<f64> {
    let sigma = 1.5f64;
    let mut win = vec![0.0f64; WINDOW * WINDOW];
    let mut sum = 0.0;
    for y in 0..WINDOW {
        for x in 0..WINDOW {
            let dx = x as f64 - 5.0;
            let dy = y as f64 - 5.0;
            let g = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            win[y * WINDOW + x] = g;
            sum += g;
        }
    }
    for v in &mut win {
        *v /= sum;
    }
    win
}

fn luminance_plane(rgb: &[f32], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            0.299 * rgb[i * 3] as f64 + 0.587 * rgb[i * 3 + 1] as f64 + 0.114 * rgb[i * 3 + 2] as f64
        })
        .collect()
}

fn downsample2_mean(plane: &[f64], w: usize, h: usize) -> (Vec<f64>, usize, usize) {
    let nw = w / 2;
    let nh = h / 2;
    let mut out = vec![0.0f64; nw * nh];
    for y in 0..nh {
        for x in 0..nw {
            let s = plane[2 * y * w + 2 * x]
                + plane[2 * y * w + 2 * x + 1]
                + plane[(2 * y + 1) * w + 2 * x]
                + plane[(2 * y + 1) * w + 2 * x + 1];
            out[y * nw + x] = s * 0.25;
        }
    }
    (out, nw, nh)
}

/// Mean luminance and contrast-structure terms of one scale, computed with
/// direct per-window loops over every valid 11×11 position.
fn ssim_terms(a: &[f64], b: &[f64], w: usize, h: usize) -> (f64, f64) {
    let win = gaussian_window();
    let c1 = K1 * K1;
    let c2 = K2 * K2;
    let mut lum_sum = 0.0f64;
    let mut cs_sum = 0.0f64;
    let mut count = 0usize;
    for y0 in 0..=(h - WINDOW) {
        for x0 in 0..=(w - WINDOW) {
            let mut mu_a = 0.0;
            let mut mu_b = 0.0;
            let mut aa = 0.0;
            let mut bb = 0.0;
            let mut ab = 0.0;
            for wy in 0..WINDOW {
                for wx in 0..WINDOW {
                    let g = win[wy * WINDOW + wx];
                    let va = a[(y0 + wy) * w + (x0 + wx)];
                    let vb = b[(y0 + wy) * w + (x0 + wx)];
                    mu_a += g * va;
                    mu_b += g * vb;
                    aa += g * va * va;
                    bb += g * vb * vb;
                    ab += g * va * vb;
                }
            }
            let var_a = aa - mu_a * mu_a;
            let var_b = bb - mu_b * mu_b;
            let cov = ab - mu_a * mu_b;
            lum_sum += (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1);
            cs_sum += (2.0 * cov + c2) / (var_a + var_b + c2);
            count += 1;
        }
    }
    (lum_sum / count as f64, cs_sum / count as f64)
}

/// MS-SSIM transcribed directly from the published formulation: per scale the
/// contrast-structure term, luminance folded in at the coarsest scale, scale
/// count reduced (weights renormalized) when the image cannot support five.
pub fn ms_ssim_reference(a_rgb: &[f32], b_rgb: &[f32], w: usize, h: usize) -> f64 {
    assert!(w >= WINDOW && h >= WINDOW, "image below one window");
    let mut scales = 1usize;
    let (mut sw, mut sh) = (w, h);
    while scales < 5 && sw / 2 >= WINDOW && sh / 2 >= WINDOW {
        sw /= 2;
        sh /= 2;
        scales += 1;
    }
    let weight_sum: f64 = MSSSIM_WEIGHTS[..scales].iter().sum();

    let mut a = luminance_plane(a_rgb, w * h);
    let mut b = luminance_plane(b_rgb, w * h);
    let (mut cw, mut ch) = (w, h);
    let mut result = 1.0f64;
    for (s, &raw_weight) in MSSSIM_WEIGHTS[..scales].iter().enumerate() {
        let (lum, cs) = ssim_terms(&a, &b, cw, ch);
        let weight = raw_weight / weight_sum;
        if s == scales - 1 {
            result *= (lum * cs).max(0.0).powf(weight);
        } else {
            result *= cs.max(0.0).powf(weight);
            let (na, nw, nh) = downsample2_mean(&a, cw, ch);
            let (nb, _, _) = downsample2_mean(&b, cw, ch);
            a = na;
            b = nb;
            cw = nw;
            ch = nh;
        }
    }
    result.clamp(0.0, 1.0)
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// Paint a single 4-connected blob of exactly `area` pixels with value
/// `label`, filled row by row in a strip `strip_w` wide whose top-left corner
/// is (x0, y0). Panics if it does not fit.
#[allow(clippy::too_many_arguments)]
pub fn paint_blob(mask: &mut [u8], w: usize, h: usize, x0: usize, y0: usize, strip_w: usize, area: usize, label: u8) {
    assert!(strip_w > 0 && x0 + strip_w <= w);
    let mut remaining = area;
    let mut y = y0;
    while remaining > 0 {
        assert!(y < h, "blob does not fit");
        let row = remaining.min(strip_w);
        for x in x0..x0 + row {
            mask[y * w + x] = label;
        }
        remaining -= row;
        y += 1;
    }
}

/// Deterministic smooth-but-structured test image: mixed sinusoids plus a
/// diagonal ramp, channels phase-shifted, values inside [0, 1].
pub fn structured_image(w: usize, h: usize, seed: u64) -> Vec<f32> {
    let s = seed as f64;
    let mut out = vec![0.0f32; w * h * 3];
    for y in 0..h {
        for x in 0..w {
            let xf = x as f64 / w as f64;
            let yf = y as f64 / h as f64;
            for c in 0..3 {
                let phase = c as f64 * 0.7 + s * 0.13;
                let v = 0.5
                    + 0.2 * ((6.0 * xf + phase).sin() * (4.0 * yf + 0.3 * phase).cos())
                    + 0.15 * ((11.0 * (xf + yf) + 1.7 * phase).sin())
                    + 0.1 * (xf - yf);
                out[(y * w + x) * 3 + c] = v.clamp(0.0, 1.0) as f32;
            }
        }
    }
    out
}

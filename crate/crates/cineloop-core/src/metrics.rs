//! Image-similarity metrics for the evaluation harness: RMSE on the 0–255
//! scale, multi-scale structural similarity on the luminance channel, and the
//! first-vs-last frame gap that quantifies loop seamlessness.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mask::Mask;
use crate::math;
use crate::pyramid::ImageRGB;

const MSSSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Root-mean-squared error over (masked) pixels × channels, with values on
/// the 0–255 scale.
pub fn rmse(a: &ImageRGB, b: &ImageRGB, mask: Option<&Mask>) -> Result<f64> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::ShapeMismatch {
            expected: (a.width(), a.height()),
            actual: (b.width(), b.height()),
        });
    }
    if let Some(m) = mask {
        if (m.width(), m.height()) != (a.width(), a.height()) {
            return Err(Error::ShapeMismatch {
                expected: (a.width(), a.height()),
                actual: (m.width(), m.height()),
            });
        }
    }
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for (i, (pa, pb)) in a.data().chunks_exact(3).zip(b.data().chunks_exact(3)).enumerate() {
        if let Some(m) = mask {
            if m.data()[i] == 0 {
                continue;
            }
        }
        for c in 0..3 {
            let d = (pa[c] as f64 - pb[c] as f64) * 255.0;
            sum += d * d;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptySupport);
    }
    Ok(math::sqrt64(sum / count as f64))
}

fn luminance(image: &ImageRGB) -> Vec<f64> {
    image
        .data()
        .chunks_exact(3)
        .map(|px| 0.299 * px[0] as f64 + 0.587 * px[1] as f64 + 0.114 * px[2] as f64)
        .collect()
}

fn gaussian_kernel_1d() -> [f64; WINDOW] {
    let mut k = [0.0f64; WINDOW];
    let mut sum = 0.0;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - (WINDOW as f64 - 1.0) / 2.0;
        *v = math::exp64(-(d * d) / (2.0 * SIGMA * SIGMA));
        sum += *v;
    }
    for v in &mut k {
        *v /= sum;
    }
    k
}

/// Separable valid-region Gaussian filter: output is (w−10)×(h−10).
fn gaussian_valid(plane: &[f64], w: usize, h: usize, kernel: &[f64; WINDOW]) -> (Vec<f64>, usize, usize) {
    let tw = w - WINDOW + 1;
    // horizontal pass: (tw × h)
    let mut tmp = vec![0.0f64; tw * h];
    for y in 0..h {
        for x in 0..tw {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                acc += kv * plane[y * w + x + k];
            }
            tmp[y * tw + x] = acc;
        }
    }
    // vertical pass: (tw × th)
    let th = h - WINDOW + 1;
    let mut out = vec![0.0f64; tw * th];
    for y in 0..th {
        for x in 0..tw {
            let mut acc = 0.0;
            for (k, &kv) in kernel.iter().enumerate() {
                acc += kv * tmp[(y + k) * tw + x];
            }
            out[y * tw + x] = acc;
        }
    }
    (out, tw, th)
}

/// Mean luminance term and mean contrast-structure term of one scale.
fn ssim_terms(a: &[f64], b: &[f64], w: usize, h: usize, kernel: &[f64; WINDOW]) -> (f64, f64) {
    let n = w * h;
    let mut aa = vec![0.0f64; n];
    let mut bb = vec![0.0f64; n];
    let mut ab = vec![0.0f64; n];
    for i in 0..n {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    let (mu_a, tw, th) = gaussian_valid(a, w, h, kernel);
    let (mu_b, _, _) = gaussian_valid(b, w, h, kernel);
    let (e_aa, _, _) = gaussian_valid(&aa, w, h, kernel);
    let (e_bb, _, _) = gaussian_valid(&bb, w, h, kernel);
    let (e_ab, _, _) = gaussian_valid(&ab, w, h, kernel);
    let c1 = K1 * K1;
    let c2 = K2 * K2;
    let mut lum_sum = 0.0;
    let mut cs_sum = 0.0;
    for i in 0..tw * th {
        let ma = mu_a[i];
        let mb = mu_b[i];
        let var_a = e_aa[i] - ma * ma;
        let var_b = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        lum_sum += (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
        cs_sum += (2.0 * cov + c2) / (var_a + var_b + c2);
    }
    let count = (tw * th) as f64;
    (lum_sum / count, cs_sum / count)
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

/// Multi-scale SSIM on the luminance channel: 5 dyadic scales with the
/// published weights (renormalized when the image only supports fewer),
/// 11×11 Gaussian window with σ = 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.
/// Contrast-structure terms are floored at 0 before exponentiation; the
/// result is reported clamped to [0, 1].
pub fn ms_ssim(a: &ImageRGB, b: &ImageRGB) -> Result<f64> {
    let w = a.width();
    let h = a.height();
    if (w, h) != (b.width(), b.height()) {
        return Err(Error::ShapeMismatch { expected: (w, h), actual: (b.width(), b.height()) });
    }
    if w < WINDOW || h < WINDOW {
        return Err(Error::ImageTooSmall { width: w, height: h, min: WINDOW });
    }
    let mut scales = 1usize;
    {
        let (mut sw, mut sh) = (w, h);
        while scales < 5 && sw / 2 >= WINDOW && sh / 2 >= WINDOW {
            sw /= 2;
            sh /= 2;
            scales += 1;
        }
    }
    let weight_sum: f64 = MSSSIM_WEIGHTS[..scales].iter().sum();
    let kernel = gaussian_kernel_1d();

    let mut pa = luminance(a);
    let mut pb = luminance(b);
    let (mut cw, mut ch) = (w, h);
    let mut result = 1.0f64;
    for (s, &raw_weight) in MSSSIM_WEIGHTS[..scales].iter().enumerate() {
        let (lum, cs) = ssim_terms(&pa, &pb, cw, ch, &kernel);
        let weight = raw_weight / weight_sum;
        if s == scales - 1 {
            result *= math::pow64((lum * cs).max(0.0), weight);
        } else {
            result *= math::pow64(cs.max(0.0), weight);
            let (na, nw, nh) = downsample2_mean(&pa, cw, ch);
            let (nb, _, _) = downsample2_mean(&pb, cw, ch);
            pa = na;
            pb = nb;
            cw = nw;
            ch = nh;
        }
    }
    Ok(result.clamp(0.0, 1.0))
}

/// Maximum absolute per-pixel difference between the first and last frame.
pub fn loop_gap(frames: &[ImageRGB]) -> Result<f64> {
    if frames.len() < 2 {
        return Err(Error::EmptySupport);
    }
    let first = &frames[0];
    let last = frames.last().expect("checked above");
    if (first.width(), first.height()) != (last.width(), last.height()) {
        return Err(Error::ShapeMismatch {
            expected: (first.width(), first.height()),
            actual: (last.width(), last.height()),
        });
    }
    let gap = first
        .data()
        .iter()
        .zip(last.data().iter())
        .fold(0.0f64, |m, (a, b)| m.max((*a as f64 - *b as f64).abs()));
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cineloop_testkit as testkit;

    fn random_image(w: usize, h: usize, seed: u64) -> ImageRGB {
        let mut rng = testkit::rng(seed);
        let data = testkit::uniform_buffer(&mut rng, w, h, 3, 0.0, 1.0);
        ImageRGB::from_data(w, h, data).unwrap()
    }

    #[test]
    fn rmse_self_is_zero() {
        let img = random_image(8, 8, 51);
        assert_eq!(rmse(&img, &img, None).unwrap(), 0.0);
    }

    #[test]
    fn rmse_black_vs_white_is_255() {
        let black = ImageRGB::constant(8, 8, [0.0; 3]);
        let white = ImageRGB::constant(8, 8, [1.0; 3]);
        assert!((rmse(&black, &white, None).unwrap() - 255.0).abs() < 1e-9);
    }

    #[test]
    fn rmse_matches_scalar_reference() {
        let a = random_image(8, 8, 52);
        let b = random_image(8, 8, 53);
        let ours = rmse(&a, &b, None).unwrap();
        let expected = testkit::rmse_reference(a.data(), b.data(), 8, 8, None);
        assert!((ours - expected).abs() < 1e-6);
    }

    #[test]
    fn rmse_masked_and_empty_support() {
        let a = random_image(8, 8, 54);
        let b = random_image(8, 8, 55);
        let half = Mask::from_fn(8, 8, |x, _| (x < 4) as u8);
        let ours = rmse(&a, &b, Some(&half)).unwrap();
        let expected = testkit::rmse_reference(a.data(), b.data(), 8, 8, Some(half.data()));
        assert!((ours - expected).abs() < 1e-6);

        let none = Mask::filled(8, 8, 0);
        assert!(matches!(rmse(&a, &b, Some(&none)), Err(Error::EmptySupport)));
    }

    #[test]
    fn ms_ssim_self_is_one() {
        let img = random_image(64, 64, 56);
        let v = ms_ssim(&img, &img).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn ms_ssim_near_identity_under_tiny_offset() {
        let img = ImageRGB::constant(64, 64, [0.5; 3]);
        let offset = ImageRGB::constant(64, 64, [0.5 + 1e-6; 3]);
        let v = ms_ssim(&img, &offset).unwrap();
        assert!(v >= 0.9999, "{v}");
    }

    #[test]
    fn ms_ssim_matches_transcription_reference() {
        let a = ImageRGB::from_data(64, 64, testkit::structured_image(64, 64, 3)).unwrap();
        let shifted = ImageRGB::from_fn(64, 64, |x, y| a.get((x + 2) % 64, y));
        let ours = ms_ssim(&a, &shifted).unwrap();
        let expected = testkit::ms_ssim_reference(a.data(), shifted.data(), 64, 64);
        assert!((ours - expected).abs() < 1e-6, "{ours} vs {expected}");
    }

    #[test]
    fn ms_ssim_is_symmetric() {
        let a = random_image(48, 48, 57);
        let b = random_image(48, 48, 58);
        let ab = ms_ssim(&a, &b).unwrap();
        let ba = ms_ssim(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-9);
    }

    #[test]
    fn ms_ssim_reduces_scales_for_small_images() {
        // 32×32 supports only 2 scales (16 ≥ 11, 8 < 11)
        let a = random_image(32, 32, 59);
        let b = random_image(32, 32, 60);
        let v = ms_ssim(&a, &b).unwrap();
        assert!((0.0..=1.0).contains(&v));
        let expected = testkit::ms_ssim_reference(a.data(), b.data(), 32, 32);
        assert!((v - expected).abs() < 1e-6);
    }

    #[test]
    fn ms_ssim_rejects_tiny_images() {
        let a = random_image(10, 10, 61);
        assert!(matches!(ms_ssim(&a, &a), Err(Error::ImageTooSmall { .. })));
    }

    #[test]
    fn loop_gap_basics() {
        let a = ImageRGB::constant(4, 4, [0.5; 3]);
        let b = ImageRGB::constant(4, 4, [0.75; 3]);
        assert_eq!(loop_gap(&[a.clone(), b.clone(), a.clone()]).unwrap(), 0.0);
        assert!((loop_gap(&[a.clone(), b]).unwrap() - 0.25).abs() < 1e-9);
        assert!(matches!(loop_gap(&[a]), Err(Error::EmptySupport)));
        assert!(matches!(loop_gap(&[]), Err(Error::EmptySupport)));
    }
}

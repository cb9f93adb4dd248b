//! Property tests for the spec-level invariants of the core operations.

use cineloop_core::field::{self, DisplacementField, FlowField};
use cineloop_core::mask::{self, Mask};
use cineloop_core::pyramid::{analyze, synthesize, synthesize_features, ImageRGB};
use cineloop_core::style;
use cineloop_core::warp::{self, HoleMask, HOLE_EPSILON, LARGE_HOLE_RATIO};
use cineloop_core::FeatureMap;
use cineloop_testkit as testkit;
use proptest::prelude::*;

fn flow_strategy(max_dim: usize, amp: f32) -> impl Strategy<Value = (usize, usize, Vec<f32>)> {
    (2..=max_dim, 2..=max_dim).prop_flat_map(move |(w, h)| {
        (
            Just(w),
            Just(h),
            proptest::collection::vec(-amp..amp, w * h * 2),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integrate_matches_reference((w, h, data) in flow_strategy(16, 2.0), steps in 0usize..12) {
        let flow = FlowField::from_data(w, h, data.clone()).unwrap();
        let ours = field::integrate(&flow, steps);
        let reference = testkit::integrate_reference(&data, w, h, steps);
        for (a, b) in ours.data().iter().zip(reference.iter()) {
            prop_assert!((a - b).abs() <= 1e-5, "{a} vs {b}");
        }
    }

    #[test]
    fn integrate_zero_steps_is_zero((w, h, data) in flow_strategy(12, 4.0)) {
        let flow = FlowField::from_data(w, h, data).unwrap();
        prop_assert!(field::integrate(&flow, 0).data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn apply_mask_is_idempotent((w, h, data) in flow_strategy(12, 4.0), seed in 0u64..1000) {
        let flow = FlowField::from_data(w, h, data).unwrap();
        let mut rng = testkit::rng(seed);
        let bits = testkit::uniform_buffer(&mut rng, w, h, 1, 0.0, 1.0);
        let mask = Mask::from_fn(w, h, |x, y| (bits[y * w + x] > 0.5) as u8);
        let once = field::apply_mask(&flow, &mask).unwrap();
        let twice = field::apply_mask(&once, &mask).unwrap();
        prop_assert_eq!(once.data(), twice.data());
    }

    #[test]
    fn sample_bilinear_integer_coords_exact((w, h, data) in flow_strategy(10, 4.0)) {
        let flow = FlowField::from_data(w, h, data).unwrap();
        for y in 0..h {
            for x in 0..w {
                prop_assert_eq!(flow.sample_bilinear(x as f32, y as f32), flow.get(x, y));
            }
        }
    }

    #[test]
    fn joint_splat_matches_exhaustive_reference(
        w in 2usize..=5,
        h in 2usize..=5,
        seed in 0u64..10_000,
        alpha in 0.0f32..=1.0,
    ) {
        let mut rng = testkit::rng(seed);
        let feat = testkit::uniform_buffer(&mut rng, w, h, 2, 0.0, 1.0);
        let fwd_data = testkit::uniform_buffer(&mut rng, w, h, 2, -2.0, 2.0);
        let bwd_data = testkit::uniform_buffer(&mut rng, w, h, 2, -2.0, 2.0);
        let map = FeatureMap::from_data(w, h, 2, feat.clone()).unwrap();
        let fwd = DisplacementField::from_data(w, h, w, h, fwd_data.clone()).unwrap();
        let bwd = DisplacementField::from_data(w, h, w, h, bwd_data.clone()).unwrap();
        let (ours, holes) = warp::joint_splat(&map, &fwd, &bwd, alpha).unwrap();
        let (reference, ref_holes) = testkit::joint_splat_reference(
            &feat, w, h, 2, &fwd_data, &bwd_data, alpha as f64, HOLE_EPSILON as f64,
        );
        prop_assert_eq!(holes.data(), ref_holes.as_slice());
        for (a, b) in ours.data().iter().zip(reference.iter()) {
            prop_assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn splat_conserves_mass_in_bounds(
        w in 4usize..=16,
        h in 4usize..=16,
        seed in 0u64..10_000,
        scale in 0.1f32..=1.0,
    ) {
        let mut rng = testkit::rng(seed);
        let feat = testkit::uniform_buffer(&mut rng, w, h, 1, 0.0, 1.0);
        let raw = testkit::uniform_buffer(&mut rng, w, h, 2, 0.0, 1.0);
        // shrink displacements so every corner of every splat stays in-bounds
        let mut data = vec![0.0f32; w * h * 2];
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) * 2;
                data[i] = raw[i] * ((w - 2) as f32 - x as f32).clamp(0.0, 1.0);
                data[i + 1] = raw[i + 1] * ((h - 2) as f32 - y as f32).clamp(0.0, 1.0);
            }
        }
        let map = FeatureMap::from_data(w, h, 1, feat).unwrap();
        let fieldv = DisplacementField::from_data(w, h, w, h, data).unwrap();
        let acc = warp::splat(&map, &fieldv, scale).unwrap();
        let total: f64 = acc.weights().iter().map(|&v| v as f64).sum();
        let expected = scale as f64 * (w * h) as f64;
        prop_assert!((total - expected).abs() / expected <= 1e-6, "{total} vs {expected}");
    }

    #[test]
    fn rescale_commutes_with_negation(
        (w, h, data) in flow_strategy(16, 3.0),
        tw in 2usize..=24,
        th in 2usize..=24,
    ) {
        let f = DisplacementField::from_data(w, h, w, h, data).unwrap();
        let a = warp::rescale_displacement(&f.negated(), tw, th);
        let b = warp::rescale_displacement(&f, tw, th).negated();
        prop_assert_eq!(a.data(), b.data());
    }

    #[test]
    fn pyramid_round_trip(levels in 1usize..=4, seed in 0u64..10_000) {
        let size = 8usize << (levels - 1); // keeps every level at least 8×8
        let mut rng = testkit::rng(seed);
        let data = testkit::uniform_buffer(&mut rng, size, size, 3, 0.0, 1.0);
        let img = ImageRGB::from_data(size, size, data).unwrap();
        let rec = synthesize(&analyze(&img, levels).unwrap()).unwrap();
        for (a, b) in img.data().iter().zip(rec.data().iter()) {
            prop_assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn pyramid_synthesis_is_linear(seed in 0u64..10_000) {
        let mut rng = testkit::rng(seed);
        let da = testkit::uniform_buffer(&mut rng, 16, 16, 3, 0.0, 1.0);
        let db = testkit::uniform_buffer(&mut rng, 16, 16, 3, 0.0, 1.0);
        let a = ImageRGB::from_data(16, 16, da.clone()).unwrap();
        let b = ImageRGB::from_data(16, 16, db.clone()).unwrap();
        let pa = analyze(&a, 3).unwrap();
        let pb = analyze(&b, 3).unwrap();

        // synthesize(0.5·pa + 0.25·pb) == 0.5·synthesize(pa) + 0.25·synthesize(pb)
        let mixed_levels: Vec<FeatureMap> = pa
            .levels()
            .iter()
            .zip(pb.levels())
            .map(|(la, lb)| {
                let data: Vec<f32> = la
                    .data()
                    .iter()
                    .zip(lb.data())
                    .map(|(x, y)| 0.5 * x + 0.25 * y)
                    .collect();
                FeatureMap::from_data(la.width(), la.height(), 3, data).unwrap()
            })
            .collect();
        let mixed = cineloop_core::FeaturePyramid::from_levels(mixed_levels).unwrap();
        let lhs = synthesize_features(&mixed).unwrap();
        let ra = synthesize_features(&pa).unwrap();
        let rb = synthesize_features(&pb).unwrap();
        for ((l, x), y) in lhs.data().iter().zip(ra.data()).zip(rb.data()) {
            prop_assert!((l - (0.5 * x + 0.25 * y)).abs() <= 1e-6);
        }
    }

    #[test]
    fn fill_holes_preserves_non_holes(seed in 0u64..10_000, density in 0.01f64..0.4) {
        let w = 12usize;
        let h = 12usize;
        let mut rng = testkit::rng(seed);
        let feat = testkit::uniform_buffer(&mut rng, w, h, 3, 0.0, 1.0);
        let noise = testkit::uniform_buffer(&mut rng, w, h, 1, 0.0, 1.0);
        let mut holes = vec![0u8; w * h];
        for i in 0..w * h {
            holes[i] = ((noise[i] as f64) < density) as u8;
        }
        if holes.iter().all(|&v| v == 1) {
            holes[0] = 0;
        }
        let map = FeatureMap::from_data(w, h, 3, feat.clone()).unwrap();
        let mask = HoleMask::from_data(w, h, holes.clone()).unwrap();
        let filled = warp::fill_holes(&map, &mask, LARGE_HOLE_RATIO).unwrap();
        for i in 0..w * h {
            if holes[i] == 0 {
                for c in 0..3 {
                    prop_assert_eq!(filled.data()[i * 3 + c], feat[i * 3 + c]);
                }
            } else {
                for c in 0..3 {
                    prop_assert!(filled.data()[i * 3 + c].is_finite());
                }
            }
        }
    }

    #[test]
    fn refine_mask_stays_binary_and_accounts_flips(seed in 0u64..10_000) {
        let w = 24usize;
        let h = 24usize;
        let mut rng = testkit::rng(seed);
        let noise = testkit::uniform_buffer(&mut rng, w, h, 1, 0.0, 1.0);
        let mask = Mask::from_fn(w, h, |x, y| (noise[y * w + x] > 0.6) as u8);
        let refined = mask::refine_mask(&mask, 0.03).unwrap();
        prop_assert_eq!((refined.width(), refined.height()), (w, h));
        prop_assert!(refined.data().iter().all(|&v| v <= 1));
    }

    #[test]
    fn style_delta_linear_in_beta(seed in 0u64..10_000, beta in 0.0f32..=1.0) {
        let mut rng = testkit::rng(seed);
        let data = testkit::uniform_buffer(&mut rng, 8, 8, 3, 0.0, 1.0);
        let tdata = testkit::uniform_buffer(&mut rng, 8, 8, 3, 0.0, 1.0);
        let img = ImageRGB::from_data(8, 8, data).unwrap();
        let target = ImageRGB::from_data(8, 8, tdata).unwrap();
        let base = style::fit_style(&target);
        let full = style::style_delta(&img, &base.with_beta(1.0).unwrap());
        let scaled = style::style_delta(&img, &base.with_beta(beta).unwrap());
        for (s, f) in scaled.data().iter().zip(full.data()) {
            prop_assert!((s - beta * f).abs() <= 1e-6);
        }
    }
}

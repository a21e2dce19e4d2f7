//! Metrics against counting oracles, the Dice/IoU identity and symmetry
//! properties.

mod common;

use common as c;
use proptest::prelude::*;
use rand::Rng;

use synthal_core::imaging::BinaryMask;
use synthal_core::metrics::{boundary_band, dsc, evaluate_set, iou, iou_nb};

#[test]
fn scores_match_the_counting_oracles() {
    let mut rng = c::rng(0x3d01);
    for case in 0..220 {
        let width = rng.random_range(1..=16);
        let height = rng.random_range(1..=16);
        let s = c::random_mask_varied(&mut rng, width, height, 0.0, 1.0);
        let g = c::random_mask_varied(&mut rng, width, height, 0.0, 1.0);
        assert_eq!(dsc::<f64>(&s, &g).unwrap(), c::dsc_oracle(&s, &g), "case {case}");
        assert_eq!(iou::<f64>(&s, &g).unwrap(), c::iou_oracle(&s, &g), "case {case}");
        let width_band = 2 * rng.random_range(1..=5usize);
        assert_eq!(
            iou_nb::<f64>(&s, &g, width_band).unwrap(),
            c::iou_nb_oracle(&s, &g, width_band),
            "case {case}"
        );
    }
}

#[test]
fn band_matches_the_distance_to_boundary_oracle() {
    let mut rng = c::rng(0x3d02);
    for case in 0..220 {
        let width = rng.random_range(1..=16);
        let height = rng.random_range(1..=16);
        let g = c::random_mask_varied(&mut rng, width, height, 0.0, 1.0);
        let w = 2 * rng.random_range(1..=5usize);
        assert_eq!(
            boundary_band(&g, w).unwrap(),
            c::boundary_band_oracle(&g, w),
            "case {case}: width {w}"
        );
    }
}

#[test]
fn dice_equals_two_iou_over_one_plus_iou() {
    let mut rng = c::rng(0x3d03);
    for case in 0..1000 {
        let width = rng.random_range(1..=16);
        let height = rng.random_range(1..=16);
        let s = c::random_mask_varied(&mut rng, width, height, 0.0, 1.0);
        let g = c::random_mask_varied(&mut rng, width, height, 0.0, 1.0);
        let (inter, sc, gc) = c::mask_counts(&s, &g);
        let union = sc + gc - inter;

        // Exactly, at the level of the shared counts: both scores are the
        // same rational because |S| + |G| = |S∪G| + |S∩G| identically.
        assert_eq!(sc + gc, union + inter, "case {case}");
        let d = dsc::<f64>(&s, &g).unwrap();
        let j = iou::<f64>(&s, &g).unwrap();
        if sc + gc > 0 {
            assert_eq!(d, 2.0 * inter as f64 / (sc + gc) as f64, "case {case}");
            assert_eq!(d, 2.0 * inter as f64 / (union + inter) as f64, "case {case}");
        }
        // The float-composed form agrees to a unit in the last place.
        let composed = 2.0 * j / (1.0 + j);
        assert!(
            (d - composed).abs() <= 2.0 * f64::EPSILON,
            "case {case}: {d} vs {composed}"
        );
    }
}

#[test]
fn hand_counted_example_is_exact() {
    // |S| = |G| = 4 with |S∩G| = 2.
    let s = BinaryMask::from_fn(8, 1, |x, _| x < 4).unwrap();
    let g = BinaryMask::from_fn(8, 1, |x, _| (2..6).contains(&x)).unwrap();
    assert_eq!(dsc::<f64>(&s, &g).unwrap(), 0.5);
    assert_eq!(iou::<f64>(&s, &g).unwrap(), 1.0 / 3.0);
}

#[test]
fn metrics_are_invariant_under_shared_rigid_motion() {
    let mut rng = c::rng(0x3d04);
    for _ in 0..100 {
        let n = rng.random_range(4..=16);
        let s = c::random_mask(&mut rng, n, n, 0.4);
        let g = c::random_mask(&mut rng, n, n, 0.4);
        let band = 4;
        let base = (
            dsc::<f64>(&s, &g).unwrap(),
            iou::<f64>(&s, &g).unwrap(),
            iou_nb::<f64>(&s, &g, band).unwrap(),
        );
        let motions: [&dyn Fn(&BinaryMask) -> BinaryMask; 3] = [
            &|m| BinaryMask::from_fn(n, n, |x, y| m.get(n - 1 - x, y)).unwrap(),
            &|m| BinaryMask::from_fn(n, n, |x, y| m.get(x, n - 1 - y)).unwrap(),
            &|m| BinaryMask::from_fn(n, n, |x, y| m.get(y, n - 1 - x)).unwrap(),
        ];
        for motion in motions {
            let ms = motion(&s);
            let mg = motion(&g);
            let moved = (
                dsc::<f64>(&ms, &mg).unwrap(),
                iou::<f64>(&ms, &mg).unwrap(),
                iou_nb::<f64>(&ms, &mg, band).unwrap(),
            );
            assert_eq!(base, moved);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bands_grow_with_width(seed in any::<u64>()) {
        let mut rng = c::rng(seed);
        let width = rng.random_range(2..=16);
        let height = rng.random_range(2..=16);
        let g = c::random_mask(&mut rng, width, height, 0.4);
        let narrow = boundary_band(&g, 2).unwrap();
        let mid = boundary_band(&g, 6).unwrap();
        let wide = boundary_band(&g, 10).unwrap();
        for y in 0..height {
            for x in 0..width {
                prop_assert!(!narrow.get(x, y) || mid.get(x, y));
                prop_assert!(!mid.get(x, y) || wide.get(x, y));
            }
        }
    }

    #[test]
    fn means_average_per_image_scores(seed in any::<u64>()) {
        let mut rng = c::rng(seed);
        let n_images = rng.random_range(1..=8);
        let mut items = Vec::new();
        for i in 0..n_images {
            let s = c::random_mask(&mut rng, 8, 8, 0.4);
            let g = c::random_mask(&mut rng, 8, 8, 0.4);
            items.push((format!("img_{i}"), s, g));
        }
        let result = evaluate_set::<f64>(items.clone(), 4).unwrap();
        let want: f64 = items
            .iter()
            .map(|(_, s, g)| c::dsc_oracle(s, g))
            .sum::<f64>() / n_images as f64;
        prop_assert!((result.mean_dsc - want).abs() <= 1e-12);
    }
}

//! Acquisition scoring against triple-loop oracles and its analytic
//! anchors.

mod common;

use common as c;
use proptest::prelude::*;
use rand::Rng;

use synthal_core::query::{
    bald_map, entropy_map, image_score, select_query_batch, Aggregator, ImageScore,
    ProbabilityStack, Strategy,
};

#[test]
fn entropy_and_bald_match_the_triple_loop_oracle() {
    let mut rng = c::rng(0x2e01);
    for case in 0..220 {
        let members = rng.random_range(1..=5);
        let classes = rng.random_range(2..=4);
        let height = rng.random_range(1..=8);
        let width = rng.random_range(1..=8);
        let stack = c::random_stack(&mut rng, members, classes, height, width);

        let entropy = entropy_map(&stack).unwrap();
        let dev = c::max_abs_diff(entropy.data(), &c::entropy_oracle(&stack));
        assert!(dev <= 1e-9, "case {case}: entropy deviation {dev}");

        let bald = bald_map(&stack).unwrap();
        let dev = c::max_abs_diff(bald.data(), &c::bald_oracle(&stack));
        assert!(dev <= 1e-9, "case {case}: bald deviation {dev}");
    }
}

#[test]
fn identical_committees_give_exactly_zero() {
    let mut rng = c::rng(0x2e02);
    for _ in 0..100 {
        let classes = rng.random_range(2..=4);
        let members = rng.random_range(2..=5);
        let base = c::random_stack(&mut rng, 1, classes, 4, 4);
        let stack = ProbabilityStack::from_fn(members, classes, 4, 4, |_, cl, y, x| {
            base.get(0, cl, y, x)
        })
        .unwrap();
        let bald = bald_map(&stack).unwrap();
        assert!(bald.data().iter().all(|&v| v == 0.0));
    }
}

#[test]
fn disagreement_is_never_larger_than_mean_entropy() {
    let mut rng = c::rng(0x2e03);
    for _ in 0..1000 {
        let members = rng.random_range(1..=5);
        let classes = rng.random_range(2..=4);
        let stack = c::random_stack(&mut rng, members, classes, 4, 4);
        let entropy = entropy_map(&stack).unwrap();
        let bald = bald_map(&stack).unwrap();
        for (b, h) in bald.data().iter().zip(entropy.data()) {
            assert!(*b >= 0.0 && b <= h, "bald {b} vs entropy {h}");
        }
    }
}

#[test]
fn maps_are_invariant_under_class_permutation() {
    let mut rng = c::rng(0x2e04);
    for _ in 0..100 {
        let classes = rng.random_range(2..=4usize);
        let members = rng.random_range(1..=5);
        let stack = c::random_stack(&mut rng, members, classes, 5, 3);
        // Rotate class indices uniformly across members.
        let shift = rng.random_range(1..classes);
        let permuted = ProbabilityStack::from_fn(members, classes, 5, 3, |t, cl, y, x| {
            stack.get(t, (cl + shift) % classes, y, x)
        })
        .unwrap();
        let dev = c::max_abs_diff(
            bald_map(&stack).unwrap().data(),
            bald_map(&permuted).unwrap().data(),
        );
        assert!(dev <= 1e-12, "bald permutation deviation {dev}");
        let dev = c::max_abs_diff(
            entropy_map(&stack).unwrap().data(),
            entropy_map(&permuted).unwrap().data(),
        );
        assert!(dev <= 1e-12, "entropy permutation deviation {dev}");
    }
}

#[test]
fn top_fraction_matches_the_sort_oracle() {
    let mut rng = c::rng(0x2e05);
    for case in 0..220 {
        let stack = c::random_stack(&mut rng, 3, 2, 6, 6);
        let map = entropy_map(&stack).unwrap();
        let q = rng.random_range(0.05..1.0);
        let got = image_score(&map, Aggregator::TopFraction(q)).unwrap();
        let mut sorted: Vec<f64> = map.data().to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let count = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        let want = sorted[..count].iter().sum::<f64>() / count as f64;
        assert!((got - want).abs() <= 1e-12, "case {case}");

        let mean = image_score(&map, Aggregator::Mean).unwrap();
        let sum = image_score(&map, Aggregator::Sum).unwrap();
        assert!((sum - mean * map.data().len() as f64).abs() <= 1e-9);
    }
}

#[test]
fn batch_selection_matches_the_full_sort_oracle() {
    let mut rng = c::rng(0x2e06);
    for case in 0..220 {
        let n_scores = rng.random_range(1..=1000);
        let scores: Vec<ImageScore<f64>> = (0..n_scores)
            .map(|i| ImageScore {
                image_id: format!("img_{i:04}"),
                // Quantised scores force ties.
                score: (rng.random_range(0..50u32) as f64) / 50.0,
                strategy: Strategy::Bald,
            })
            .collect();
        let n = rng.random_range(0..=n_scores);
        let got: Vec<String> = select_query_batch(&scores, n)
            .unwrap()
            .into_iter()
            .map(|s| s.image_id)
            .collect();

        let mut want = scores.clone();
        want.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap()
                .then_with(|| a.image_id.cmp(&b.image_id))
        });
        let want: Vec<String> = want.into_iter().take(n).map(|s| s.image_id).collect();
        assert_eq!(got, want, "case {case}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selection_is_invariant_under_positive_scaling(
        seed in any::<u64>(),
        factor in 1e-6f64..1e6,
    ) {
        let mut rng = c::rng(seed);
        let n_scores = rng.random_range(1..=50);
        let scores: Vec<ImageScore<f64>> = (0..n_scores)
            .map(|i| ImageScore {
                image_id: format!("img_{i:03}"),
                score: rng.random::<f64>(),
                strategy: Strategy::Entropy,
            })
            .collect();
        let scaled: Vec<ImageScore<f64>> = scores
            .iter()
            .map(|s| ImageScore {
                image_id: s.image_id.clone(),
                score: s.score * factor,
                strategy: s.strategy,
            })
            .collect();
        let n = rng.random_range(0..=n_scores);
        let a: Vec<String> = select_query_batch(&scores, n).unwrap()
            .into_iter().map(|s| s.image_id).collect();
        let b: Vec<String> = select_query_batch(&scaled, n).unwrap()
            .into_iter().map(|s| s.image_id).collect();
        prop_assert_eq!(a, b);
    }
}

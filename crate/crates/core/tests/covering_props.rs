mod common;

use assouad_lab::covering::{covering_number, max_separated_set, CoverMode, Exactness};
use assouad_lab::FiniteMetricSpace;
use common::metric_space;
use proptest::prelude::*;

/// Every point lies in some block, and every block has diameter at most `r`.
fn assert_valid_cover(x: &FiniteMetricSpace, blocks: &[Vec<usize>], r: f64) {
    for p in 0..x.len() {
        assert!(blocks.iter().any(|b| b.contains(&p)), "point {p} uncovered");
    }
    for b in blocks {
        for &i in b {
            for &j in b {
                assert!(x.dist(i, j) <= r, "block {b:?} wider than {r}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_cover_is_valid_minimal_and_below_greedy(x in metric_space(1, 9), r in 0.05f64..15.0) {
        let s = x.full();
        let exact = covering_number(&s, r, CoverMode::Exact).unwrap();
        let greedy = covering_number(&s, r, CoverMode::Greedy).unwrap();
        prop_assert_eq!(exact.exactness, Exactness::Exact);
        prop_assert_eq!(exact.count, exact.blocks.len());
        assert_valid_cover(&x, &exact.blocks, r);
        assert_valid_cover(&x, &greedy.blocks, r);
        prop_assert!(greedy.count >= exact.count);
        prop_assert!(exact.count >= 1 && exact.count <= x.len());
    }

    #[test]
    fn covering_number_is_monotone_in_r(x in metric_space(1, 9), r in 0.05f64..15.0, f in 1.0f64..4.0) {
        let s = x.full();
        let small = covering_number(&s, r, CoverMode::Exact).unwrap().count;
        let big = covering_number(&s, r * f, CoverMode::Exact).unwrap().count;
        prop_assert!(big <= small);
    }

    #[test]
    fn packing_and_covering_bound_each_other(x in metric_space(1, 9), r in 0.05f64..15.0) {
        let s = x.full();
        // Points more than r apart need distinct blocks of diameter r.
        let strict = max_separated_set(&s, r.next_up());
        prop_assert!(strict.len() <= covering_number(&s, r, CoverMode::Exact).unwrap().count);
        // Each point is within r of a maximal r-separated set, so balls of
        // radius r around it are blocks of diameter 2r.
        let net = max_separated_set(&s, r);
        for p in 0..x.len() {
            prop_assert!(net.distance_to(p) < r);
        }
        prop_assert!(covering_number(&s, 2.0 * r, CoverMode::Exact).unwrap().count <= net.len());
    }

    #[test]
    fn cover_counts_are_scale_invariant(x in metric_space(1, 9), r in 0.05f64..15.0, k in -6i32..6) {
        let h = 2f64.powi(k);
        let hx = x.scale(h).unwrap();
        for mode in [CoverMode::Exact, CoverMode::Greedy] {
            let a = covering_number(&x.full(), r, mode).unwrap().count;
            let b = covering_number(&hx.full(), r * h, mode).unwrap().count;
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn subset_covers_stay_inside_the_subset(x in metric_space(2, 9), r in 0.05f64..15.0, mask in 1u32..512) {
        let idx: Vec<usize> = (0..x.len()).filter(|i| mask >> i & 1 == 1).collect();
        prop_assume!(!idx.is_empty());
        let s = x.subset(idx.clone()).unwrap();
        let c = covering_number(&s, r, CoverMode::Exact).unwrap();
        prop_assert!(c.blocks.iter().flatten().all(|p| idx.contains(p)));
        prop_assert!(c.count <= idx.len());
    }
}

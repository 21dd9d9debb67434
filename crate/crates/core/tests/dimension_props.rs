mod common;

use assouad_lab::constructions::{cantor_sample, line_space, progression};
use assouad_lab::dimension::{
    assouad_estimate_covering, assouad_estimate_subsets, lower_assouad_estimate, DimensionEstimate,
    DimensionParams,
};
use assouad_lab::FiniteMetricSpace;
use proptest::prelude::*;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn same_estimate(a: &DimensionEstimate, b: &DimensionEstimate) -> bool {
    close(a.beta_hat, b.beta_hat) && close(a.constant_c, b.constant_c) && close(a.extremal_beta, b.extremal_beta)
}

/// Random points on a line with integer coordinates, so every sample has
/// structure at several scales.
fn line_sample() -> impl Strategy<Value = FiniteMetricSpace> {
    prop::collection::btree_set(0i64..4096, 16..64).prop_map(|s| {
        let pts: Vec<f64> = s.into_iter().map(|v| v as f64).collect();
        line_space(&pts).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimates_are_scale_invariant(x in line_sample(), h in prop::sample::select(vec![1e-3, 0.5, 3.0, 10.0, 1e4])) {
        let hx = x.scale(h).unwrap();
        let p = DimensionParams::default();
        let ok = |a: Result<DimensionEstimate, _>, b: Result<DimensionEstimate, _>| match (a, b) {
            (Ok(a), Ok(b)) => same_estimate(&a, &b),
            (Err(_), Err(_)) => true,
            _ => false,
        };
        prop_assert!(ok(assouad_estimate_subsets(&x, &p), assouad_estimate_subsets(&hx, &p)));
        prop_assert!(ok(lower_assouad_estimate(&x, &p), lower_assouad_estimate(&hx, &p)));
        prop_assert!(ok(assouad_estimate_covering(&x, &p), assouad_estimate_covering(&hx, &p)));
    }

    #[test]
    fn lower_never_exceeds_upper(x in line_sample(), rho in 2.0f64..8.0) {
        let p = DimensionParams { rho_min: rho, ..Default::default() };
        if let (Ok(up), Ok(low)) = (assouad_estimate_subsets(&x, &p), lower_assouad_estimate(&x, &p)) {
            prop_assert!(low.beta_hat <= up.beta_hat);
            prop_assert!(low.extremal_beta <= up.extremal_beta);
        }
    }

    #[test]
    fn extremal_exponent_falls_as_rho_grows(x in line_sample(), rho in 2.0f64..6.0, f in 1.0f64..3.0) {
        let lo = DimensionParams { rho_min: rho, ..Default::default() };
        let hi = DimensionParams { rho_min: rho * f, ..Default::default() };
        if let (Ok(a), Ok(b)) = (assouad_estimate_subsets(&x, &lo), assouad_estimate_subsets(&x, &hi)) {
            prop_assert!(b.extremal_beta <= a.extremal_beta);
            prop_assert!(b.samples <= a.samples);
        }
    }

    #[test]
    fn constant_bounds_every_pool_point(x in line_sample()) {
        let e = assouad_estimate_subsets(&x, &DimensionParams::default());
        if let Ok(e) = e {
            for p in &e.points {
                prop_assert!(p.log_count <= e.constant_c.ln() + e.beta_hat * p.log_ratio + 1e-9);
            }
        }
    }
}

#[test]
fn random_subsets_are_seeded() {
    let x = cantor_sample(5).unwrap();
    let p = DimensionParams { random_subsets: 200, seed: 11, ..Default::default() };
    let a = assouad_estimate_subsets(&x, &p).unwrap();
    let b = assouad_estimate_subsets(&x, &p).unwrap();
    assert_eq!(a, b);
}

#[test]
fn finite_line_samples_have_exponent_near_one() {
    let e = assouad_estimate_covering(&progression(64).unwrap(), &DimensionParams::default()).unwrap();
    assert!((e.beta_hat - 1.0).abs() <= 0.1, "{}", e.beta_hat);
    assert!(e.empirical);
}

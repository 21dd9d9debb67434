#![allow(dead_code)]

use assouad_lab::FiniteMetricSpace;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shortest-path closure of a complete graph with the given edge weights,
/// listed in `(i, j), i < j` order.
pub fn closure_metric(n: usize, weights: &[f64]) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    let mut w = weights.iter();
    for i in 0..n {
        for j in i + 1..n {
            let v = *w.next().expect("enough weights");
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::validate(&d, None, 1e-9).expect("closure is a metric")
}

/// Random metric on `lo..=hi` points with edge weights in `[0.1, 10]`.
pub fn metric_space(lo: usize, hi: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (lo..=hi).prop_flat_map(|n| {
        prop::collection::vec(0.1f64..10.0, n * (n - 1) / 2).prop_map(move |w| closure_metric(n, &w))
    })
}

/// Seeded random metric, for corpus-style tests.
pub fn seeded_space(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> FiniteMetricSpace {
    let n = rng.gen_range(lo..=hi);
    let w: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(0.1..10.0)).collect();
    closure_metric(n, &w)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// GH distance by enumerating every relation between `x` and `y`.
pub fn brute_force_gh(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let (n, m) = (x.len(), y.len());
    assert!(n * m <= 20, "oracle is exponential in n·m");
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << (n * m)) {
        let pairs: Vec<(usize, usize)> =
            (0..n * m).filter(|b| mask >> b & 1 == 1).map(|b| (b / m, b % m)).collect();
        let onto_x = (0..n).all(|i| pairs.iter().any(|p| p.0 == i));
        let onto_y = (0..m).all(|j| pairs.iter().any(|p| p.1 == j));
        if !(onto_x && onto_y) {
            continue;
        }
        let mut dis = 0.0f64;
        for &(a, b) in &pairs {
            for &(c, e) in &pairs {
                dis = dis.max((x.dist(a, c) - y.dist(b, e)).abs());
            }
        }
        best = best.min(dis);
    }
    best / 2.0
}

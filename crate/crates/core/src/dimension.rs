//! Empirical Assouad and lower Assouad exponents of finite samples.
//!
//! A finite space has Assouad dimension 0, so every number produced here is
//! an exponent of the sampled geometry inside an explicit scale window, not
//! a dimension. Estimates collect diagnostic points
//! `(ln ratio, ln count)` over a deterministic pool:
//!
//! * subset method: `ratio = diam(A)/sep(A)`, `count = card(A)` for balls
//!   intersected with greedy nets at dyadic scales;
//! * covering method: `ratio = (diam(S) + α)/(r + α)`, `count = N(S, r)`
//!   for balls `S` and block diameters `r` on a half-octave grid snapped
//!   to realised distances, with `α` the separation of the sample. Each
//!   sample point stands for a cell of width `α`, which removes the
//!   `(r + α)` lattice bias; for `r ≫ α` this is `diam(S)/r`.
//!
//! The exponent is the least-squares slope through the per-octave upper
//! (or lower) envelope of those points. The constant is the smallest `C`
//! with `count <= C · ratio^beta` on every pool point (largest for the lower
//! bound), so `(beta_hat, constant_c)` is a pair the pool itself satisfies.
//! The `C = 1` extremal exponent `max ln count / ln ratio` is kept as
//! `extremal_beta`.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::covering::{greedy_cover_count, greedy_net};
use crate::metric::{FiniteMetricSpace, SubsetView};
use crate::par;

pub const DEFAULT_RHO_MIN: f64 = 4.0;
/// Relative slack when snapping block scales onto distance values.
const SNAP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DimensionError {
    #[error("space has {0} points; at least 2 are needed")]
    TooFewPoints(usize),
    #[error("no subset in the pool has diam/sep ratio >= {rho_min}")]
    NoEligibleSubset { rho_min: f64 },
    #[error("no (ball, scale) pair has ratio >= {rho_min}")]
    NoEligibleScalePair { rho_min: f64 },
    #[error("invalid estimator parameter: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionParams {
    pub rho_min: f64,
    /// Smallest ball radius; defaults to twice the minimum distance.
    pub r_min: Option<f64>,
    /// Largest ball radius; defaults to half the diameter.
    pub r_max: Option<f64>,
    /// Extra seeded random subsets added to the subset pool.
    pub random_subsets: usize,
    pub seed: u64,
}

impl Default for DimensionParams {
    fn default() -> Self {
        Self { rho_min: DEFAULT_RHO_MIN, r_min: None, r_max: None, random_subsets: 0, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionMethod {
    SubsetExtremal,
    CoveringFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub rho_min: f64,
    pub r_min: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticPoint {
    pub log_ratio: f64,
    pub log_count: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub beta_hat: f64,
    pub constant_c: f64,
    pub method: DimensionMethod,
    pub bound: BoundKind,
    pub window: Window,
    /// Number of distinct eligible pool members.
    pub samples: usize,
    /// False when fewer than two octaves were populated and the `C = 1`
    /// extremal exponent was used instead of a fit.
    pub fitted: bool,
    /// Envelope slope before clamping (lower bound only differs).
    pub raw_slope: f64,
    /// `max` (upper) or `min` (lower) of `ln count / ln ratio`.
    pub extremal_beta: f64,
    pub envelope: Vec<DiagnosticPoint>,
    pub points: Vec<DiagnosticPoint>,
    /// Always true: window-restricted exponent of a finite sample.
    pub empirical: bool,
}

/// Resolved scale grid for one space.
#[derive(Debug, Clone)]
struct Scales {
    window: Window,
    /// Ball radii: `r_max · 2^-t` down to `r_min`.
    radii: Vec<f64>,
    /// Net / block scales: the radii continued down to the minimum distance.
    fine: Vec<f64>,
    /// Block diameters for covering counts: half-octave steps over the
    /// same range, which samples the count staircase more evenly.
    blocks: Vec<f64>,
    diameter: f64,
}

fn scales(x: &FiniteMetricSpace, params: &DimensionParams) -> Result<Scales, DimensionError> {
    if x.len() < 2 {
        return Err(DimensionError::TooFewPoints(x.len()));
    }
    if !(params.rho_min > 1.0) {
        return Err(DimensionError::InvalidParams(format!(
            "rho_min must exceed 1, got {}",
            params.rho_min
        )));
    }
    let min_dist = x.separation();
    let diameter = x.diameter();
    let r_min = params.r_min.unwrap_or(2.0 * min_dist);
    let r_max = params.r_max.unwrap_or(diameter / 2.0);
    if !(r_min > 0.0 && r_max.is_finite()) {
        return Err(DimensionError::InvalidParams(format!("bad window [{r_min}, {r_max}]")));
    }
    let mut radii = Vec::new();
    let mut fine = Vec::new();
    let mut r = r_max;
    while r >= min_dist && r > 0.0 {
        if r >= r_min {
            radii.push(r);
        }
        fine.push(r);
        r /= 2.0;
    }
    if fine.last().is_none_or(|&l| l > min_dist) {
        fine.push(min_dist);
    }
    let mut blocks = Vec::new();
    for k in 0.. {
        let mut r = r_max * (-((k / 2) as f64)).exp2();
        if k % 2 == 1 {
            r *= std::f64::consts::FRAC_1_SQRT_2;
        }
        if !(r >= min_dist && r > 0.0) {
            break;
        }
        blocks.push(r);
    }
    if blocks.last().is_none_or(|&l| l > min_dist) {
        blocks.push(min_dist);
    }
    Ok(Scales { window: Window { rho_min: params.rho_min, r_min, r_max }, radii, fine, blocks, diameter })
}

/// Upper subset-extremal exponent.
pub fn assouad_estimate_subsets(
    x: &FiniteMetricSpace,
    params: &DimensionParams,
) -> Result<DimensionEstimate, DimensionError> {
    let (sc, points) = subset_pool(x, params)?;
    Ok(fit(points, sc.window, DimensionMethod::SubsetExtremal, BoundKind::Upper))
}

/// Lower subset-extremal exponent, never above the upper one on the same pool.
pub fn lower_assouad_estimate(
    x: &FiniteMetricSpace,
    params: &DimensionParams,
) -> Result<DimensionEstimate, DimensionError> {
    let (sc, points) = subset_pool(x, params)?;
    let upper = fit(points.clone(), sc.window, DimensionMethod::SubsetExtremal, BoundKind::Upper);
    let mut lower = fit(points, sc.window, DimensionMethod::SubsetExtremal, BoundKind::Lower);
    if lower.beta_hat > upper.beta_hat {
        lower.beta_hat = upper.beta_hat;
        lower.constant_c = constant_for(&lower.points, lower.beta_hat, BoundKind::Lower);
    }
    Ok(lower)
}

/// Upper covering exponent from greedy covering numbers of balls.
pub fn assouad_estimate_covering(
    x: &FiniteMetricSpace,
    params: &DimensionParams,
) -> Result<DimensionEstimate, DimensionError> {
    let sc = scales(x, params)?;
    let rho = params.rho_min;
    let mut jobs: Vec<(Vec<usize>, f64)> = Vec::new();
    let all: Vec<usize> = (0..x.len()).collect();
    let mut radii = sc.radii.clone();
    radii.push(sc.diameter);
    for &big_r in &radii {
        for c in greedy_net(x, &all, big_r) {
            let ball = x.closed_ball(c, big_r).into_indices();
            jobs.push((ball, big_r));
        }
    }
    // N(S, r) only changes at distance values, so each block scale is
    // replaced by the largest distance value not above it.
    let values = x.distance_values();
    let mut snapped: Vec<f64> = sc
        .blocks
        .iter()
        .map(|&r| values[values.partition_point(|&v| v <= r * (1.0 + SNAP_SLACK)) - 1])
        .collect();
    snapped.dedup();
    let alpha = x.separation();
    let per_ball = par::map_slice(&jobs, |(ball, big_r)| {
        let view = SubsetView::new(x, ball.clone()).expect("ball is non-empty");
        let diam = view.diameter();
        let mut out = Vec::new();
        for &r in &snapped {
            let ratio = (diam + alpha) / (r + alpha);
            if big_r / r < rho || ratio < rho {
                continue;
            }
            let count = greedy_cover_count(&view, r);
            out.push(DiagnosticPoint { log_ratio: ratio.ln(), log_count: (count as f64).ln() });
        }
        out
    });
    let points: Vec<DiagnosticPoint> = per_ball.into_iter().flatten().collect();
    if points.is_empty() {
        return Err(DimensionError::NoEligibleScalePair { rho_min: rho });
    }
    Ok(fit(points, sc.window, DimensionMethod::CoveringFit, BoundKind::Upper))
}

fn subset_pool(
    x: &FiniteMetricSpace,
    params: &DimensionParams,
) -> Result<(Scales, Vec<DiagnosticPoint>), DimensionError> {
    let sc = scales(x, params)?;
    let all: Vec<usize> = (0..x.len()).collect();
    let nets = par::map_slice(&sc.fine, |&r| greedy_net(x, &all, r));
    let mut radii = sc.radii.clone();
    radii.push(sc.diameter);
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for net in &nets {
        for &big_r in &radii {
            for c in greedy_net(x, net, big_r) {
                let row = x.row(c);
                let a: Vec<usize> = net.iter().copied().filter(|&j| row[j] <= big_r).collect();
                if a.len() >= 2 {
                    candidates.push(a);
                }
            }
        }
    }
    if params.random_subsets > 0 {
        candidates.extend(random_subsets(x, &sc, params));
    }
    let mut seen = HashSet::new();
    candidates.retain(|a| {
        let mut key = a.clone();
        key.sort_unstable();
        seen.insert(key)
    });
    let rho = params.rho_min;
    let points: Vec<DiagnosticPoint> = par::map_slice(&candidates, |a| {
        let view = SubsetView::new(x, a.clone()).expect("pool subsets are valid");
        let (diam, sep) = view.diameter_separation();
        let ratio = diam / sep;
        (ratio >= rho).then(|| DiagnosticPoint {
            log_ratio: ratio.ln(),
            log_count: (a.len() as f64).ln(),
        })
    })
    .into_iter()
    .flatten()
    .collect();
    if points.is_empty() {
        return Err(DimensionError::NoEligibleSubset { rho_min: rho });
    }
    Ok((sc, points))
}

fn random_subsets(x: &FiniteMetricSpace, sc: &Scales, params: &DimensionParams) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut out = Vec::with_capacity(params.random_subsets);
    let mut radii = sc.radii.clone();
    radii.push(sc.diameter);
    for _ in 0..params.random_subsets {
        let c = rng.gen_range(0..x.len());
        let r = radii[rng.gen_range(0..radii.len())];
        let mut ball = x.closed_ball(c, r).into_indices();
        if ball.len() < 2 {
            continue;
        }
        let k = rng.gen_range(2..=ball.len());
        ball.shuffle(&mut rng);
        ball.truncate(k);
        ball.sort_unstable();
        out.push(ball);
    }
    out
}

fn octave(p: &DiagnosticPoint) -> i64 {
    (p.log_ratio / std::f64::consts::LN_2 + 1e-9).floor() as i64
}

fn envelope(points: &[DiagnosticPoint], bound: BoundKind) -> Vec<DiagnosticPoint> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        octave(a)
            .cmp(&octave(b))
            .then(b.log_count.total_cmp(&a.log_count))
            .then(a.log_ratio.total_cmp(&b.log_ratio))
    });
    let mut out: Vec<DiagnosticPoint> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let o = octave(&sorted[i]);
        let mut j = i;
        while j < sorted.len() && octave(&sorted[j]) == o {
            j += 1;
        }
        // Group is sorted by descending count, ascending ratio within ties.
        let pick = match bound {
            BoundKind::Upper => sorted[i],
            BoundKind::Lower => {
                let min_count = sorted[j - 1].log_count;
                *sorted[i..j]
                    .iter()
                    .filter(|p| p.log_count == min_count)
                    .max_by(|a, b| a.log_ratio.total_cmp(&b.log_ratio))
                    .expect("group non-empty")
            }
        };
        out.push(pick);
        i = j;
    }
    out
}

fn least_squares_slope(points: &[DiagnosticPoint]) -> Option<f64> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.log_ratio).sum::<f64>() / n;
    let my = points.iter().map(|p| p.log_count).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.log_ratio - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.log_ratio - mx) * (p.log_count - my)).sum();
    (points.len() >= 2 && sxx > 0.0).then(|| sxy / sxx)
}

fn constant_for(points: &[DiagnosticPoint], beta: f64, bound: BoundKind) -> f64 {
    let logs = points.iter().map(|p| p.log_count - beta * p.log_ratio);
    match bound {
        BoundKind::Upper => logs.fold(f64::NEG_INFINITY, f64::max).exp(),
        BoundKind::Lower => logs.fold(f64::INFINITY, f64::min).exp(),
    }
}

fn fit(
    points: Vec<DiagnosticPoint>,
    window: Window,
    method: DimensionMethod,
    bound: BoundKind,
) -> DimensionEstimate {
    let ratios = points.iter().map(|p| p.log_count / p.log_ratio);
    let extremal_beta = match bound {
        BoundKind::Upper => ratios.fold(f64::NEG_INFINITY, f64::max),
        BoundKind::Lower => ratios.fold(f64::INFINITY, f64::min),
    };
    let env = envelope(&points, bound);
    let (beta_hat, raw_slope, fitted) = match least_squares_slope(&env) {
        Some(s) => (s.max(0.0), s, true),
        None => (extremal_beta.max(0.0), extremal_beta, false),
    };
    let constant_c = if fitted { constant_for(&points, beta_hat, bound) } else { 1.0 };
    DimensionEstimate {
        beta_hat,
        constant_c,
        method,
        bound,
        window,
        samples: points.len(),
        fitted,
        raw_slope,
        extremal_beta,
        envelope: env,
        points,
        empirical: true,
    }
}

//! Scenario harness: convergence of rescaled subsets, dimension
//! inequalities, ball convergence in graph length spaces and the
//! weighted-block lemma checks.
//!
//! Every check produces an [`ExperimentReport`] whose verdict is the
//! conjunction of its step flags. Steps are computed independently and
//! assembled in index order.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::constructions::{
    asymptotic_example, cantor_sample, level, unit_grid, unit_square_lattice, AsymptoticExampleSpec,
    ConstructionError,
};
use crate::dimension::{assouad_estimate_subsets, lower_assouad_estimate, DimensionError, DimensionParams};
use crate::gh::{gh_bounds, gh_exact_with_limit, DEFAULT_GH_EXACT_LIMIT};
use crate::metric::{FiniteMetricSpace, MetricError, SubsetView};
use crate::par;

pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-2;
pub const DEFAULT_BURN_IN: usize = 3;
pub const DEFAULT_SLACK: f64 = 0.1;
/// Smallest truncation for which consecutive-block checks make sense.
pub const MIN_TRUNCATION: usize = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("sequence is malformed: {0}")]
    InvalidSequence(String),
    #[error("prerequisite not met: {0}")]
    PrerequisiteNotMet(String),
    #[error("hypothesis {hypothesis} violated at i={i}, k={k}: measured {measured} > bound {bound}")]
    HypothesisViolated { hypothesis: &'static str, i: usize, k: usize, measured: f64, bound: f64 },
    #[error("truncation {0} is below the minimum of {MIN_TRUNCATION}")]
    TruncationTooSmall(usize),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
}

/// Subsets `A_i` of a base space with scale factors `u_i`.
#[derive(Debug, Clone)]
pub struct ScaledSubsetSequence {
    pub base: FiniteMetricSpace,
    pub items: Vec<(Vec<usize>, f64)>,
}

impl ScaledSubsetSequence {
    pub fn new(base: FiniteMetricSpace, items: Vec<(Vec<usize>, f64)>) -> Result<Self, ExperimentError> {
        for (i, (a, u)) in items.iter().enumerate() {
            if !(*u > 0.0 && u.is_finite()) {
                return Err(ExperimentError::InvalidSequence(format!("u_{i} = {u} is not positive")));
            }
            SubsetView::new(&base, a.clone())?;
        }
        Ok(Self { base, items })
    }

    /// The constant sequence `A_i = X`, `u_i = 1`.
    pub fn constant(base: FiniteMetricSpace, steps: usize) -> Self {
        let all: Vec<usize> = (0..base.len()).collect();
        Self { items: vec![(all, 1.0); steps], base }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// `u_i A_i` as a standalone space.
    pub fn member(&self, i: usize) -> FiniteMetricSpace {
        let (a, u) = &self.items[i];
        self.base.restrict(a).scale(*u).expect("scale factors are validated")
    }

    /// Same subsets with every scale factor multiplied by `h`.
    pub fn rescaled(&self, h: f64) -> Result<Self, ExperimentError> {
        Self::new(self.base.clone(), self.items.iter().map(|(a, u)| (a.clone(), u * h)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub i: usize,
    /// What the step measures.
    pub label: String,
    pub measured: f64,
    /// `None` when the step is recorded but not constrained.
    pub bound: Option<f64>,
    pub pass: bool,
}

impl StepRecord {
    fn new(i: usize, label: impl Into<String>, measured: f64, bound: Option<f64>, pass: bool) -> Self {
        Self { i, label: label.into(), measured, bound, pass }
    }

    /// Passes when `measured <= bound`.
    fn at_most(i: usize, label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(i, label, measured, Some(bound), measured <= bound)
    }

    /// Passes when `measured < bound`.
    fn below(i: usize, label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(i, label, measured, Some(bound), measured < bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub steps: Vec<StepRecord>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
    /// Wall-clock seconds; `None` when timing is not recorded.
    pub runtime_seconds: Option<f64>,
}

impl ExperimentReport {
    fn assemble(name: &str, steps: Vec<StepRecord>, notes: Vec<String>, start: Instant) -> Self {
        let verdict = if steps.iter().all(|s| s.pass) { Verdict::Pass } else { Verdict::Fail };
        Self {
            name: name.to_string(),
            steps,
            verdict,
            notes,
            runtime_seconds: Some(start.elapsed().as_secs_f64()),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Copy with the runtime removed, for byte-stable output.
    pub fn without_runtime(mut self) -> Self {
        self.runtime_seconds = None;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceParams {
    pub tol: f64,
    pub burn_in: usize,
    pub exact_limit: usize,
}

impl Default for ConvergenceParams {
    fn default() -> Self {
        Self { tol: DEFAULT_CONVERGENCE_TOL, burn_in: DEFAULT_BURN_IN, exact_limit: DEFAULT_GH_EXACT_LIMIT }
    }
}

/// GH distance when both spaces fit the exact solver, otherwise the upper
/// end of the bounds interval.
pub fn gh_value(x: &FiniteMetricSpace, y: &FiniteMetricSpace, exact_limit: usize) -> (f64, bool) {
    match gh_exact_with_limit(x, y, exact_limit) {
        Ok(r) => (r.value, true),
        Err(_) => (gh_bounds(x, y).upper, false),
    }
}

/// Records `d_GH(u_i A_i, P)` per step. Steps from `burn_in` on must not
/// increase, and the last one must be within `tol`.
pub fn pseudo_cone_convergence(
    seq: &ScaledSubsetSequence,
    p: &FiniteMetricSpace,
    params: &ConvergenceParams,
) -> ExperimentReport {
    let start = Instant::now();
    let values = par::map_range(seq.len(), |i| gh_value(&seq.member(i), p, params.exact_limit));
    let mut steps = Vec::with_capacity(values.len());
    let last = values.len().saturating_sub(1);
    for (i, &(v, _)) in values.iter().enumerate() {
        let mut bound = None;
        if i > params.burn_in {
            bound = Some(values[i - 1].0);
        }
        if i == last {
            bound = Some(bound.map_or(params.tol, |b: f64| b.min(params.tol)));
        }
        let label = if values[i].1 { "gh-exact" } else { "gh-upper" };
        steps.push(StepRecord::new(i, label, v, bound, bound.is_none_or(|b| v <= b)));
    }
    let notes = vec![format!(
        "non-increasing after burn-in {}, final value <= {}",
        params.burn_in, params.tol
    )];
    ExperimentReport::assemble("pseudo-cone-convergence", steps, notes, start)
}

/// Window-matched empirical check of `dim_A P <= dim_A X` and
/// `dim_LA X <= dim_LA P`, each up to `slack`.
pub fn dimension_inequality_check(
    x: &FiniteMetricSpace,
    seq: &ScaledSubsetSequence,
    p: &FiniteMetricSpace,
    slack: f64,
    conv: &ConvergenceParams,
    dim: &DimensionParams,
) -> Result<ExperimentReport, ExperimentError> {
    let start = Instant::now();
    let convergence = pseudo_cone_convergence(seq, p, conv);
    if !convergence.passed() {
        return Err(ExperimentError::PrerequisiteNotMet("pseudo-cone convergence failed".into()));
    }
    let up_x = assouad_estimate_subsets(x, dim)?;
    let up_p = assouad_estimate_subsets(p, dim)?;
    let lo_x = lower_assouad_estimate(x, dim)?;
    let lo_p = lower_assouad_estimate(p, dim)?;
    let steps = vec![
        StepRecord::at_most(0, "upper: est(P) vs est(X) + slack", up_p.beta_hat, up_x.beta_hat + slack),
        StepRecord::at_most(1, "lower: est(X) vs est(P) + slack", lo_x.beta_hat, lo_p.beta_hat + slack),
    ];
    let notes = vec![
        "estimates are window-restricted empirical exponents of finite samples, not dimensions".into(),
        format!("windows matched by ratio: rho_min = {}, r in [2 sep, diam/2] of each space", dim.rho_min),
        format!("slack = {slack}"),
    ];
    Ok(ExperimentReport::assemble("dimension-inequality", steps, notes, start))
}

fn directed(k: &FiniteMetricSpace, from: &[usize], to: &[usize]) -> f64 {
    from.iter()
        .map(|&a| to.iter().map(|&b| k.dist(a, b)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two index sets of `k`; 0 when both are empty.
fn hausdorff(k: &FiniteMetricSpace, s: &[usize], t: &[usize]) -> f64 {
    if s.is_empty() && t.is_empty() {
        return 0.0;
    }
    directed(k, s, t).max(directed(k, t, s))
}

fn ball(k: &FiniteMetricSpace, p: usize, r: f64, within: &[usize]) -> Vec<usize> {
    within.iter().copied().filter(|&v| k.dist(p, v) <= r).collect()
}

/// Checks `p ∈ A_i`, the grid hypothesis
/// `d_H(B(p, k 2^-i; K), B(p, k 2^-i; A_i)) <= 2^-i` (plus `mesh`), then
/// records `d_H(B(p, R; K), B(p, R; A_i))` against `2^(1-i) + mesh`.
pub fn ball_convergence_check(
    k: &FiniteMetricSpace,
    p: usize,
    samples: &[Vec<usize>],
    radius: f64,
    mesh: f64,
) -> Result<ExperimentReport, ExperimentError> {
    let start = Instant::now();
    let all: Vec<usize> = (0..k.len()).collect();
    let reach = k.row(p).iter().copied().fold(0.0, f64::max);
    let mut steps = Vec::with_capacity(samples.len());
    for (i, a) in samples.iter().enumerate() {
        SubsetView::new(k, a.clone())?;
        if !a.contains(&p) {
            return Err(ExperimentError::HypothesisViolated {
                hypothesis: "A1",
                i,
                k: 0,
                measured: f64::INFINITY,
                bound: 0.0,
            });
        }
        let step = level(i);
        let max_k = 1usize << (2 * i).min(62);
        let hyp = par::map_range(max_k + 1, |kk| {
            let l = kk as f64 * step;
            // Past the eccentricity of p both balls are the full sets.
            if l > reach + step {
                return None;
            }
            let d = hausdorff(k, &ball(k, p, l, &all), &ball(k, p, l, a));
            Some((kk, d))
        });
        if let Some((kk, d)) = hyp.into_iter().flatten().find(|&(_, d)| d > step + mesh) {
            return Err(ExperimentError::HypothesisViolated {
                hypothesis: "A2",
                i,
                k: kk,
                measured: d,
                bound: step + mesh,
            });
        }
        let d = hausdorff(k, &ball(k, p, radius, &all), &ball(k, p, radius, a));
        steps.push(StepRecord::at_most(i, "d_H(B(p,R;K), B(p,R;A_i))", d, 2.0 * step + mesh));
    }
    let notes = vec![format!("radius R = {radius}, mesh slack = {mesh}")];
    Ok(ExperimentReport::assemble("ball-convergence", steps, notes, start))
}

/// `d_H(B(p, r), B(p, R)) <= |r - R| + mesh` for each radius pair.
pub fn concentric_ball_check(k: &FiniteMetricSpace, p: usize, radii: &[(f64, f64)], mesh: f64) -> ExperimentReport {
    let start = Instant::now();
    let all: Vec<usize> = (0..k.len()).collect();
    let steps = radii
        .iter()
        .enumerate()
        .map(|(i, &(r, big_r))| {
            let d = hausdorff(k, &ball(k, p, r, &all), &ball(k, p, big_r, &all));
            StepRecord::at_most(i, format!("r={r}, R={big_r}"), d, (r - big_r).abs() + mesh)
        })
        .collect();
    ExperimentReport::assemble("concentric-balls", steps, vec![format!("mesh slack = {mesh}")], start)
}

/// Numeric checks of the weighted-block lemmas at radius `radius`:
/// consecutive separation ratios below 16, emptiness of `B_i(R) ∩ G_k`
/// for `k > i` when `2^(i+1) δ(G_i) > R`, and
/// `d_H(B_i(R), S_i(R)) < 32 · 2^-i`.
pub fn telescope_lemma_checks(spec: &AsymptoticExampleSpec, radius: f64) -> Result<ExperimentReport, ExperimentError> {
    let start = Instant::now();
    if spec.truncation < MIN_TRUNCATION {
        return Err(ExperimentError::TruncationTooSmall(spec.truncation));
    }
    let ex = asymptotic_example(spec)?;
    let n = ex.blocks.len();
    let mut steps = Vec::new();
    for i in 1..n {
        let ratio = ex.blocks[i].separation / ex.blocks[i - 1].separation;
        steps.push(StepRecord::below(i, "sep(G_i)/sep(G_i-1)", ratio, 16.0));
    }
    let per_block = par::map_range(n, |i| {
        let mut out = Vec::new();
        let ball = ex.rescaled_ball(i, radius);
        if level(i + 1).recip() * ex.blocks[i].diameter > radius {
            let stray = ball.iter().filter(|&&p| ex.block_of(p).is_some_and(|b| b > i)).count();
            out.push(StepRecord::new(i, "|B_i(R) ∩ G_k|, k > i", stray as f64, Some(0.0), stray == 0));
        }
        let s = ex.block_ball(i, radius);
        let d = ex.scaled_hausdorff(i, &ball, &s);
        out.push(StepRecord::below(i, "d_H(B_i(R), S_i(R))", d, 32.0 * level(i)));
        out
    });
    steps.extend(per_block.into_iter().flatten());
    steps.sort_by_key(|s| s.i);
    let notes = vec![format!("truncation N = {n}, radius R = {radius}")];
    Ok(ExperimentReport::assemble("weighted-block-lemmas", steps, notes, start))
}

/// Greedy chain from index 0: each next index is the first later one whose
/// GH upper bound to the current one is at most `eps`.
pub fn precompact_subsequence(spaces: &[FiniteMetricSpace], eps: f64) -> Vec<usize> {
    if spaces.is_empty() {
        return Vec::new();
    }
    let mut chain = vec![0];
    let mut current = 0;
    for j in 1..spaces.len() {
        if gh_bounds(&spaces[current], &spaces[j]).upper <= eps {
            chain.push(j);
            current = j;
        }
    }
    chain
}

/// A base space, a rescaled-subset sequence and its candidate limit.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: &'static str,
    pub base: FiniteMetricSpace,
    pub sequence: ScaledSubsetSequence,
    pub target: FiniteMetricSpace,
    pub slack: f64,
}

/// Level-10 Cantor endpoints; `A_i` the part in `[0, 3^-i]`, `u_i = 3^i`,
/// limit the level-6 sample.
pub fn cantor_scenario() -> Result<Scenario, ExperimentError> {
    let base = cantor_sample(10)?;
    let items = (0..=4)
        .map(|i| {
            let width = 3f64.powi(-i);
            let a: Vec<usize> = (0..base.len()).filter(|&p| base.dist(0, p) <= width * (1.0 + 1e-12)).collect();
            (a, 3f64.powi(i))
        })
        .collect();
    let sequence = ScaledSubsetSequence::new(base.clone(), items)?;
    Ok(Scenario { name: "cantor-sub-cantor", base, sequence, target: cantor_sample(6)?, slack: 0.1 })
}

/// 32×32 sup-metric grid; `A_i = {0..2^i}²`, `u_i = 2^-i`, limit the
/// `1/16` lattice of the unit square.
pub fn grid_scenario() -> Result<Scenario, ExperimentError> {
    let side = 32;
    let base = unit_grid(side)?;
    let items = (0..=4)
        .map(|i| {
            let m = 1usize << i;
            let a: Vec<usize> = (0..side * side).filter(|&p| p / side <= m && p % side <= m).collect();
            (a, level(i))
        })
        .collect();
    let sequence = ScaledSubsetSequence::new(base.clone(), items)?;
    Ok(Scenario { name: "grid-quadrant", base, sequence, target: unit_square_lattice(16)?, slack: 0.15 })
}

/// Convergence and dimension reports of a scenario, without timings.
pub fn run_scenario(
    s: &Scenario,
    conv: &ConvergenceParams,
    dim: &DimensionParams,
) -> Result<Vec<ExperimentReport>, ExperimentError> {
    let c = pseudo_cone_convergence(&s.sequence, &s.target, conv);
    let d = dimension_inequality_check(&s.base, &s.sequence, &s.target, s.slack, conv, dim)?;
    Ok(vec![c.without_runtime(), d.without_runtime()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{line_space, path_graph};

    #[test]
    fn constant_sequence_converges_at_zero() {
        let x = line_space(&[0.0, 1.0, 3.0]).unwrap();
        let seq = ScaledSubsetSequence::constant(x.clone(), 5);
        let r = pseudo_cone_convergence(&seq, &x, &ConvergenceParams::default());
        assert!(r.passed());
        assert!(r.steps.iter().all(|s| s.measured == 0.0));
    }

    #[test]
    fn divergent_sequence_fails() {
        let x = line_space(&[0.0, 1.0]).unwrap();
        let seq = ScaledSubsetSequence::new(x.clone(), (0..5).map(|i| (vec![0, 1], 1.0 + i as f64)).collect()).unwrap();
        let r = pseudo_cone_convergence(&seq, &x, &ConvergenceParams::default());
        assert!(!r.passed());
    }

    #[test]
    fn identity_dimension_check_passes_at_zero_slack() {
        let x = line_space(&(0..32).map(f64::from).collect::<Vec<_>>()).unwrap();
        let seq = ScaledSubsetSequence::constant(x.clone(), 4);
        let r = dimension_inequality_check(
            &x,
            &seq,
            &x,
            0.0,
            &ConvergenceParams::default(),
            &DimensionParams::default(),
        )
        .unwrap();
        assert!(r.passed());
        assert_eq!(r.steps[0].measured, r.steps[0].bound.unwrap());
    }

    #[test]
    fn prerequisite_enforced() {
        let x = line_space(&(0..8).map(f64::from).collect::<Vec<_>>()).unwrap();
        let seq = ScaledSubsetSequence::new(x.clone(), (0..5).map(|i| (vec![0, 7], 1.0 + i as f64)).collect()).unwrap();
        let err = dimension_inequality_check(
            &x,
            &seq,
            &x,
            0.1,
            &ConvergenceParams::default(),
            &DimensionParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, ExperimentError::PrerequisiteNotMet(_)));
    }

    #[test]
    fn full_samples_give_zero_distances() {
        let k = path_graph(17, 0.125).unwrap();
        let all: Vec<usize> = (0..17).collect();
        let r = ball_convergence_check(&k, 0, &[all.clone(), all], 1.0, 0.125).unwrap();
        assert!(r.passed());
        assert!(r.steps.iter().all(|s| s.measured == 0.0));
    }

    #[test]
    fn missing_base_point_is_a1_violation() {
        let k = path_graph(5, 0.5).unwrap();
        let err = ball_convergence_check(&k, 0, &[vec![1, 2]], 1.0, 0.5).unwrap_err();
        assert!(matches!(err, ExperimentError::HypothesisViolated { hypothesis: "A1", i: 0, .. }));
    }

    #[test]
    fn lemma_checks_on_small_truncation() {
        let spec = AsymptoticExampleSpec::default_ambient(5);
        let r = telescope_lemma_checks(&spec, 1.0).unwrap();
        assert!(r.passed(), "{r:?}");
        let first = r.steps.iter().find(|s| s.i == 0 && s.label.starts_with("d_H")).unwrap();
        assert_eq!(first.measured, 0.0);
        let small = AsymptoticExampleSpec::default_ambient(1);
        assert_eq!(telescope_lemma_checks(&small, 1.0).unwrap_err(), ExperimentError::TruncationTooSmall(1));
    }

    #[test]
    fn precompact_examples() {
        let a = line_space(&[0.0, 1.0]).unwrap();
        let b = line_space(&[0.0, 5.0]).unwrap();
        assert_eq!(precompact_subsequence(&[a.clone(), a.clone(), a.clone()], 0.1), vec![0, 1, 2]);
        let alt = vec![a.clone(), b.clone(), a.clone(), b, a];
        assert_eq!(precompact_subsequence(&alt, 0.1), vec![0, 2, 4]);
    }
}

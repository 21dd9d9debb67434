//! Gromov–Hausdorff distance between finite metric spaces.
//!
//! For finite spaces `d_GH(X, Y) = ½ · min dis(R)` over correspondences
//! `R ⊆ X × Y` that are surjective onto both sides, where
//! `dis(R) = max |d_X(x, x') − d_Y(y, y')|` over pairs `(x, y), (x', y')` in
//! `R`. Every value computed here goes through that characterisation.
//!
//! [`gh_exact`] searches minimal correspondences by branch and bound.
//! [`gh_bounds`] brackets the distance for spaces of any size.

use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use serde::Serialize;
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, DEFAULT_TOL_METRIC};
use crate::par;

/// Largest space (per side) handled by [`gh_exact`].
pub const DEFAULT_GH_EXACT_LIMIT: usize = 8;
/// Correspondences larger than this skip pair-swap local improvement.
pub const LOCAL_SEARCH_LIMIT: usize = 64;
const MAX_IMPROVEMENT_PASSES: usize = 50;
const ANCHORS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    X,
    Y,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GhError {
    #[error("correspondence does not cover every point of {0:?} (first missing index {1})")]
    NotSurjective(Side, usize),
    #[error("correspondence pair ({0}, {1}) out of range")]
    PairOutOfRange(usize, usize),
    #[error("exact GH requested for spaces of {x} and {y} points, limit is {limit}")]
    ExactLimitExceeded { x: usize, y: usize, limit: usize },
    #[error("approximation check failed: condition {condition} at {witness:?}")]
    VerificationFailed { condition: u8, witness: (usize, usize) },
}

/// A relation between point indices of `X` and `Y`, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        Self { pairs }
    }

    pub fn identity(n: usize) -> Self {
        Self { pairs: (0..n).map(|i| (i, i)).collect() }
    }

    /// Checks both projections are onto.
    pub fn check(&self, nx: usize, ny: usize) -> Result<(), GhError> {
        let mut sx = vec![false; nx];
        let mut sy = vec![false; ny];
        for &(x, y) in &self.pairs {
            if x >= nx || y >= ny {
                return Err(GhError::PairOutOfRange(x, y));
            }
            sx[x] = true;
            sy[y] = true;
        }
        if let Some(i) = sx.iter().position(|s| !s) {
            return Err(GhError::NotSurjective(Side::X, i));
        }
        if let Some(i) = sy.iter().position(|s| !s) {
            return Err(GhError::NotSurjective(Side::Y, i));
        }
        Ok(())
    }
}

/// Worst distance discrepancy over all pairs of matched pairs.
pub fn distortion(
    r: &Correspondence,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<f64, GhError> {
    r.check(x.len(), y.len())?;
    Ok(raw_distortion(&r.pairs, x, y))
}

fn raw_distortion(pairs: &[(usize, usize)], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let per = par::map_range(pairs.len(), |a| {
        let (xa, ya) = pairs[a];
        let rx = x.row(xa);
        let ry = y.row(ya);
        pairs[a + 1..]
            .iter()
            .map(|&(xb, yb)| (rx[xb] - ry[yb]).abs())
            .fold(0.0, f64::max)
    });
    per.into_iter().fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GhKind {
    Exact,
    Interval,
}

/// A GH value with bounds and the correspondence attaining the upper bound.
///
/// Values are half the minimal correspondence distortion, the standard
/// finite-space form of the embedding definition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GhResult {
    pub value: f64,
    pub kind: GhKind,
    pub lower: f64,
    pub upper: f64,
    pub witness: Correspondence,
}

/// Exact GH distance, limited to [`DEFAULT_GH_EXACT_LIMIT`] points per side.
pub fn gh_exact(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<GhResult, GhError> {
    gh_exact_with_limit(x, y, DEFAULT_GH_EXACT_LIMIT)
}

pub fn gh_exact_with_limit(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    limit: usize,
) -> Result<GhResult, GhError> {
    if x.len() > limit || y.len() > limit || y.len() > 63 {
        return Err(GhError::ExactLimitExceeded { x: x.len(), y: y.len(), limit });
    }
    let greedy = greedy_correspondence(x, y);
    let greedy_dis = raw_distortion(&greedy.pairs, x, y);
    let (dis, witness) = BranchAndBound::new(x, y).solve(greedy_dis, greedy);
    let value = dis / 2.0;
    Ok(GhResult { value, kind: GhKind::Exact, lower: value, upper: value, witness })
}

/// Depth-first search over minimal correspondences. In a minimal
/// correspondence each `x` is matched either to one `y`, or to several `y`
/// that are matched to nothing else; the search enumerates exactly those
/// shapes, visiting `x` in order of decreasing eccentricity.
struct BranchAndBound<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    order: Vec<usize>,
}

#[derive(Clone)]
struct Node {
    pairs: Vec<(usize, usize)>,
    covered: u64,
    locked: u64,
    dis: f64,
}

#[derive(Clone)]
enum Choice {
    Single(usize),
    Group(u64),
}

impl<'a> BranchAndBound<'a> {
    fn new(x: &'a FiniteMetricSpace, y: &'a FiniteMetricSpace) -> Self {
        let ecc = x.eccentricities();
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| ecc[b].total_cmp(&ecc[a]).then(a.cmp(&b)));
        Self { x, y, order }
    }

    fn solve(&self, incumbent: f64, fallback: Correspondence) -> (f64, Correspondence) {
        let root = Node { pairs: Vec::new(), covered: 0, locked: 0, dis: 0.0 };
        let shared = AtomicU64::new(incumbent.to_bits());
        let choices = self.choices(&root, 0);
        let branches = par::map_slice(&choices, |c| {
            let child = self.apply(&root, 0, c);
            let mut best: Option<(f64, Vec<(usize, usize)>)> = None;
            let mut local = incumbent;
            if let Some(child) = child {
                self.dfs(child, 1, &shared, &mut local, &mut best);
            }
            best
        });
        let mut out = (incumbent, fallback);
        for (dis, pairs) in branches.into_iter().flatten() {
            if dis < out.0 {
                out = (dis, Correspondence::new(pairs));
            }
        }
        out
    }

    fn bound(shared: &AtomicU64, local: f64) -> f64 {
        f64::from_bits(shared.load(AtomicOrdering::Relaxed)).min(local)
    }

    fn dfs(
        &self,
        node: Node,
        depth: usize,
        shared: &AtomicU64,
        local: &mut f64,
        best: &mut Option<(f64, Vec<(usize, usize)>)>,
    ) {
        if node.dis > Self::bound(shared, *local) {
            return;
        }
        if depth == self.order.len() {
            let all = (1u64 << self.y.len()) - 1;
            if node.covered == all && node.dis < *local {
                *local = node.dis;
                shared.fetch_min(node.dis.to_bits(), AtomicOrdering::Relaxed);
                *best = Some((node.dis, node.pairs));
            }
            return;
        }
        if self.lower_bound(&node, depth) > Self::bound(shared, *local) {
            return;
        }
        for c in self.choices(&node, depth) {
            if let Some(child) = self.apply(&node, depth, &c) {
                self.dfs(child, depth + 1, shared, local, best);
            }
        }
    }

    /// Cost of adding `(xi, yj)` against the pairs already placed.
    fn pair_cost(&self, pairs: &[(usize, usize)], xi: usize, yj: usize) -> f64 {
        let rx = self.x.row(xi);
        let ry = self.y.row(yj);
        pairs.iter().map(|&(a, b)| (rx[a] - ry[b]).abs()).fold(0.0, f64::max)
    }

    /// Every remaining `x` needs some partner, and every uncovered `y` needs
    /// a remaining `x`.
    fn lower_bound(&self, node: &Node, depth: usize) -> f64 {
        let rest = &self.order[depth..];
        let ny = self.y.len();
        let mut lb = 0.0f64;
        for &xi in rest {
            let m = (0..ny)
                .filter(|&yj| node.locked >> yj & 1 == 0)
                .map(|yj| self.pair_cost(&node.pairs, xi, yj))
                .fold(f64::INFINITY, f64::min);
            lb = lb.max(m);
        }
        for yj in (0..ny).filter(|&yj| node.covered >> yj & 1 == 0) {
            let m = rest
                .iter()
                .map(|&xi| self.pair_cost(&node.pairs, xi, yj))
                .fold(f64::INFINITY, f64::min);
            lb = lb.max(m);
        }
        lb
    }

    fn choices(&self, node: &Node, depth: usize) -> Vec<Choice> {
        let ny = self.y.len();
        let remaining_x = self.order.len() - depth;
        let free = ((1u64 << ny) - 1) & !node.covered & !node.locked;
        let uncovered = ((1u64 << ny) - 1) & !node.covered;
        let xi = self.order[depth];
        let mut singles: Vec<(f64, usize)> = (0..ny)
            .filter(|&yj| node.locked >> yj & 1 == 0)
            .map(|yj| (self.pair_cost(&node.pairs, xi, yj), yj))
            .collect();
        singles.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut out: Vec<Choice> = Vec::new();
        // The last x must absorb every uncovered y.
        if remaining_x == 1 {
            if uncovered.count_ones() <= 1 {
                out.extend(singles.into_iter().filter_map(|(_, yj)| {
                    (uncovered == 0 || uncovered == 1 << yj).then_some(Choice::Single(yj))
                }));
            } else if uncovered & node.locked == 0 && uncovered == free {
                out.push(Choice::Group(uncovered));
            }
            return out;
        }
        out.extend(singles.into_iter().map(|(_, yj)| Choice::Single(yj)));
        if free.count_ones() >= 2 {
            let mut groups: Vec<(usize, u64)> = Vec::new();
            let mut sub = free;
            while sub != 0 {
                if sub.count_ones() >= 2 {
                    groups.push((sub.count_ones() as usize, sub));
                }
                sub = (sub - 1) & free;
            }
            groups.sort_unstable();
            out.extend(groups.into_iter().map(|(_, g)| Choice::Group(g)));
        }
        out
    }

    fn apply(&self, node: &Node, depth: usize, choice: &Choice) -> Option<Node> {
        let xi = self.order[depth];
        let mut next = node.clone();
        match *choice {
            Choice::Single(yj) => {
                if node.locked >> yj & 1 == 1 {
                    return None;
                }
                next.dis = next.dis.max(self.pair_cost(&node.pairs, xi, yj));
                next.pairs.push((xi, yj));
                next.covered |= 1 << yj;
            }
            Choice::Group(mask) => {
                let ys: Vec<usize> = (0..self.y.len()).filter(|&b| mask >> b & 1 == 1).collect();
                for (a, &yj) in ys.iter().enumerate() {
                    next.dis = next.dis.max(self.pair_cost(&node.pairs, xi, yj));
                    for &yk in &ys[a + 1..] {
                        next.dis = next.dis.max(self.y.dist(yj, yk));
                    }
                }
                next.pairs.extend(ys.iter().map(|&yj| (xi, yj)));
                next.covered |= mask;
                next.locked |= mask;
            }
        }
        Some(next)
    }
}

/// Two-sided interval on the GH distance for spaces of any size.
pub fn gh_bounds(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> GhResult {
    let witness = best_heuristic_correspondence(x, y);
    let upper = raw_distortion(&witness.pairs, x, y) / 2.0;
    let lower = lower_bound(x, y).min(upper);
    GhResult { value: upper, kind: GhKind::Interval, lower, upper, witness }
}

/// Largest of the lower bounds on `d_GH` that hold for every correspondence.
///
/// * half the diameter gap;
/// * half the Hausdorff distance between the two sets of distance values
///   (each distance `d_X(x, x')` is within `dis(R)` of some `d_Y(y, y')`);
/// * half the Hausdorff distance between the eccentricity sets;
/// * for small spaces, half of `max_x min_y d_H(row_x, row_y)` and its mirror,
///   since matched points have distance rows within `dis(R)` of each other.
pub fn lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let diam = (x.diameter() - y.diameter()).abs();
    let mut dx = x.distance_values();
    dx.insert(0, 0.0);
    let mut dy = y.distance_values();
    dy.insert(0, 0.0);
    let spectrum = hausdorff_1d(&dx, &dy);
    let mut ex = x.eccentricities();
    let mut ey = y.eccentricities();
    ex.sort_by(f64::total_cmp);
    ey.sort_by(f64::total_cmp);
    let ecc = hausdorff_1d(&ex, &ey);
    let (n, m) = (x.len(), y.len());
    let local = if n * m * (n + m) <= 20_000_000 { row_profile_bound(x, y) } else { 0.0 };
    diam.max(spectrum).max(ecc).max(local) / 2.0
}

fn row_profile_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let sorted_rows = |s: &FiniteMetricSpace| -> Vec<Vec<f64>> {
        (0..s.len())
            .map(|i| {
                let mut r = s.row(i).to_vec();
                r.sort_by(f64::total_cmp);
                r
            })
            .collect()
    };
    let rx = sorted_rows(x);
    let ry = sorted_rows(y);
    let table = par::map_range(rx.len(), |i| {
        ry.iter().map(|r| hausdorff_1d(&rx[i], r)).collect::<Vec<f64>>()
    });
    let from_x = table.iter().map(|row| row.iter().copied().fold(f64::INFINITY, f64::min));
    let from_y = (0..ry.len()).map(|j| table.iter().map(|row| row[j]).fold(f64::INFINITY, f64::min));
    from_x.chain(from_y).fold(0.0, f64::max)
}

/// Hausdorff distance between two sorted non-empty sets of reals.
fn hausdorff_1d(a: &[f64], b: &[f64]) -> f64 {
    directed_1d(a, b).max(directed_1d(b, a))
}

fn directed_1d(a: &[f64], b: &[f64]) -> f64 {
    let mut j = 0;
    let mut worst = 0.0f64;
    for &v in a {
        while j + 1 < b.len() && b[j + 1] <= v {
            j += 1;
        }
        let mut d = (v - b[j]).abs();
        if j + 1 < b.len() {
            d = d.min((b[j + 1] - v).abs());
        }
        worst = worst.max(d);
    }
    worst
}

/// Profile matching on mean distance, refined by pair swaps.
pub fn greedy_correspondence(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Correspondence {
    let px = mean_profile(x);
    let py = mean_profile(y);
    let pairs = nearest_pairs(x.len(), y.len(), |i, j| (px[i] - py[j]).abs());
    local_improve(Correspondence::new(pairs), x, y)
}

fn mean_profile(s: &FiniteMetricSpace) -> Vec<f64> {
    let n = s.len() as f64;
    (0..s.len()).map(|i| s.row(i).iter().sum::<f64>() / n).collect()
}

/// Each `x` to its cheapest `y` and each `y` to its cheapest `x`; ties by index.
fn nearest_pairs<F>(nx: usize, ny: usize, cost: F) -> Vec<(usize, usize)>
where
    F: Fn(usize, usize) -> f64 + Sync + Send,
{
    let argmin = |it: &mut dyn Iterator<Item = (usize, f64)>| -> usize {
        let mut best = (usize::MAX, f64::INFINITY);
        for (k, c) in it {
            if c < best.1 {
                best = (k, c);
            }
        }
        best.0
    };
    let xs = par::map_range(nx, |i| (i, argmin(&mut (0..ny).map(|j| (j, cost(i, j))))));
    let ys = par::map_range(ny, |j| (argmin(&mut (0..nx).map(|i| (i, cost(i, j)))), j));
    xs.into_iter().chain(ys).collect()
}

/// Fréchet coordinates against farthest-point anchors, matched in order.
fn anchor_correspondence(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    ax: &[usize],
    ay: &[usize],
) -> Correspondence {
    let pairs = nearest_pairs(x.len(), y.len(), |i, j| {
        ax.iter()
            .zip(ay)
            .map(|(&a, &b)| (x.dist(i, a) - y.dist(j, b)).abs())
            .fold(0.0, f64::max)
    });
    Correspondence::new(pairs)
}

fn farthest_point_anchors(s: &FiniteMetricSpace, first: usize, k: usize) -> Vec<usize> {
    let mut anchors = vec![first];
    let mut near: Vec<f64> = s.row(first).to_vec();
    while anchors.len() < k.min(s.len()) {
        let mut best = (0usize, -1.0f64);
        for (i, &v) in near.iter().enumerate() {
            if v > best.1 {
                best = (i, v);
            }
        }
        anchors.push(best.0);
        for (i, v) in near.iter_mut().enumerate() {
            *v = v.min(s.dist(best.0, i));
        }
    }
    anchors
}

fn most_eccentric(s: &FiniteMetricSpace, count: usize) -> Vec<usize> {
    let ecc = s.eccentricities();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| ecc[b].total_cmp(&ecc[a]).then(a.cmp(&b)));
    order.truncate(count);
    order
}

/// Best of the profile, anchor and (for equal sizes) identity
/// correspondences, locally improved when small.
pub fn best_heuristic_correspondence(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Correspondence {
    let px = mean_profile(x);
    let py = mean_profile(y);
    let mut candidates =
        vec![Correspondence::new(nearest_pairs(x.len(), y.len(), |i, j| (px[i] - py[j]).abs()))];
    if x.len() == y.len() {
        candidates.push(Correspondence::identity(x.len()));
    }
    let ax = farthest_point_anchors(x, most_eccentric(x, 1)[0], ANCHORS);
    for start in most_eccentric(y, 2) {
        let ay = farthest_point_anchors(y, start, ANCHORS);
        let k = ax.len().min(ay.len());
        candidates.push(anchor_correspondence(x, y, &ax[..k], &ay[..k]));
    }
    let mut best: Option<(f64, Correspondence)> = None;
    for c in candidates {
        let dis = raw_distortion(&c.pairs, x, y);
        if best.as_ref().is_none_or(|(b, _)| dis < *b) {
            best = Some((dis, c));
        }
    }
    let (_, c) = best.expect("at least one candidate");
    local_improve(c, x, y)
}

/// Single-pair removals and endpoint swaps while distortion strictly drops.
fn local_improve(mut r: Correspondence, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Correspondence {
    if r.pairs.len() > LOCAL_SEARCH_LIMIT {
        return r;
    }
    let (nx, ny) = (x.len(), y.len());
    let mut current = raw_distortion(&r.pairs, x, y);
    for _ in 0..MAX_IMPROVEMENT_PASSES {
        let mut improved = false;
        let mut a = 0;
        while a < r.pairs.len() {
            let (xa, ya) = r.pairs[a];
            let mut trials: Vec<Vec<(usize, usize)>> = Vec::new();
            let mut without = r.pairs.clone();
            without.remove(a);
            trials.push(without.clone());
            for yb in (0..ny).filter(|&yb| yb != ya) {
                let mut t = without.clone();
                t.push((xa, yb));
                trials.push(t);
            }
            for xb in (0..nx).filter(|&xb| xb != xa) {
                let mut t = without.clone();
                t.push((xb, ya));
                trials.push(t);
            }
            let mut accepted = false;
            for t in trials {
                let cand = Correspondence::new(t);
                if cand.check(nx, ny).is_err() {
                    continue;
                }
                let dis = raw_distortion(&cand.pairs, x, y);
                if dis < current {
                    current = dis;
                    r = cand;
                    accepted = true;
                    break;
                }
            }
            if accepted {
                improved = true;
            } else {
                a += 1;
            }
        }
        if !improved {
            break;
        }
    }
    r
}

/// A pair of maps `f: X → Y`, `g: Y → X` with their certified epsilon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationPair {
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    pub epsilon: f64,
}

/// Reads maps off a correspondence (lowest matched index wins) and verifies
/// the three approximation conditions with `epsilon = dis(R) + tol`.
pub fn extract_approximation(
    r: &Correspondence,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<ApproximationPair, GhError> {
    extract_approximation_with_tol(r, x, y, DEFAULT_TOL_METRIC)
}

pub fn extract_approximation_with_tol(
    r: &Correspondence,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    tol: f64,
) -> Result<ApproximationPair, GhError> {
    let dis = distortion(r, x, y)?;
    let mut f = vec![usize::MAX; x.len()];
    let mut g = vec![usize::MAX; y.len()];
    for &(a, b) in &r.pairs {
        if f[a] == usize::MAX {
            f[a] = b;
        }
        if g[b] == usize::MAX {
            g[b] = a;
        }
    }
    let epsilon = dis + tol;
    let pair = ApproximationPair { f, g, epsilon };
    verify_approximation(&pair, x, y)?;
    Ok(pair)
}

/// Checks the three conditions strictly below `pair.epsilon`.
pub fn verify_approximation(
    pair: &ApproximationPair,
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
) -> Result<(), GhError> {
    let eps = pair.epsilon;
    for a in 0..x.len() {
        for b in 0..x.len() {
            if (x.dist(a, b) - y.dist(pair.f[a], pair.f[b])).abs() >= eps {
                return Err(GhError::VerificationFailed { condition: 1, witness: (a, b) });
            }
        }
    }
    for a in 0..y.len() {
        for b in 0..y.len() {
            if (y.dist(a, b) - x.dist(pair.g[a], pair.g[b])).abs() >= eps {
                return Err(GhError::VerificationFailed { condition: 2, witness: (a, b) });
            }
        }
    }
    for a in 0..x.len() {
        if x.dist(pair.g[pair.f[a]], a) >= eps {
            return Err(GhError::VerificationFailed { condition: 3, witness: (a, pair.f[a]) });
        }
    }
    for b in 0..y.len() {
        if y.dist(pair.f[pair.g[b]], b) >= eps {
            return Err(GhError::VerificationFailed { condition: 3, witness: (pair.g[b], b) });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        let rows: Vec<Vec<f64>> =
            points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect();
        FiniteMetricSpace::validate(&rows, None, 1e-9).unwrap()
    }

    #[test]
    fn distortion_examples() {
        let x = line(&[0.0, 1.0, 5.0]);
        assert_eq!(distortion(&Correspondence::identity(3), &x, &x).unwrap(), 0.0);
        let p = line(&[0.0]);
        let two = line(&[0.0, 2.0]);
        let forced = Correspondence::new(vec![(0, 0), (0, 1)]);
        assert_eq!(distortion(&forced, &p, &two).unwrap(), 2.0);
        let a = line(&[0.0, 1.0]);
        let b = line(&[0.0, 3.0]);
        assert_eq!(distortion(&Correspondence::identity(2), &a, &b).unwrap(), 2.0);
        let partial = Correspondence::new(vec![(0, 0)]);
        assert_eq!(
            distortion(&partial, &a, &b).unwrap_err(),
            GhError::NotSurjective(Side::X, 1)
        );
    }

    #[test]
    fn exact_examples() {
        let x = line(&[0.0, 1.0, 3.0, 7.0]);
        let r = gh_exact(&x, &x).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.kind, GhKind::Exact);
        let p = line(&[0.0]);
        let two = line(&[0.0, 3.0]);
        assert_eq!(gh_exact(&p, &two).unwrap().value, 1.5);
        assert_eq!(gh_exact(&two, &p).unwrap().value, 1.5);
    }

    #[test]
    fn exact_limit() {
        let pts: Vec<f64> = (0..9).map(f64::from).collect();
        let big = line(&pts);
        assert!(matches!(gh_exact(&big, &big), Err(GhError::ExactLimitExceeded { .. })));
    }

    #[test]
    fn bounds_examples() {
        let x = line(&[0.0, 1.0, 3.0]);
        let b = gh_bounds(&x, &x);
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        let p = line(&[0.0]);
        let b = gh_bounds(&p, &x);
        assert!(b.lower >= x.diameter() / 2.0);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn duplicated_point_keeps_lower_bound_small() {
        // A padded multiset comparison would report ~0.5 here.
        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let y = line(&[0.0, 1e-3, 1.0, 2.0, 3.0]);
        let exact = gh_exact(&x, &y).unwrap().value;
        assert!(exact <= 5e-4 + 1e-15);
        assert!(lower_bound(&x, &y) <= exact + 1e-15);
    }

    #[test]
    fn approximation_from_identity_and_forced() {
        let x = line(&[0.0, 2.0, 5.0]);
        let a = extract_approximation(&Correspondence::identity(3), &x, &x).unwrap();
        assert_eq!(a.epsilon, DEFAULT_TOL_METRIC);
        assert_eq!(a.f, vec![0, 1, 2]);
        let p = line(&[0.0]);
        let two = line(&[0.0, 3.0]);
        let r = Correspondence::new(vec![(0, 0), (0, 1)]);
        let a = extract_approximation(&r, &p, &two).unwrap();
        assert_eq!(a.f, vec![0]);
        assert_eq!(a.g, vec![0, 0]);
        let roundtrip = two.dist(a.f[a.g[1]], 1);
        assert!(roundtrip <= 3.0 && roundtrip < a.epsilon);
    }

    #[test]
    fn hausdorff_1d_basics() {
        assert_eq!(hausdorff_1d(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
        assert_eq!(hausdorff_1d(&[0.0], &[0.0, 3.0]), 3.0);
        assert_eq!(hausdorff_1d(&[0.0, 2.0, 10.0], &[1.0, 9.0]), 1.0);
    }
}

//! Covering numbers, separated sets and empirical doubling constants.
//!
//! Blocks of a cover are always drawn from the covered subset itself, never
//! from the surrounding space; certificates record this restriction.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, SubsetView};
use crate::par;

/// Largest subset for which exact covering numbers are computed.
pub const DEFAULT_EXACT_COVER_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverError {
    #[error("covering radius must be positive and finite, got {0}")]
    NonPositiveRadius(f64),
    #[error("exact cover requested for {card} points, limit is {limit}")]
    ExactLimitExceeded { card: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMode {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    UpperBound,
}

/// A cover of a subset by blocks of diameter at most `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverCertificate {
    pub r: f64,
    pub count: usize,
    pub exactness: Exactness,
    /// Blocks as sorted base-space indices.
    pub blocks: Vec<Vec<usize>>,
    /// Blocks are subsets of the covered set rather than of the whole space.
    pub blocks_within_subset: bool,
}

/// Minimum (exact) or greedy number of diameter-`r` blocks covering `s`.
pub fn covering_number(
    s: &SubsetView<'_>,
    r: f64,
    mode: CoverMode,
) -> Result<CoverCertificate, CoverError> {
    covering_number_with_limit(s, r, mode, DEFAULT_EXACT_COVER_LIMIT)
}

pub fn covering_number_with_limit(
    s: &SubsetView<'_>,
    r: f64,
    mode: CoverMode,
    exact_limit: usize,
) -> Result<CoverCertificate, CoverError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(CoverError::NonPositiveRadius(r));
    }
    match mode {
        CoverMode::Greedy => Ok(greedy_cover(s, r)),
        CoverMode::Exact => {
            let card = s.len();
            if card > exact_limit || card > 32 {
                return Err(CoverError::ExactLimitExceeded { card, limit: exact_limit.min(32) });
            }
            Ok(exact_cover(s, r))
        }
    }
}

/// Greedy cover count only; skips building the certificate blocks.
pub(crate) fn greedy_cover_count(s: &SubsetView<'_>, r: f64) -> usize {
    let (candidates, _) = greedy_candidates(s, r);
    greedy_set_cover(s.len(), &candidates).len()
}

fn greedy_cover(s: &SubsetView<'_>, r: f64) -> CoverCertificate {
    let (candidates, blocks) = greedy_candidates(s, r);
    let chosen = greedy_set_cover(s.len(), &candidates);
    CoverCertificate {
        r,
        count: chosen.len(),
        exactness: Exactness::UpperBound,
        blocks: chosen.into_iter().map(|c| blocks[c].clone()).collect(),
        blocks_within_subset: true,
    }
}

/// One maximal block per point, grown from it in order of distance
/// (ties by index). Deduplicated and sorted lexicographically, so the
/// greedy tie-break on candidate order is the lexicographic one.
fn greedy_candidates(s: &SubsetView<'_>, r: f64) -> (Vec<BitSet>, Vec<Vec<usize>>) {
    let base = s.base();
    let idx = s.indices();
    let m = idx.len();
    let mut blocks: Vec<Vec<usize>> = par::map_range(m, |a| {
        let row = base.row(idx[a]);
        let mut near: Vec<usize> = (0..m).filter(|&b| b != a && row[idx[b]] <= r).collect();
        near.sort_by(|&b, &c| row[idx[b]].total_cmp(&row[idx[c]]).then(idx[b].cmp(&idx[c])));
        let mut block = vec![a];
        for b in near {
            let rb = base.row(idx[b]);
            if block.iter().all(|&c| rb[idx[c]] <= r) {
                block.push(b);
            }
        }
        let mut ids: Vec<usize> = block.into_iter().map(|p| idx[p]).collect();
        ids.sort_unstable();
        ids
    });
    blocks.sort();
    blocks.dedup();
    let pos = position_lookup(s);
    let sets = blocks
        .iter()
        .map(|b| {
            let mut bs = BitSet::new(m);
            for &i in b {
                bs.insert(pos[i]);
            }
            bs
        })
        .collect();
    (sets, blocks)
}

fn position_lookup(s: &SubsetView<'_>) -> Vec<usize> {
    let mut pos = vec![usize::MAX; s.base().len()];
    for (p, &i) in s.indices().iter().enumerate() {
        pos[i] = p;
    }
    pos
}

/// Lazy greedy set cover over `m` elements. Picks the candidate covering the
/// most uncovered elements; ties go to the lowest candidate position.
pub(crate) fn greedy_set_cover(m: usize, candidates: &[BitSet]) -> Vec<usize> {
    let mut uncovered = BitSet::full(m);
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> = candidates
        .iter()
        .enumerate()
        .map(|(c, set)| (set.count(), Reverse(c)))
        .collect();
    let mut chosen = Vec::new();
    let mut remaining = m;
    while remaining > 0 {
        let Some((_, Reverse(c))) = heap.pop() else { break };
        let gain = candidates[c].intersection_count(&uncovered);
        if gain == 0 {
            continue;
        }
        let fresh = (gain, Reverse(c));
        if let Some(top) = heap.peek() {
            if fresh.cmp(top) == Ordering::Less {
                heap.push(fresh);
                continue;
            }
        }
        uncovered.difference_with(&candidates[c]);
        remaining -= gain;
        chosen.push(c);
    }
    chosen
}

fn exact_cover(s: &SubsetView<'_>, r: f64) -> CoverCertificate {
    let base = s.base();
    let idx = s.indices();
    let m = idx.len();
    let mut adj = vec![0u32; m];
    for a in 0..m {
        for b in 0..m {
            if a != b && base.dist(idx[a], idx[b]) <= r {
                adj[a] |= 1 << b;
            }
        }
    }
    let mut cliques = Vec::new();
    bron_kerbosch(&adj, 0, full_mask(m), 0, &mut cliques);
    let to_ids = |mask: u32| -> Vec<usize> {
        let mut v: Vec<usize> = (0..m).filter(|&p| mask >> p & 1 == 1).map(|p| idx[p]).collect();
        v.sort_unstable();
        v
    };
    // Deterministic candidate order: lexicographic on base indices.
    let mut keyed: Vec<(Vec<usize>, u32)> = cliques.into_iter().map(|c| (to_ids(c), c)).collect();
    keyed.sort();
    let masks: Vec<u32> = keyed.iter().map(|(_, c)| *c).collect();
    let chosen = exact_set_cover(m, &masks);
    CoverCertificate {
        r,
        count: chosen.len(),
        exactness: Exactness::Exact,
        blocks: chosen.into_iter().map(|c| keyed[c].0.clone()).collect(),
        blocks_within_subset: true,
    }
}

fn full_mask(m: usize) -> u32 {
    if m == 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

/// Maximal cliques with Tomita pivoting.
fn bron_kerbosch(adj: &[u32], r: u32, mut p: u32, mut x: u32, out: &mut Vec<u32>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    let pu = p | x;
    let pivot = (0..adj.len())
        .filter(|&u| pu >> u & 1 == 1)
        .max_by_key(|&u| ((p & adj[u]).count_ones(), Reverse(u)))
        .expect("p | x non-empty");
    let mut cand = p & !adj[pivot];
    while cand != 0 {
        let v = cand.trailing_zeros() as usize;
        cand &= cand - 1;
        bron_kerbosch(adj, r | 1 << v, p & adj[v], x & adj[v], out);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

/// Minimum set cover of `m <= 32` elements by the given masks.
/// Assumes the union of `candidates` covers every element. Among optimal
/// covers, returns the first one found by a depth-first search that
/// branches on the uncovered element with the fewest candidates.
pub(crate) fn exact_set_cover(m: usize, candidates: &[u32]) -> Vec<usize> {
    let universe = full_mask(m);
    if m == 0 {
        return Vec::new();
    }
    let containing: Vec<Vec<usize>> = (0..m)
        .map(|e| (0..candidates.len()).filter(|&c| candidates[c] >> e & 1 == 1).collect())
        .collect();
    // Elements sharing at least one candidate with e.
    let compatible: Vec<u32> = (0..m)
        .map(|e| containing[e].iter().fold(0u32, |acc, &c| acc | candidates[c]))
        .collect();
    let mut incumbent: Vec<usize> = {
        let sets: Vec<BitSet> = candidates.iter().map(|&c| BitSet::from_mask(m, c)).collect();
        greedy_set_cover(m, &sets)
    };
    let mut stack = Vec::new();
    struct Ctx<'a> {
        candidates: &'a [u32],
        containing: &'a [Vec<usize>],
        compatible: &'a [u32],
    }
    fn packing_bound(ctx: &Ctx<'_>, mut uncovered: u32) -> usize {
        let mut k = 0;
        while uncovered != 0 {
            let e = uncovered.trailing_zeros() as usize;
            uncovered &= !ctx.compatible[e];
            uncovered &= !(1 << e);
            k += 1;
        }
        k
    }
    fn search(ctx: &Ctx<'_>, uncovered: u32, stack: &mut Vec<usize>, best: &mut Vec<usize>) {
        if uncovered == 0 {
            if stack.len() < best.len() {
                *best = stack.clone();
            }
            return;
        }
        if stack.len() + packing_bound(ctx, uncovered) >= best.len() {
            return;
        }
        let mut rest = uncovered;
        let mut pick = usize::MAX;
        let mut fewest = usize::MAX;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if ctx.containing[e].len() < fewest {
                fewest = ctx.containing[e].len();
                pick = e;
            }
        }
        let mut options = ctx.containing[pick].clone();
        options.sort_by_key(|&c| (Reverse((ctx.candidates[c] & uncovered).count_ones()), c));
        for c in options {
            stack.push(c);
            search(ctx, uncovered & !ctx.candidates[c], stack, best);
            stack.pop();
        }
    }
    let ctx = Ctx { candidates, containing: &containing, compatible: &compatible };
    search(&ctx, universe, &mut stack, &mut incumbent);
    incumbent
}

/// Greedy maximal `r`-separated subset of `s`, scanned in the view's order
/// starting from its first point.
pub fn max_separated_set<'a>(s: &SubsetView<'a>, r: f64) -> SubsetView<'a> {
    let base = s.base();
    let chosen = greedy_net(base, s.indices(), r);
    SubsetView::new(base, chosen).expect("greedy net of a non-empty subset is non-empty")
}

pub(crate) fn greedy_net(base: &FiniteMetricSpace, order: &[usize], r: f64) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for &i in order {
        let row = base.row(i);
        if chosen.iter().all(|&c| row[c] >= r) {
            chosen.push(i);
        }
    }
    chosen
}

/// Largest minimal half-diameter cover over all metric balls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingEstimate {
    pub value: usize,
    /// True when every per-ball minimum was computed exactly.
    pub exact: bool,
    pub center: usize,
    pub radius: f64,
    /// Only metric balls are examined, not all bounded sets.
    pub restricted_to_balls: bool,
}

/// Empirical doubling constant: the maximum over balls `S = B(x, R)`, with
/// `R` ranging over the distances from `x`, of the fewest centres
/// `F` in `X` with `S` inside `B(F, diam(S)/2)`.
pub fn doubling_constant_empirical(x: &FiniteMetricSpace) -> DoublingEstimate {
    doubling_constant_with_limit(x, DEFAULT_EXACT_COVER_LIMIT)
}

pub fn doubling_constant_with_limit(x: &FiniteMetricSpace, exact_limit: usize) -> DoublingEstimate {
    let n = x.len();
    let per_center = par::map_range(n, |c| {
        let mut radii = x.row(c).to_vec();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let mut best = (1usize, true, 0.0f64);
        let mut all_exact = true;
        for &radius in &radii {
            let ball = x.closed_ball(c, radius);
            let (count, exact) = half_diameter_cover(x, &ball, exact_limit);
            all_exact &= exact;
            if count > best.0 {
                best = (count, exact, radius);
            }
        }
        (best.0, all_exact, best.2)
    });
    let mut out = DoublingEstimate {
        value: 0,
        exact: true,
        center: 0,
        radius: 0.0,
        restricted_to_balls: true,
    };
    for (c, (value, exact, radius)) in per_center.into_iter().enumerate() {
        out.exact &= exact;
        if value > out.value {
            out.value = value;
            out.center = c;
            out.radius = radius;
        }
    }
    out
}

fn half_diameter_cover(x: &FiniteMetricSpace, s: &SubsetView<'_>, exact_limit: usize) -> (usize, bool) {
    let half = s.diameter() / 2.0;
    let idx = s.indices();
    let m = idx.len();
    if m == 1 {
        return (1, true);
    }
    // Candidate centres: every point of X, each covering S ∩ B(f, δ/2).
    let mut sets: Vec<Vec<usize>> = (0..x.len())
        .map(|f| {
            let row = x.row(f);
            (0..m).filter(|&p| row[idx[p]] <= half).collect::<Vec<_>>()
        })
        .filter(|v| !v.is_empty())
        .collect();
    sets.sort();
    sets.dedup();
    if m <= exact_limit.min(32) {
        let masks: Vec<u32> =
            sets.iter().map(|v| v.iter().fold(0u32, |acc, &p| acc | 1 << p)).collect();
        let masks = drop_dominated(masks);
        (exact_set_cover(m, &masks).len(), true)
    } else {
        let bits: Vec<BitSet> = sets
            .iter()
            .map(|v| {
                let mut b = BitSet::new(m);
                v.iter().for_each(|&p| b.insert(p));
                b
            })
            .collect();
        (greedy_set_cover(m, &bits).len(), false)
    }
}

fn drop_dominated(mut masks: Vec<u32>) -> Vec<u32> {
    masks.sort_unstable();
    masks.dedup();
    let keep: Vec<u32> = masks
        .iter()
        .copied()
        .filter(|&a| !masks.iter().any(|&b| b != a && a & b == a))
        .collect();
    keep
}

/// Fixed-size bit set over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Self::new(len);
        for i in 0..len {
            b.insert(i);
        }
        b
    }

    pub fn from_mask(len: usize, mask: u32) -> Self {
        let mut b = Self::new(len);
        if !b.words.is_empty() {
            b.words[0] = mask as u64;
        }
        b
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersection_count(&self, other: &Self) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn difference_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }
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
    fn singleton_and_large_radius() {
        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let one = x.subset(vec![2]).unwrap();
        for mode in [CoverMode::Exact, CoverMode::Greedy] {
            assert_eq!(covering_number(&one, 0.1, mode).unwrap().count, 1);
            assert_eq!(covering_number(&x.full(), 3.0, mode).unwrap().count, 1);
        }
    }

    #[test]
    fn four_points_unit_radius() {
        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let cert = covering_number(&x.full(), 1.0, CoverMode::Exact).unwrap();
        assert_eq!(cert.count, 2);
        assert_eq!(cert.exactness, Exactness::Exact);
        assert_eq!(cert.blocks, vec![vec![0, 1], vec![2, 3]]);
        let greedy = covering_number(&x.full(), 1.0, CoverMode::Greedy).unwrap();
        assert_eq!(greedy.exactness, Exactness::UpperBound);
        assert!(greedy.count >= 2);
    }

    #[test]
    fn errors() {
        let x = line(&[0.0, 1.0]);
        assert_eq!(
            covering_number(&x.full(), 0.0, CoverMode::Greedy).unwrap_err(),
            CoverError::NonPositiveRadius(0.0)
        );
        let pts: Vec<f64> = (0..25).map(f64::from).collect();
        let big = line(&pts);
        assert_eq!(
            covering_number(&big.full(), 1.0, CoverMode::Exact).unwrap_err(),
            CoverError::ExactLimitExceeded { card: 25, limit: 20 }
        );
    }

    #[test]
    fn separated_set_examples() {
        let x = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(max_separated_set(&x.full(), 2.0).indices(), &[0, 2, 4]);
        assert_eq!(max_separated_set(&x.full(), 10.0).len(), 1);
    }

    #[test]
    fn doubling_examples() {
        let one = line(&[0.0]);
        assert_eq!(doubling_constant_empirical(&one).value, 1);
        let ap: Vec<f64> = (0..16).map(f64::from).collect();
        let est = doubling_constant_empirical(&line(&ap));
        assert!((2..=3).contains(&est.value), "{est:?}");
        assert!(est.exact);
    }

    #[test]
    fn greedy_prefers_lexicographically_smallest_on_ties() {
        // Three equally good blocks of size two; {0,1} must be first.
        let x = line(&[0.0, 1.0, 2.0]);
        let cert = covering_number(&x.full(), 1.0, CoverMode::Greedy).unwrap();
        assert_eq!(cert.blocks[0], vec![0, 1]);
        assert_eq!(cert.count, 2);
    }
}

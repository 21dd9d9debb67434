//! Generators for example spaces.
//!
//! * point samples: Cantor endpoints, progressions, sup-metric grids;
//! * shortest-path metrics of weighted graphs;
//! * telescope spaces over a sequence of shrinking blocks;
//! * the weighted-block example space indexed by an adjacency-respecting
//!   walk through `N² × Z`, together with its index maps.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, MetricError, SubsetView, DEFAULT_TOL_METRIC};
use crate::par;

pub const MAX_CANTOR_LEVEL: u32 = 14;
/// Largest factorial index accepted by [`rescale_schedule`].
pub const FACTORIAL_GUARD: usize = 20;
/// Largest truncation that [`AsymptoticExample::to_space`] materialises.
pub const DEFAULT_MAX_MATERIALIZED: usize = 8;
/// Ambient spaces are enumerated exhaustively, so they stay small.
pub const MAX_AMBIENT_POINTS: usize = 18;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error("Cantor level {0} exceeds the maximum of {MAX_CANTOR_LEVEL}")]
    LevelTooLarge(u32),
    #[error("graph is disconnected: vertex {0} unreachable from vertex 0")]
    DisconnectedGraph(usize),
    #[error("edge ({0}, {1}) has non-positive or non-finite length {2}")]
    BadEdge(usize, usize, f64),
    #[error("edge endpoint {0} out of range")]
    VertexOutOfRange(usize),
    #[error("telescope block {0} has diameter {1} > 2^-{0}")]
    DiameterBoundViolated(usize, f64),
    #[error("base point missing from subset")]
    BasePointMissing,
    #[error("subset has a single point")]
    Singleton,
    #[error("no dictionary set realises bucket (j={j}, k={k}) required by block {i}")]
    BucketUnrealizable { i: usize, j: u64, k: i64 },
    #[error("ambient space has {0} points; at most {MAX_AMBIENT_POINTS} are supported")]
    AmbientTooLarge(usize),
    #[error("truncation {0} cannot be materialised (limit {1}); use the log-weight form")]
    TruncationTooLarge(usize, usize),
    #[error("factorial schedule index {0} beyond guard {FACTORIAL_GUARD}")]
    FactorialOverflow(usize),
    #[error("spec is inconsistent: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Metric used to turn coordinates into distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Sup,
    Euclidean,
}

/// Distances between coordinate vectors under a norm (distinct points
/// required).
pub fn from_points(
    points: &[Vec<f64>],
    norm: Norm,
    labels: Option<Vec<String>>,
) -> Result<FiniteMetricSpace, ConstructionError> {
    let n = points.len();
    let rows = par::map_range(n, |i| {
        points
            .iter()
            .map(|q| {
                let diffs = points[i].iter().zip(q).map(|(a, b)| (a - b).abs());
                match norm {
                    Norm::Sup => diffs.fold(0.0, f64::max),
                    Norm::Euclidean => diffs.map(|v| v * v).sum::<f64>().sqrt(),
                }
            })
            .collect::<Vec<f64>>()
    });
    let d = rows.into_iter().flatten().collect();
    Ok(FiniteMetricSpace::from_trusted_metric(n, d, labels)?)
}

/// Integer lattice points scaled by `1/denom`. Distances are taken from the
/// exact integer differences, so equal gaps give bit-identical distances.
pub fn from_lattice_points(
    points: &[Vec<i64>],
    denom: f64,
    labels: Option<Vec<String>>,
) -> Result<FiniteMetricSpace, ConstructionError> {
    let n = points.len();
    let rows = par::map_range(n, |i| {
        points
            .iter()
            .map(|q| {
                let m = points[i].iter().zip(q).map(|(a, b)| a.abs_diff(*b)).max().unwrap_or(0);
                m as f64 / denom
            })
            .collect::<Vec<f64>>()
    });
    let d = rows.into_iter().flatten().collect();
    Ok(FiniteMetricSpace::from_trusted_metric(n, d, labels)?)
}

/// Points on the real line with `|a - b|`.
pub fn line_space(points: &[f64]) -> Result<FiniteMetricSpace, ConstructionError> {
    let pts: Vec<Vec<f64>> = points.iter().map(|&p| vec![p]).collect();
    from_points(&pts, Norm::Sup, None)
}

/// The `2^(level+1)` interval endpoints of the middle-third construction.
pub fn cantor_sample(level: u32) -> Result<FiniteMetricSpace, ConstructionError> {
    if level > MAX_CANTOR_LEVEL {
        return Err(ConstructionError::LevelTooLarge(level));
    }
    let unit = 3u64.pow(level);
    let mut intervals = vec![(0u64, unit)];
    for _ in 0..level {
        intervals = intervals
            .into_iter()
            .flat_map(|(a, b)| {
                let t = (b - a) / 3;
                [(a, a + t), (b - t, b)]
            })
            .collect();
    }
    let mut ends: Vec<u64> = intervals.iter().flat_map(|&(a, b)| [a, b]).collect();
    ends.sort_unstable();
    ends.dedup();
    let labels = ends.iter().map(|e| format!("{e}/3^{level}")).collect();
    let pts: Vec<Vec<i64>> = ends.iter().map(|&e| vec![e as i64]).collect();
    from_lattice_points(&pts, unit as f64, Some(labels))
}

/// `0, 1, ..., n-1` on the line.
pub fn progression(n: usize) -> Result<FiniteMetricSpace, ConstructionError> {
    let pts: Vec<Vec<i64>> = (0..n as i64).map(|i| vec![i]).collect();
    from_lattice_points(&pts, 1.0, None)
}

/// `side x side` integer grid with the sup metric, row-major.
pub fn unit_grid(side: usize) -> Result<FiniteMetricSpace, ConstructionError> {
    let pts: Vec<Vec<i64>> = (0..side * side).map(|p| vec![(p / side) as i64, (p % side) as i64]).collect();
    let labels = (0..side * side).map(|p| format!("({},{})", p / side, p % side)).collect();
    from_lattice_points(&pts, 1.0, Some(labels))
}

/// Lattice `{0, 1/k, ..., 1}^2` in the sup metric, row-major.
pub fn unit_square_lattice(k: usize) -> Result<FiniteMetricSpace, ConstructionError> {
    let side = k + 1;
    let pts: Vec<Vec<i64>> = (0..side * side).map(|p| vec![(p / side) as i64, (p % side) as i64]).collect();
    from_lattice_points(&pts, k as f64, None)
}

/// Shortest-path distances of a connected graph with positive edge lengths.
pub fn graph_length_space(
    vertices: usize,
    edges: &[(usize, usize, f64)],
) -> Result<FiniteMetricSpace, ConstructionError> {
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); vertices];
    for &(a, b, w) in edges {
        if a >= vertices {
            return Err(ConstructionError::VertexOutOfRange(a));
        }
        if b >= vertices {
            return Err(ConstructionError::VertexOutOfRange(b));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(ConstructionError::BadEdge(a, b, w));
        }
        adj[a].push((b, w));
        adj[b].push((a, w));
    }
    let rows = par::map_range(vertices, |s| dijkstra(&adj, s));
    if let Some(v) = rows.first().and_then(|r| r.iter().position(|d| !d.is_finite())) {
        return Err(ConstructionError::DisconnectedGraph(v));
    }
    // Symmetrise exactly: both directions sum the same edge lengths but may
    // round differently along different equal-length paths.
    let mut d: Vec<f64> = rows.into_iter().flatten().collect();
    for i in 0..vertices {
        for j in i + 1..vertices {
            let v = d[i * vertices + j].min(d[j * vertices + i]);
            d[i * vertices + j] = v;
            d[j * vertices + i] = v;
        }
    }
    Ok(FiniteMetricSpace::from_trusted_metric(vertices, d, None)?)
}

#[derive(PartialEq)]
struct Dist(f64);
impl Eq for Dist {}
impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Dist {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Dist(0.0), source)));
    while let Some(Reverse((Dist(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((Dist(nd), v)));
            }
        }
    }
    dist
}

/// Seeded connected graph: a random spanning tree plus `extra_edges`
/// random chords, edge lengths uniform in `[min_len, max_len]`.
pub fn random_connected_graph(
    vertices: usize,
    extra_edges: usize,
    min_len: f64,
    max_len: f64,
    seed: u64,
) -> Vec<(usize, usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(vertices + extra_edges);
    for v in 1..vertices {
        let u = rng.gen_range(0..v);
        edges.push((u, v, rng.gen_range(min_len..=max_len)));
    }
    if vertices > 1 {
        for _ in 0..extra_edges {
            let a = rng.gen_range(0..vertices);
            let b = rng.gen_range(0..vertices);
            if a != b {
                edges.push((a, b, rng.gen_range(min_len..=max_len)));
            }
        }
    }
    edges
}

/// Unit-length path `0 - 1 - ... - (n-1)` scaled to edge length `mesh`.
pub fn path_graph(vertices: usize, mesh: f64) -> Result<FiniteMetricSpace, ConstructionError> {
    let edges: Vec<(usize, usize, f64)> = (1..vertices).map(|v| (v - 1, v, mesh)).collect();
    graph_length_space(vertices, &edges)
}

/// Blocks of a telescope; block `i` sits at level `2^-i`.
#[derive(Debug, Clone)]
pub struct TelescopeSpec {
    pub components: Vec<FiniteMetricSpace>,
    /// Rescale block `i` to diameter exactly `2^-i` (never above it).
    pub rescale: bool,
    pub infinity_label: String,
}

impl TelescopeSpec {
    pub fn new(components: Vec<FiniteMetricSpace>, rescale: bool) -> Self {
        Self { components, rescale, infinity_label: "inf".to_string() }
    }
}

/// A built telescope: the point `∞` is index 0, then the blocks in order.
#[derive(Debug, Clone)]
pub struct Telescope {
    pub space: FiniteMetricSpace,
    /// Block of each point; `None` for `∞`.
    pub block_of: Vec<Option<usize>>,
    /// Block diameters after any rescaling.
    pub block_diameters: Vec<f64>,
}

impl Telescope {
    pub const INFINITY: usize = 0;

    /// Indices of all points in blocks `>= i`, plus `∞`.
    pub fn tail(&self, i: usize) -> Vec<usize> {
        self.block_of
            .iter()
            .enumerate()
            .filter(|(_, b)| b.is_none_or(|b| b >= i))
            .map(|(p, _)| p)
            .collect()
    }
}

/// `2^-i` exactly.
pub fn level(i: usize) -> f64 {
    (-(i as f64)).exp2()
}

/// Builds the telescope over `spec.components` and validates the result.
pub fn telescope(spec: &TelescopeSpec) -> Result<Telescope, ConstructionError> {
    let mut blocks = Vec::with_capacity(spec.components.len());
    for (i, comp) in spec.components.iter().enumerate() {
        let bound = level(i);
        let diam = comp.diameter();
        let block = if spec.rescale && diam > 0.0 {
            let mut h = 1.0 / (bound.recip() * diam);
            let mut scaled = comp.scale(h)?;
            while scaled.diameter() > bound {
                h = h.next_down();
                scaled = comp.scale(h)?;
            }
            scaled
        } else if diam > bound {
            return Err(ConstructionError::DiameterBoundViolated(i, diam));
        } else {
            comp.clone()
        };
        blocks.push(block);
    }
    let n = 1 + blocks.iter().map(FiniteMetricSpace::len).sum::<usize>();
    let mut block_of = vec![None];
    let mut local = vec![0usize];
    let mut labels = vec![spec.infinity_label.clone()];
    for (i, b) in blocks.iter().enumerate() {
        for p in 0..b.len() {
            block_of.push(Some(i));
            local.push(p);
            labels.push(format!("{i}:{}", b.labels()[p]));
        }
    }
    let mut d = vec![0.0; n * n];
    for a in 0..n {
        for c in 0..n {
            d[a * n + c] = match (block_of[a], block_of[c]) {
                _ if a == c => 0.0,
                (None, Some(j)) => level(j),
                (Some(i), None) => level(i),
                (Some(i), Some(j)) if i == j => blocks[i].dist(local[a], local[c]),
                (Some(i), Some(j)) => level(i).max(level(j)),
                (None, None) => unreachable!("single infinity point"),
            };
        }
    }
    let space = FiniteMetricSpace::validate_flat(n, d, Some(labels), DEFAULT_TOL_METRIC)?;
    let block_diameters = blocks.iter().map(FiniteMetricSpace::diameter).collect();
    Ok(Telescope { space, block_of, block_diameters })
}

/// `r_i = (i+1)! · diam(F_i)` for each listed diameter.
pub fn rescale_schedule(diameters: &[f64]) -> Result<Vec<f64>, ConstructionError> {
    let mut fact = 1.0f64;
    let mut out = Vec::with_capacity(diameters.len());
    for (i, &d) in diameters.iter().enumerate() {
        if i > FACTORIAL_GUARD {
            return Err(ConstructionError::FactorialOverflow(i));
        }
        fact *= (i + 1) as f64;
        out.push(fact * d);
    }
    Ok(out)
}

/// `H(n) = min_k |n - k²|`.
pub fn index_map_h(n: u64) -> u64 {
    let k = n.isqrt();
    (n - k * k).min((k + 1) * (k + 1) - n)
}

/// A point of `N × N × Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IndexTriple {
    pub x: u64,
    pub y: u64,
    pub z: i64,
}

impl IndexTriple {
    pub const ORIGIN: IndexTriple = IndexTriple { x: 0, y: 0, z: 0 };

    /// Largest coordinate change to `other`.
    pub fn step_to(&self, other: &IndexTriple) -> u64 {
        self.x.abs_diff(other.x).max(self.y.abs_diff(other.y)).max(self.z.abs_diff(other.z))
    }
}

/// Prefix of the walk `A: N → N² × Z`.
///
/// Shell `s` walks from the origin down to `(0, 0, -s)`, sweeps the box
/// `[0, s]² × [-s, s]` boustrophedon-style, then walks back to the origin.
/// Each step changes exactly one coordinate by one.
#[derive(Debug, Clone)]
pub struct AdjacentWalk {
    steps: Vec<IndexTriple>,
    next_shell: u64,
}

impl Default for AdjacentWalk {
    fn default() -> Self {
        Self { steps: vec![IndexTriple::ORIGIN], next_shell: 1 }
    }
}

impl AdjacentWalk {
    pub fn new() -> Self {
        Self::default()
    }

    /// Walk with at least `len` steps generated.
    pub fn with_len(len: usize) -> Self {
        let mut w = Self::new();
        w.ensure(len);
        w
    }

    fn ensure(&mut self, len: usize) {
        while self.steps.len() < len {
            self.push_shell();
        }
    }

    fn push_to(&mut self, target: IndexTriple) {
        let mut cur = *self.steps.last().expect("walk starts at origin");
        while cur != target {
            if cur.x != target.x {
                cur.x = if cur.x < target.x { cur.x + 1 } else { cur.x - 1 };
            } else if cur.y != target.y {
                cur.y = if cur.y < target.y { cur.y + 1 } else { cur.y - 1 };
            } else {
                cur.z += (target.z - cur.z).signum();
            }
            self.steps.push(cur);
        }
    }

    fn push_shell(&mut self) {
        let s = self.next_shell;
        self.next_shell += 1;
        let si = s as i64;
        self.push_to(IndexTriple { x: 0, y: 0, z: -si });
        let mut z_up = true;
        for x in 0..=s {
            let ys: Vec<u64> = if x % 2 == 0 { (0..=s).collect() } else { (0..=s).rev().collect() };
            for y in ys {
                let zs: Vec<i64> = if z_up { (-si..=si).collect() } else { (-si..=si).rev().collect() };
                for z in zs {
                    self.push_to(IndexTriple { x, y, z });
                }
                z_up = !z_up;
            }
        }
        self.push_to(IndexTriple::ORIGIN);
    }

    pub fn get(&mut self, m: usize) -> IndexTriple {
        self.ensure(m + 1);
        self.steps[m]
    }

    pub fn prefix(&self) -> &[IndexTriple] {
        &self.steps
    }
}

/// `C(n) = A(H(n))`.
pub fn index_map_c(n: u64) -> IndexTriple {
    AdjacentWalk::with_len(index_map_h(n) as usize + 1).get(index_map_h(n) as usize)
}

/// Evaluates `C` on `0..len` sharing one walk.
pub fn index_map_c_table(len: u64) -> Vec<IndexTriple> {
    let max_h = (0..len).map(index_map_h).max().unwrap_or(0);
    let mut walk = AdjacentWalk::with_len(max_h as usize + 1);
    (0..len).map(|n| walk.get(index_map_h(n) as usize)).collect()
}

/// Bucket `(j, k)` of a subset containing the base point `q`:
/// `2^-k <= diam < 2^(1-k)` and `2^-j <= sep/diam < 2^(1-j)`.
pub fn classify_f(a: &SubsetView<'_>, q: usize) -> Result<(u64, i64), ConstructionError> {
    if !a.contains(q) {
        return Err(ConstructionError::BasePointMissing);
    }
    if a.len() < 2 {
        return Err(ConstructionError::Singleton);
    }
    let (diam, sep) = a.diameter_separation();
    let k = dyadic_exponent(diam);
    let j = dyadic_exponent(sep / diam);
    debug_assert!(j >= 0);
    Ok((j as u64, k))
}

/// The integer `k` with `2^-k <= v < 2^(1-k)`.
fn dyadic_exponent(v: f64) -> i64 {
    let mut k = -(v.log2().floor() as i64);
    while level_i(k) > v {
        k += 1;
    }
    while v >= level_i(k - 1) {
        k -= 1;
    }
    k
}

fn level_i(k: i64) -> f64 {
    (-(k as f64)).exp2()
}

/// Ambient sample, its base point and the truncation length.
#[derive(Debug, Clone)]
pub struct AsymptoticExampleSpec {
    pub ambient: FiniteMetricSpace,
    pub base_point: usize,
    pub truncation: usize,
    /// Candidate sets; every subset containing the base point when `None`.
    pub dictionary: Option<Vec<Vec<usize>>>,
}

impl AsymptoticExampleSpec {
    /// `{0, 1/4, ..., 3}` on the line with base point 0.
    pub fn default_ambient(truncation: usize) -> Self {
        let pts: Vec<f64> = (0..=12).map(|k| k as f64 / 4.0).collect();
        let ambient = line_space(&pts).expect("distinct points");
        Self { ambient, base_point: 0, truncation, dictionary: None }
    }
}

/// One weighted block `G_i`.
#[derive(Debug, Clone, Serialize)]
pub struct Block {
    /// Ambient indices, including the base point.
    pub subset: Vec<usize>,
    pub triple: IndexTriple,
    pub separation: f64,
    pub diameter: f64,
    /// `log2 a_i = i² - log2 sep(G_i)`.
    pub log2_weight: f64,
}

impl Block {
    pub fn weight(&self) -> f64 {
        self.log2_weight.exp2()
    }
}

/// The truncated weighted-block space, kept in log-weight form.
///
/// Point 0 is the base point `q`; then each block's non-base points in order.
#[derive(Debug, Clone)]
pub struct AsymptoticExample {
    pub ambient: FiniteMetricSpace,
    pub base_point: usize,
    pub blocks: Vec<Block>,
    /// `(block, ambient index)` for every point except `q`.
    pub points: Vec<(usize, usize)>,
}

/// Subsets keyed by their `(j, k)` bucket.
pub type BucketMap = BTreeMap<(u64, i64), Vec<Vec<usize>>>;

/// Subsets of the ambient containing `q`, grouped by bucket, each list
/// ordered by cardinality then lexicographically.
pub fn bucket_dictionary(
    ambient: &FiniteMetricSpace,
    q: usize,
) -> Result<BucketMap, ConstructionError> {
    let n = ambient.len();
    if n > MAX_AMBIENT_POINTS {
        return Err(ConstructionError::AmbientTooLarge(n));
    }
    let others: Vec<usize> = (0..n).filter(|&p| p != q).collect();
    let sets: Vec<Vec<usize>> = (1u32..(1 << others.len()))
        .map(|mask| {
            let mut subset: Vec<usize> =
                (0..others.len()).filter(|&b| mask >> b & 1 == 1).map(|b| others[b]).collect();
            subset.push(q);
            subset
        })
        .collect();
    bucket_sets(ambient, q, &sets)
}

/// Groups the given sets by bucket, ordered by cardinality then
/// lexicographically; duplicates are dropped.
pub fn bucket_sets(
    ambient: &FiniteMetricSpace,
    q: usize,
    sets: &[Vec<usize>],
) -> Result<BucketMap, ConstructionError> {
    let mut dict = BucketMap::new();
    for set in sets {
        let mut subset = set.clone();
        subset.sort_unstable();
        let view = SubsetView::new(ambient, subset.clone())?;
        let bucket = classify_f(&view, q)?;
        dict.entry(bucket).or_default().push(subset);
    }
    for sets in dict.values_mut() {
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        sets.dedup();
    }
    Ok(dict)
}

/// Builds blocks `G_0 .. G_{N-1}` with `G_i` drawn from bucket
/// `(π₂ C(i), π₃ C(i))` at position `π₁ C(i)` (cycling when the bucket is
/// finite).
pub fn asymptotic_example(spec: &AsymptoticExampleSpec) -> Result<AsymptoticExample, ConstructionError> {
    let q = spec.base_point;
    if q >= spec.ambient.len() {
        return Err(ConstructionError::InvalidSpec(format!("base point {q} out of range")));
    }
    let dict = match &spec.dictionary {
        Some(sets) => bucket_sets(&spec.ambient, q, sets)?,
        None => bucket_dictionary(&spec.ambient, q)?,
    };
    let table = index_map_c_table(spec.truncation as u64);
    let mut blocks = Vec::with_capacity(spec.truncation);
    for (i, triple) in table.into_iter().enumerate() {
        let sets = dict
            .get(&(triple.y, triple.z))
            .filter(|s| !s.is_empty())
            .ok_or(ConstructionError::BucketUnrealizable { i, j: triple.y, k: triple.z })?;
        let subset = sets[(triple.x as usize) % sets.len()].clone();
        let view = SubsetView::new(&spec.ambient, subset.clone())?;
        let (diameter, separation) = view.diameter_separation();
        let log2_weight = (i * i) as f64 - separation.log2();
        blocks.push(Block { subset, triple, separation, diameter, log2_weight });
    }
    let points = blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.subset.iter().filter(|&&p| p != q).map(move |&p| (i, p)))
        .collect();
    Ok(AsymptoticExample { ambient: spec.ambient.clone(), base_point: q, blocks, points })
}

impl AsymptoticExample {
    pub fn len(&self) -> usize {
        1 + self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Block of point `p`; `None` for the base point.
    pub fn block_of(&self, p: usize) -> Option<usize> {
        (p > 0).then(|| self.points[p - 1].0)
    }

    fn ambient_of(&self, p: usize) -> usize {
        if p == 0 {
            self.base_point
        } else {
            self.points[p - 1].1
        }
    }

    /// `a_i^-1 · d_X(p, p')`, evaluated through weight ratios.
    pub fn scaled_distance(&self, i: usize, p: usize, p2: usize) -> f64 {
        if p == p2 {
            return 0.0;
        }
        let wi = self.blocks[i].log2_weight;
        let q = self.base_point;
        let amb = &self.ambient;
        let leg = |b: usize, a: usize| (self.blocks[b].log2_weight - wi).exp2() * amb.dist(a, q);
        match (self.block_of(p), self.block_of(p2)) {
            (None, None) => 0.0,
            (Some(b), None) => leg(b, self.ambient_of(p)),
            (None, Some(c)) => leg(c, self.ambient_of(p2)),
            (Some(b), Some(c)) if b == c => {
                (self.blocks[b].log2_weight - wi).exp2() * amb.dist(self.ambient_of(p), self.ambient_of(p2))
            }
            (Some(b), Some(c)) => leg(b, self.ambient_of(p)) + leg(c, self.ambient_of(p2)),
        }
    }

    /// `d_X(p, p')` in absolute units (may overflow to `inf` for large
    /// truncations).
    pub fn distance(&self, p: usize, p2: usize) -> f64 {
        if p == p2 {
            return 0.0;
        }
        // Scale relative to block 0, whose weight is 1/sep(G_0).
        self.scaled_distance(0, p, p2) * self.blocks[0].weight()
    }

    /// Materialises the metric and validates it.
    pub fn to_space(&self) -> Result<FiniteMetricSpace, ConstructionError> {
        self.to_space_with_limit(DEFAULT_MAX_MATERIALIZED)
    }

    pub fn to_space_with_limit(&self, limit: usize) -> Result<FiniteMetricSpace, ConstructionError> {
        if self.blocks.len() > limit {
            return Err(ConstructionError::TruncationTooLarge(self.blocks.len(), limit));
        }
        let n = self.len();
        let mut d = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                d[a * n + b] = self.distance(a, b);
            }
        }
        let labels = (0..n)
            .map(|p| match self.block_of(p) {
                None => "q".to_string(),
                Some(i) => format!("G{i}:{}", self.ambient.labels()[self.ambient_of(p)]),
            })
            .collect();
        Ok(FiniteMetricSpace::validate_flat(n, d, Some(labels), DEFAULT_TOL_METRIC)?)
    }

    /// `B_i(R)`: points with `a_i^-1 d_X(q, p) <= R`.
    pub fn rescaled_ball(&self, i: usize, radius: f64) -> Vec<usize> {
        (0..self.len()).filter(|&p| self.scaled_distance(i, 0, p) <= radius).collect()
    }

    /// `S_i(R)`: the copy of `B(q, R; G_i)` inside `B_i(R)`.
    pub fn block_ball(&self, i: usize, radius: f64) -> Vec<usize> {
        self.rescaled_ball(i, radius)
            .into_iter()
            .filter(|&p| self.block_of(p).is_none_or(|b| b == i))
            .collect()
    }

    /// Hausdorff distance between two point lists under `a_i^-1 d_X`.
    pub fn scaled_hausdorff(&self, i: usize, s: &[usize], t: &[usize]) -> f64 {
        let directed = |from: &[usize], to: &[usize]| {
            from.iter()
                .map(|&p| to.iter().map(|&r| self.scaled_distance(i, p, r)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        directed(s, t).max(directed(t, s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_levels() {
        let c0 = cantor_sample(0).unwrap();
        assert_eq!(c0.len(), 2);
        assert_eq!(c0.dist(0, 1), 1.0);
        let c1 = cantor_sample(1).unwrap();
        let pts: Vec<f64> = (0..4).map(|i| c1.dist(0, i)).collect();
        assert_eq!(pts, vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        let c2 = cantor_sample(2).unwrap();
        assert_eq!(c2.len(), 8);
        assert!((c2.separation() - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(cantor_sample(15).unwrap_err(), ConstructionError::LevelTooLarge(15));
    }

    #[test]
    fn graph_examples() {
        let p = graph_length_space(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(p.dist(0, 2), 2.0);
        let t = graph_length_space(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)]).unwrap();
        assert_eq!(t.dist(0, 2), 2.0);
        assert_eq!(
            graph_length_space(3, &[(0, 1, 1.0)]).unwrap_err(),
            ConstructionError::DisconnectedGraph(2)
        );
        assert!(matches!(
            graph_length_space(2, &[(0, 1, 0.0)]),
            Err(ConstructionError::BadEdge(0, 1, _))
        ));
    }

    #[test]
    fn telescope_table_values() {
        let one = line_space(&[0.0]).unwrap();
        let t = telescope(&TelescopeSpec::new(vec![one.clone(), one], false)).unwrap();
        assert_eq!(t.space.len(), 3);
        assert_eq!(t.space.dist(1, 2), 1.0);
        assert_eq!(t.space.dist(0, 1), 1.0);
        assert_eq!(t.space.dist(0, 2), 0.5);

        let pair = line_space(&[0.0, 0.1]).unwrap();
        let comps = vec![pair.clone(), pair.clone(), pair.clone(), pair];
        let t = telescope(&TelescopeSpec::new(comps, false)).unwrap();
        let in_block = |b: usize| t.block_of.iter().position(|&x| x == Some(b)).unwrap();
        assert_eq!(t.space.dist(in_block(1), in_block(3)), 0.5);
        assert_eq!(t.space.dist(Telescope::INFINITY, in_block(2)), 0.25);
    }

    #[test]
    fn telescope_rescale_and_bound() {
        let wide = line_space(&[0.0, 5.0, 7.0]).unwrap();
        assert_eq!(
            telescope(&TelescopeSpec::new(vec![wide.clone(), wide.clone()], false)).unwrap_err(),
            ConstructionError::DiameterBoundViolated(0, 7.0)
        );
        let t = telescope(&TelescopeSpec::new(vec![wide.clone(), wide], true)).unwrap();
        assert!(t.block_diameters[0] <= 1.0);
        assert!(t.block_diameters[1] <= 0.5);
        assert!((t.block_diameters[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn index_map_h_values() {
        assert_eq!(index_map_h(0), 0);
        // k = 1 is allowed, so H(1) = 0.
        assert_eq!(index_map_h(1), 0);
        assert_eq!(index_map_h(2), 1);
        assert_eq!(index_map_h(4), 0);
        assert_eq!(index_map_h(6), 2);
    }

    #[test]
    fn walk_is_adjacent_and_starts_at_origin() {
        let w = AdjacentWalk::with_len(500);
        let s = w.prefix();
        assert_eq!(s[0], IndexTriple::ORIGIN);
        for (m, pair) in s.windows(2).enumerate() {
            assert_eq!(pair[0].step_to(&pair[1]), 1, "step {m}");
        }
        assert_eq!(index_map_c(0), IndexTriple::ORIGIN);
    }

    #[test]
    fn classify_buckets() {
        let x = line_space(&[0.0, 1.0]).unwrap();
        assert_eq!(classify_f(&x.full(), 0).unwrap(), (0, 0));
        let tri = FiniteMetricSpace::validate(
            &[vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5], vec![0.5, 0.5, 0.0]],
            None,
            1e-9,
        )
        .unwrap();
        assert_eq!(classify_f(&tri.full(), 0).unwrap(), (0, 1));
        let doubled = tri.scale(2.0).unwrap();
        assert_eq!(classify_f(&doubled.full(), 0).unwrap(), (0, 0));
        assert_eq!(
            classify_f(&x.subset(vec![1]).unwrap(), 0).unwrap_err(),
            ConstructionError::BasePointMissing
        );
        assert_eq!(classify_f(&x.subset(vec![0]).unwrap(), 0).unwrap_err(), ConstructionError::Singleton);
    }

    #[test]
    fn dyadic_exponent_edges() {
        assert_eq!(dyadic_exponent(1.0), 0);
        assert_eq!(dyadic_exponent(0.5), 1);
        assert_eq!(dyadic_exponent(0.75), 1);
        assert_eq!(dyadic_exponent(2.0), -1);
        assert_eq!(dyadic_exponent(3.9), -1);
        assert_eq!(dyadic_exponent(1.0 / 3.0), 2);
    }

    #[test]
    fn asymptotic_example_weights() {
        let ex = asymptotic_example(&AsymptoticExampleSpec::default_ambient(5)).unwrap();
        // C(0) = (0,0,0): G_0 = {0, 1} with separation 1, so a_0 = 1.
        assert_eq!(ex.blocks[0].triple, IndexTriple::ORIGIN);
        assert_eq!(ex.blocks[0].weight(), 1.0);
        let x0 = ex.points.iter().position(|&(b, _)| b == 0).unwrap() + 1;
        assert_eq!(ex.distance(0, x0), 1.0);
        for (i, b) in ex.blocks.iter().enumerate() {
            let a = (i * i) as f64 - b.separation.log2();
            assert!((b.log2_weight - a).abs() < 1e-12);
        }
        let space = ex.to_space().unwrap();
        assert_eq!(space.len(), ex.len());
    }

    #[test]
    fn unrealizable_bucket() {
        // Only two-point sets at distance 1: bucket (0, -1) of C(2) cannot be met.
        let amb = line_space(&[0.0, 1.0]).unwrap();
        let spec = AsymptoticExampleSpec { ambient: amb, base_point: 0, truncation: 3, dictionary: None };
        assert!(matches!(
            asymptotic_example(&spec),
            Err(ConstructionError::BucketUnrealizable { i: 2, .. })
        ));
    }
}

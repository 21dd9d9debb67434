//! Finite metric spaces and index-based subset views.
//!
//! A [`FiniteMetricSpace`] is immutable once validated. Subsets are
//! [`SubsetView`]s: a borrowed base plus an ordered list of distinct point
//! indices, so restricting to a subset never copies distances.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par;

/// Default absolute tolerance on triangle-inequality deficits.
pub const DEFAULT_TOL_METRIC: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("distance matrix is empty")]
    Empty,
    #[error("label count {labels} does not match matrix size {n}")]
    LabelCount { labels: usize, n: usize },
    #[error("non-finite distance at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("non-zero diagonal entry at ({0}, {0})")]
    NonZeroDiagonal(usize),
    #[error("negative distance at ({0}, {1})")]
    NegativeDistance(usize, usize),
    #[error("asymmetric distances at ({0}, {1})")]
    Asymmetry(usize, usize),
    #[error("zero distance between distinct points ({0}, {1})")]
    ZeroOffDiagonal(usize, usize),
    #[error("triangle inequality violated at ({i}, {j}, {k}): deficit {deficit}")]
    TriangleViolation { i: usize, j: usize, k: usize, deficit: f64 },
    #[error("scale factor must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("subset is empty")]
    EmptySubset,
    #[error("subset index {index} out of range for a space of {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("subset index {0} repeated")]
    DuplicateIndex(usize),
    #[error("subsets belong to different base spaces")]
    DifferentBaseSpace,
}

/// `n` labelled points with a symmetric `n x n` distance matrix.
#[derive(Clone, PartialEq, Serialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    #[serde(skip)]
    n: usize,
    #[serde(skip)]
    d: Vec<f64>,
}

impl fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteMetricSpace")
            .field("n", &self.n)
            .field("labels", &self.labels)
            .finish_non_exhaustive()
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl FiniteMetricSpace {
    /// Validates `matrix` and builds a space from it.
    ///
    /// Checks finiteness, zero diagonal, non-negativity, symmetry,
    /// positivity off the diagonal and the triangle inequality. The
    /// triangle tolerance is `tol` scaled by `max(1, d[i][k])`, so spaces
    /// with very large distances are not rejected for rounding noise.
    pub fn validate(
        matrix: &[Vec<f64>],
        labels: Option<Vec<String>>,
        tol: f64,
    ) -> Result<Self, MetricError> {
        let n = matrix.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
            }
        }
        let d: Vec<f64> = matrix.iter().flat_map(|r| r.iter().copied()).collect();
        Self::validate_flat(n, d, labels, tol)
    }

    /// Same as [`validate`](Self::validate) for a row-major flat matrix.
    pub fn validate_flat(
        n: usize,
        d: Vec<f64>,
        labels: Option<Vec<String>>,
        tol: f64,
    ) -> Result<Self, MetricError> {
        let space = Self::checked_without_triangle(n, d, labels)?;
        space.check_triangle(tol)?;
        Ok(space)
    }

    /// Builds a space whose triangle inequality holds by construction
    /// (norm-induced or shortest-path metrics). Every other invariant is
    /// still checked.
    pub(crate) fn from_trusted_metric(
        n: usize,
        d: Vec<f64>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, MetricError> {
        Self::checked_without_triangle(n, d, labels)
    }

    fn checked_without_triangle(
        n: usize,
        d: Vec<f64>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, MetricError> {
        if n == 0 {
            return Err(MetricError::Empty);
        }
        if d.len() != n * n {
            return Err(MetricError::NotSquare { row: 0, len: d.len() / n.max(1), expected: n });
        }
        let labels = match labels {
            Some(l) if l.len() != n => return Err(MetricError::LabelCount { labels: l.len(), n }),
            Some(l) => l,
            None => default_labels(n),
        };
        for i in 0..n {
            for j in 0..n {
                let v = d[i * n + j];
                if !v.is_finite() {
                    return Err(MetricError::NonFinite(i, j));
                }
                if i == j {
                    if v != 0.0 {
                        return Err(MetricError::NonZeroDiagonal(i));
                    }
                    continue;
                }
                if v < 0.0 {
                    return Err(MetricError::NegativeDistance(i, j));
                }
                if j > i && v != d[j * n + i] {
                    return Err(MetricError::Asymmetry(i, j));
                }
                if v == 0.0 {
                    return Err(MetricError::ZeroOffDiagonal(i.min(j), i.max(j)));
                }
            }
        }
        Ok(Self { labels, n, d })
    }

    fn check_triangle(&self, tol: f64) -> Result<(), MetricError> {
        let n = self.n;
        let worst = par::map_range(n, |i| {
            let ri = self.row(i);
            let mut first: Option<(usize, usize, f64)> = None;
            for k in 0..n {
                if k == i {
                    continue;
                }
                let rk = self.row(k);
                let dik = ri[k];
                let bound = dik - tol * dik.max(1.0);
                // Fast vectorisable scan, then locate the witness.
                let min_path = ri.iter().zip(rk).fold(f64::INFINITY, |m, (a, b)| m.min(a + b));
                if min_path < bound {
                    let j = (0..n)
                        .find(|&j| ri[j] + rk[j] < bound)
                        .expect("witness exists");
                    first = Some((j, k, dik - (ri[j] + rk[j])));
                    break;
                }
            }
            first
        });
        for (i, hit) in worst.into_iter().enumerate() {
            if let Some((j, k, deficit)) = hit {
                return Err(MetricError::TriangleViolation { i, j, k, deficit });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Distances from point `i` to every point, in index order.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    /// Row-major copy of the distance matrix as nested rows.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// The space `hX`: every distance multiplied by `h`.
    pub fn scale(&self, h: f64) -> Result<Self, MetricError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(MetricError::NonPositiveScale(h));
        }
        Ok(Self {
            labels: self.labels.clone(),
            n: self.n,
            d: self.d.iter().map(|v| v * h).collect(),
        })
    }

    pub fn full(&self) -> SubsetView<'_> {
        SubsetView { base: self, indices: (0..self.n).collect() }
    }

    pub fn subset(&self, indices: Vec<usize>) -> Result<SubsetView<'_>, MetricError> {
        SubsetView::new(self, indices)
    }

    pub fn diameter(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Minimum distance between distinct points, `+inf` for a singleton.
    pub fn separation(&self) -> f64 {
        let n = self.n;
        let mut best = f64::INFINITY;
        for i in 0..n {
            for &v in &self.row(i)[i + 1..] {
                best = best.min(v);
            }
        }
        best
    }

    /// Closed ball `B(center, r)`, in index order.
    pub fn closed_ball(&self, center: usize, r: f64) -> SubsetView<'_> {
        let indices = self
            .row(center)
            .iter()
            .enumerate()
            .filter(|(_, &v)| v <= r)
            .map(|(i, _)| i)
            .collect();
        SubsetView { base: self, indices }
    }

    /// Eccentricity of every point: the largest distance from it.
    pub fn eccentricities(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().copied().fold(0.0, f64::max)).collect()
    }

    /// Copies the points of `indices` into a standalone space.
    pub fn restrict(&self, indices: &[usize]) -> FiniteMetricSpace {
        let m = indices.len();
        let mut d = Vec::with_capacity(m * m);
        for &i in indices {
            let row = self.row(i);
            d.extend(indices.iter().map(|&j| row[j]));
        }
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        FiniteMetricSpace { labels, n: m, d }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MetricError> {
        if labels.len() != self.n {
            return Err(MetricError::LabelCount { labels: labels.len(), n: self.n });
        }
        self.labels = labels;
        Ok(self)
    }

    /// Sorted distinct positive distances.
    pub fn distance_values(&self) -> Vec<f64> {
        let n = self.n;
        let mut v: Vec<f64> = (0..n).flat_map(|i| self.row(i)[i + 1..].to_vec()).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }
}

/// A non-empty ordered set of distinct point indices of a base space.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetView<'a> {
    base: &'a FiniteMetricSpace,
    indices: Vec<usize>,
}

impl<'a> SubsetView<'a> {
    pub fn new(base: &'a FiniteMetricSpace, indices: Vec<usize>) -> Result<Self, MetricError> {
        if indices.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        let mut seen = vec![false; base.len()];
        for &i in &indices {
            if i >= base.len() {
                return Err(MetricError::IndexOutOfRange { index: i, n: base.len() });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(MetricError::DuplicateIndex(i));
            }
        }
        Ok(Self { base, indices })
    }

    pub fn base(&self) -> &'a FiniteMetricSpace {
        self.base
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    /// Largest pairwise distance; 0 for a singleton.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (a, &i) in self.indices.iter().enumerate() {
            let row = self.base.row(i);
            for &j in &self.indices[a + 1..] {
                best = best.max(row[j]);
            }
        }
        best
    }

    /// Smallest distance between distinct points; `+inf` for a singleton.
    pub fn separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (a, &i) in self.indices.iter().enumerate() {
            let row = self.base.row(i);
            for &j in &self.indices[a + 1..] {
                best = best.min(row[j]);
            }
        }
        best
    }

    /// Diameter and separation in one pass.
    pub fn diameter_separation(&self) -> (f64, f64) {
        let mut hi = 0.0f64;
        let mut lo = f64::INFINITY;
        for (a, &i) in self.indices.iter().enumerate() {
            let row = self.base.row(i);
            for &j in &self.indices[a + 1..] {
                let v = row[j];
                hi = hi.max(v);
                lo = lo.min(v);
            }
        }
        (hi, lo)
    }

    /// Distance from point `x` of the base to this subset.
    pub fn distance_to(&self, x: usize) -> f64 {
        let row = self.base.row(x);
        self.indices.iter().map(|&j| row[j]).fold(f64::INFINITY, f64::min)
    }

    pub fn to_space(&self) -> FiniteMetricSpace {
        self.base.restrict(&self.indices)
    }

    pub fn into_indices(self) -> Vec<usize> {
        self.indices
    }
}

/// Hausdorff distance between two subsets of the same space.
pub fn hausdorff_distance(s: &SubsetView<'_>, t: &SubsetView<'_>) -> Result<f64, MetricError> {
    if !std::ptr::eq(s.base, t.base) {
        return Err(MetricError::DifferentBaseSpace);
    }
    Ok(directed_hausdorff(s, t).max(directed_hausdorff(t, s)))
}

/// `sup_{x in from} dist(x, to)`.
pub fn directed_hausdorff(from: &SubsetView<'_>, to: &SubsetView<'_>) -> f64 {
    from.indices.iter().map(|&x| to.distance_to(x)).fold(0.0, f64::max)
}

/// Points of a space embedded in `l_inf^n` via distances to every point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedVectors {
    pub vectors: Vec<Vec<f64>>,
}

impl EmbeddedVectors {
    /// Max-coordinate-difference between vectors `i` and `j`.
    pub fn sup_distance(&self, i: usize, j: usize) -> f64 {
        self.vectors[i]
            .iter()
            .zip(&self.vectors[j])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Fréchet embedding: point `x` maps to `(d(x, x_1), ..., d(x, x_n))`.
pub fn frechet_embed(x: &FiniteMetricSpace) -> EmbeddedVectors {
    EmbeddedVectors { vectors: (0..x.len()).map(|i| x.row(i).to_vec()).collect() }
}

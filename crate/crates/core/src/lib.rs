//! Finite-sample tools for doubling metric spaces: Gromov–Hausdorff
//! distances, covering numbers, Assouad-type dimension estimates, and the
//! telescope and weighted-block constructions.

pub mod constructions;
pub mod covering;
pub mod dimension;
pub mod experiments;
pub mod gh;
pub mod io;
pub mod metric;
pub mod par;

pub use covering::{covering_number, CoverCertificate, CoverMode};
pub use dimension::{assouad_estimate_covering, assouad_estimate_subsets, lower_assouad_estimate, DimensionEstimate};
pub use gh::{gh_bounds, gh_exact, Correspondence, GhResult};
pub use metric::{FiniteMetricSpace, MetricError, SubsetView};

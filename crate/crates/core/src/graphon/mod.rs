//! Step kernels (graphons over a uniform equipartition) and their metrics.

mod cut;
mod graph;
mod hom;
pub mod io;
mod kernel;
mod perm;

pub use cut::{
    cut_metric_search, cut_metric_upper, cut_norm, cut_norm_exhaustive, cut_norm_heuristic, cut_norm_with,
    delta2_upper, l2_dist, l2_norm, CutMethod, DEFAULT_RESTARTS, EXHAUSTIVE_LIMIT,
};
pub use graph::SimpleGraph;
pub(crate) use graph::Shape;
pub use hom::{hom_density, hom_density_nested};
pub(crate) use hom::{degrees, hom_density_edgewise, matmul, pinned_edge_density};
pub use kernel::{refine_to_common_r, StepKernel, ValueRange, VALIDATION_TOL};
pub(crate) use kernel::{check_permutation, same_r};
pub use perm::{minimize_over_permutations, PermSearch};

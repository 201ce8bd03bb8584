//! Measure-valued step kernels and their cut-type metrics.

mod cut;
mod decorated;
mod func;
pub mod io;
mod kernel;
mod measure;
mod net;
mod sample;

pub use cut::{d2, delta2_mvg_upper, delta_black, gen_cut_norm, wass_cut, GenCut, RECTANGLE_LIMIT};
pub use decorated::decorated_hom_density;
pub use func::{Decoration, PLFunction, Polynomial, RealFunction};
pub use kernel::{mvg_diff, MvgStepKernel, SignedMvg};
pub use measure::{w1, w2, DiscreteMeasure, SignedMeasure};
pub use net::{build_net, build_net_with_cap, lattice_path_count, LipschitzNet, DEFAULT_NET_CAP};
pub use sample::{sample_blocks, sample_mvg, sample_weighted_graph};

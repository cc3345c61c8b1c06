//! Hard-core thinnings of Poisson Boolean models of balls.
//!
//! The crate samples Boolean models on a torus or a free ball, builds their
//! contact graphs, and computes hard-core subsets: exact per-component maxima,
//! cell-wise lower and upper constructions over Voronoi tessellations, and
//! swap-based local improvement. It also covers dispensable grains, huge
//! grains with good lattice sites, colored continuum percolation, and a few
//! Monte Carlo estimators.

pub mod dispensable;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod hugegrains;
pub mod model;
pub mod mwis;
pub mod percolation;
pub mod rng;
pub mod spatial;
pub mod thinning;
pub mod weights;

pub use error::{Error, Result};
pub use graph::{build_contact_graph, build_directed_graph, cluster, connected_components};
pub use model::{interiors_overlap, sample_poisson, Configuration, Grain, Point, RadiusLaw, Window};
pub use mwis::{brute_force, solve_exact, MwisResult};
pub use thinning::{
    component_max, find_valid_swap, is_locally_maximal, local_improve, matern_one, sample_voronoi,
    thin_minus, thin_plus, window_inequality_check, Source, Swap, Tessellation, Thinning,
};
pub use weights::{weight, WeightSpec};

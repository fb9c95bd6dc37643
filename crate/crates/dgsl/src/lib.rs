//! Semi-supervised clustering by dynamic graph structure learning.
//!
//! The crate jointly learns a sparse self-representation affinity and a
//! low-dimensional spectral embedding under must-link/cannot-link
//! supervision, by alternating three block updates:
//!
//! 1. an embedding step that maximizes the cannot-link-to-affinity trace
//!    ratio (`trace_ratio`),
//! 2. a ridge-regularized self-representation solve (`selfrep::update_a`),
//! 3. an embedding-weighted soft-thresholding step that rewires the sparse
//!    affinity (`selfrep::update_z`).
//!
//! Around the solver sit the supporting pieces: dense symmetric
//! eigendecomposition and SPD solves (`linalg`), kNN affinities, constraint
//! encodings and graph Laplacians (`graph`), K-means with matched-accuracy
//! and NMI scoring plus seeded constraint generators (`eval`), a hypergraph
//! extension (`hypergraph`), and text-format parsers for datasets and
//! configuration (`io`).
//!
//! Everything is deterministic: solver runs are RNG-free, and every
//! randomized evaluation utility takes an explicit seed.

pub mod error;
pub mod eval;
pub mod graph;
pub mod hypergraph;
pub mod io;
pub mod linalg;
pub mod selfrep;
pub mod solver;
pub mod trace_ratio;

pub use error::{Error, Result};
pub use eval::{
    accuracy, gen_constraints_incomplete, gen_constraints_setting1, gen_constraints_setting2,
    kmeans, nmi, normalize_columns, EvalReport,
};
pub use graph::{
    encode_constraints, fuse_affinity, knn_affinity, laplacian, normalized_laplacian,
    ConstraintSet, GraphModel,
};
pub use hypergraph::{
    hybrid_affinity, hypergraph_laplacian, incidence, normalized_adjacency, Hypergraph,
};
pub use io::{
    parse_config, parse_constraints, parse_features_csv, parse_hyperedges, parse_labels,
    ConfigFile,
};
pub use linalg::{dense_matrix, spd_solve, sym_eig_topk, DenseMatrix, EigPair};
pub use selfrep::{build_theta, selfrep_affinity, update_a, update_z};
pub use solver::{compute_alpha1, eval_objective, fit, FitResult, SolverConfig};
pub use trace_ratio::{solve_h, trace_ratio_solve, TraceRatioResult, DEFAULT_TOL};

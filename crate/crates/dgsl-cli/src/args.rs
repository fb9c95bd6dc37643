//! Command-line surface. Solver flags mirror the library's configuration
//! one-for-one; a `--config` file can supply any of them, and explicit flags
//! win over file values.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Constrained clustering by jointly learned affinity and embedding.
#[derive(Debug, Parser)]
#[command(name = "dgsl", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Fit one model; dump matrices, predicted labels, and traces
    Fit(FitArgs),
    /// Repeated seeded trials with per-trial records and a summary
    Experiment(ExperimentArgs),
    /// Sample a constraint file from ground-truth labels
    GenConstraints(GenConstraintsArgs),
    /// Export an affinity matrix (k-nearest-neighbor or self-representation)
    Affinity(AffinityArgs),
    /// Export hypergraph matrices (normalized adjacency and Laplacian)
    Hypergraph(HypergraphArgs),
    /// Score predicted labels against ground truth
    Metrics(MetricsArgs),
}

/// Solver settings; every one defaults to the library's value when neither
/// flag nor config file sets it.
#[derive(Debug, Clone, Default, Args)]
pub struct SolverFlags {
    /// Clusters / embedding rows (default: #classes when labels are given, else 2)
    #[arg(long)]
    pub k: Option<usize>,
    /// Coupling weight between the representation and its sparse copy
    #[arg(long)]
    pub lambda: Option<f64>,
    /// L1 weight on the sparse affinity
    #[arg(long)]
    pub lambda_z: Option<f64>,
    /// Must-link boost inside the fused affinity
    #[arg(long)]
    pub lambda_m: Option<f64>,
    /// Scale of the calibrated numerator trace weight
    #[arg(long)]
    pub tau: Option<f64>,
    /// Second trace weight as a fraction of the first
    #[arg(long)]
    pub alpha2_ratio: Option<f64>,
    /// Neighbors kept per point in the kNN affinity
    #[arg(long)]
    pub knn_m: Option<usize>,
    /// Neighbor index that sets the local kernel bandwidth
    #[arg(long)]
    pub knn_l: Option<usize>,
    /// Inner trace-ratio iteration cap
    #[arg(long)]
    pub eta: Option<usize>,
    /// Outer iteration cap
    #[arg(long)]
    pub max_outer: Option<usize>,
    /// Relative step-norm tolerance for early outer stopping
    #[arg(long)]
    pub tol_outer: Option<f64>,
    /// Degree-normalized mode (true) or plain-Laplacian mode (false)
    #[arg(long)]
    pub normalize: Option<bool>,
    /// Base seed for constraint sampling and k-means
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Flags shared by `fit` and `experiment`.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Features CSV, one sample per row
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Ground-truth labels, one integer per line
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Constraint file (`ml i j` / `cl i j` lines)
    #[arg(long, conflicts_with = "protocol")]
    pub constraints: Option<PathBuf>,
    /// Constraint sampling protocol: setting1 | setting2 | incomplete
    #[arg(long)]
    pub protocol: Option<String>,
    /// Labeled samples per class (setting1 / incomplete)
    #[arg(long)]
    pub f: Option<usize>,
    /// Must-link pair count (setting2)
    #[arg(long)]
    pub n_ml: Option<usize>,
    /// Cannot-link pairs per must-link pair (setting2; default 3)
    #[arg(long)]
    pub cl_ratio: Option<f64>,
    /// Fraction of classes contributing constraints (incomplete)
    #[arg(long)]
    pub class_fraction: Option<f64>,
    /// Divide all feature values by 255 (grayscale data)
    #[arg(long)]
    pub div255: bool,
    /// k-means restarts (default 10)
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Key-value config file; explicit flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Independent trials (default 20)
    #[arg(long)]
    pub trials: Option<usize>,
    /// Parallel trial workers (default: one per CPU)
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenConstraintsArgs {
    /// Ground-truth labels, one integer per line
    #[arg(long)]
    pub labels: PathBuf,
    /// Protocol: setting1 | setting2 | incomplete
    #[arg(long)]
    pub protocol: String,
    /// Labeled samples per class (setting1 / incomplete)
    #[arg(long)]
    pub f: Option<usize>,
    /// Must-link pair count (setting2)
    #[arg(long)]
    pub n_ml: Option<usize>,
    /// Cannot-link pairs per must-link pair (setting2; default 3)
    #[arg(long)]
    pub cl_ratio: Option<f64>,
    /// Fraction of classes contributing constraints (incomplete)
    #[arg(long)]
    pub class_fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output constraints file
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AffinityKind {
    /// Gaussian k-nearest-neighbor affinity with local bandwidths
    Knn,
    /// Sparse self-representation affinity
    Selfrep,
}

#[derive(Debug, Args)]
pub struct AffinityArgs {
    /// Features CSV, one sample per row
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, value_enum)]
    pub kind: AffinityKind,
    /// Divide all feature values by 255 (grayscale data)
    #[arg(long)]
    pub div255: bool,
    /// Neighbors kept per point (knn)
    #[arg(long, default_value_t = 7)]
    pub knn_m: usize,
    /// Neighbor index that sets the local kernel bandwidth (knn)
    #[arg(long, default_value_t = 5)]
    pub knn_l: usize,
    /// Coupling weight (selfrep)
    #[arg(long, default_value_t = 100.0)]
    pub lambda: f64,
    /// L1 weight (selfrep)
    #[arg(long, default_value_t = 1.0)]
    pub lambda_z: f64,
    /// Alternation cap (selfrep)
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
    /// Output CSV file
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct HypergraphArgs {
    /// Hyperedge file: vertex indices per line, optional trailing w=<weight>
    #[arg(long)]
    pub edges: PathBuf,
    /// Vertex count (default: largest index + 1)
    #[arg(long)]
    pub n_vertices: Option<usize>,
    /// Affinity CSV to blend with the hyperedge structure: adds hybrid.csv = W + gamma2*O
    #[arg(long)]
    pub affinity: Option<PathBuf>,
    /// Blend weight for the hybrid affinity
    #[arg(long, default_value_t = 1.0)]
    pub gamma2: f64,
    /// Output directory (o.csv, delta.csv, and optionally hybrid.csv)
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Predicted labels, one integer per line
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth labels, one integer per line
    #[arg(long)]
    pub truth: PathBuf,
    /// Write the JSON report here instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

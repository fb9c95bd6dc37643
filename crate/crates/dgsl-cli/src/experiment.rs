//! Experiment orchestration: constraint protocols, single fits, repeated
//! seeded trials, and trace emission.

use std::path::{Path, PathBuf};

use dgsl::{
    accuracy, fit, gen_constraints_incomplete, gen_constraints_setting1, gen_constraints_setting2,
    kmeans, nmi, normalize_columns, parse_constraints, ConstraintSet, FitResult, SolverConfig,
};
use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{read_file, Dataset};
use crate::error::CliError;
use crate::output;

/// Where pairwise supervision comes from: a sampling protocol over the
/// ground-truth labels, or a constraints file.
#[derive(Debug, Clone)]
pub enum Protocol {
    /// f labeled samples per class; all same/cross pairs among them.
    Setting1 { f: usize },
    /// n_ml random same-class pairs plus round(cl_ratio·n_ml) cross pairs.
    Setting2 { n_ml: usize, cl_ratio: f64 },
    /// Setting 1 restricted to a random subset of the classes.
    Incomplete { f: usize, class_fraction: f64 },
    /// Fixed pairs from a `ml i j` / `cl i j` file.
    File(PathBuf),
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Protocol::Setting1 { f } => write!(out, "setting1 f={f}"),
            Protocol::Setting2 { n_ml, cl_ratio } => {
                write!(out, "setting2 n_ml={n_ml} cl_ratio={cl_ratio}")
            }
            Protocol::Incomplete { f, class_fraction } => {
                write!(out, "incomplete f={f} class_fraction={class_fraction}")
            }
            Protocol::File(path) => write!(out, "file {}", path.display()),
        }
    }
}

impl Protocol {
    /// Produces the constraint set for one trial. Sampling protocols need the
    /// ground-truth labels; the file protocol needs `n` for index validation.
    pub fn constraints(
        &self,
        truth: Option<&[usize]>,
        n: usize,
        seed: u64,
    ) -> Result<ConstraintSet, CliError> {
        let need_truth = || {
            truth.ok_or_else(|| {
                CliError::Usage("constraint sampling protocols require --labels".to_string())
            })
        };
        match self {
            Protocol::Setting1 { f } => Ok(gen_constraints_setting1(need_truth()?, *f, seed)?),
            Protocol::Setting2 { n_ml, cl_ratio } => Ok(gen_constraints_setting2(
                need_truth()?,
                *n_ml,
                *cl_ratio,
                seed,
            )?),
            Protocol::Incomplete { f, class_fraction } => Ok(gen_constraints_incomplete(
                need_truth()?,
                *f,
                *class_fraction,
                seed,
            )?),
            Protocol::File(path) => {
                let (ml, cl) =
                    parse_constraints(&read_file(path)?).map_err(|e| CliError::DataFile {
                        path: path.clone(),
                        source: e,
                    })?;
                ConstraintSet::new(n, ml, cl).map_err(|e| CliError::DataFile {
                    path: path.clone(),
                    source: e,
                })
            }
        }
    }
}

/// One full benchmark: `trials` repetitions of sample-constraints → fit →
/// k-means → score, with per-trial seeds `base_seed + trial`.
#[derive(Debug)]
pub struct ExperimentSpec {
    pub dataset: Dataset,
    pub protocol: Protocol,
    pub solver: SolverConfig,
    pub trials: usize,
    pub base_seed: u64,
    /// k-means restarts per trial.
    pub restarts: usize,
    /// Parallel trial workers; `None` lets the thread pool pick.
    pub jobs: Option<usize>,
    pub outdir: PathBuf,
}

/// One trial's scores; the on-disk `trial_NN.json` mirrors this struct.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub acc: f64,
    pub nmi: f64,
    pub iterations: usize,
    pub objective_final: f64,
}

/// Aggregate over all trials; the on-disk `summary.json` mirrors this struct.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Summary {
    pub dataset: String,
    pub trials: usize,
    pub acc_mean: f64,
    pub acc_std: f64,
    pub nmi_mean: f64,
    pub nmi_std: f64,
}

/// Salt XORed into the trial seed for the k-means stream, so clustering
/// never shares a generator state with the constraint sampler of the trial.
pub const KMEANS_SEED_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

fn run_trial(spec: &ExperimentSpec, trial: usize) -> Result<(TrialRecord, FitResult), CliError> {
    let seed = spec.base_seed.wrapping_add(trial as u64);
    let truth = spec
        .dataset
        .truth
        .as_deref()
        .expect("run_experiment checks labels up front");
    let cs = spec
        .protocol
        .constraints(Some(truth), spec.dataset.x.ncols(), seed)?;
    let mut cfg = spec.solver.clone();
    cfg.seed = seed;
    let fitted = fit(&spec.dataset.x, &cs, &cfg)?;
    let embedded = normalize_columns(&fitted.h);
    let pred = kmeans(&embedded, cfg.k, spec.restarts, seed ^ KMEANS_SEED_SALT)?;
    let record = TrialRecord {
        trial,
        seed,
        acc: accuracy(&pred, truth)?,
        nmi: nmi(&pred, truth)?,
        iterations: fitted.iterations_run,
        objective_final: *fitted
            .objective_trace
            .last()
            .expect("fit records at least one iteration"),
    };
    Ok((record, fitted))
}

/// Mean and population standard deviation of the per-trial scores. Keeping
/// this public lets tests recompute the summary from the trial records and
/// demand an exact match with the summary file.
pub fn summarize(dataset: &str, records: &[TrialRecord]) -> Summary {
    let n = records.len() as f64;
    let mean = |f: fn(&TrialRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
    let std = |f: fn(&TrialRecord) -> f64, mu: f64| {
        (records.iter().map(|r| (f(r) - mu).powi(2)).sum::<f64>() / n).sqrt()
    };
    let acc_mean = mean(|r| r.acc);
    let nmi_mean = mean(|r| r.nmi);
    Summary {
        dataset: dataset.to_string(),
        trials: records.len(),
        acc_mean,
        acc_std: std(|r| r.acc, acc_mean),
        nmi_mean,
        nmi_std: std(|r| r.nmi, nmi_mean),
    }
}

/// Runs every trial (in parallel up to `jobs`), then writes per-trial JSON
/// records, per-iteration objective CSVs, final embedding CSVs, and the
/// summary, all from this single thread in trial order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Summary, CliError> {
    if spec.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".to_string()));
    }
    if spec.dataset.truth.is_none() {
        return Err(CliError::Usage(
            "experiment requires --labels to score trials".to_string(),
        ));
    }
    spec.solver.validate()?;

    let run_all = || {
        (0..spec.trials)
            .into_par_iter()
            .map(|t| run_trial(spec, t))
            .collect::<Vec<_>>()
    };
    let results = match spec.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot build a {j}-thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    };

    std::fs::create_dir_all(&spec.outdir).map_err(|e| CliError::Io {
        path: spec.outdir.clone(),
        source: e,
    })?;
    let mut records = Vec::with_capacity(spec.trials);
    for (t, res) in results.into_iter().enumerate() {
        let (record, fitted) = res.map_err(|e| CliError::Trial {
            trial: t,
            source: Box::new(e),
        })?;
        output::write_json(&spec.outdir.join(format!("trial_{t:02}.json")), &record)?;
        output::write_objective_csv(
            &spec.outdir.join(format!("trial_{t:02}_objective.csv")),
            &fitted,
        )?;
        output::write_matrix_csv(
            &spec.outdir.join(format!("trial_{t:02}_embedding.csv")),
            &fitted.h,
        )?;
        records.push(record);
    }
    let summary = summarize(&spec.dataset.name, &records);
    output::write_json(&spec.outdir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Report for a single fit; `acc`/`nmi` appear only when labels were given.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    pub alpha1: f64,
    pub alpha2: f64,
    pub iterations: usize,
    pub objective_final: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nmi: Option<f64>,
}

/// Fits once and dumps everything: learned matrices, predicted labels, the
/// per-iteration trace, and the plot-ready trace files.
pub fn run_fit(
    dataset: &Dataset,
    protocol: &Protocol,
    solver: &SolverConfig,
    restarts: usize,
    outdir: &Path,
) -> Result<FitReport, CliError> {
    solver.validate()?;
    let cs = protocol.constraints(dataset.truth.as_deref(), dataset.x.ncols(), solver.seed)?;
    let fitted = fit(&dataset.x, &cs, solver)?;
    let embedded = normalize_columns(&fitted.h);
    let pred = kmeans(&embedded, solver.k, restarts, solver.seed ^ KMEANS_SEED_SALT)?;
    let (acc_v, nmi_v) = match dataset.truth.as_deref() {
        Some(t) => (Some(accuracy(&pred, t)?), Some(nmi(&pred, t)?)),
        None => (None, None),
    };

    std::fs::create_dir_all(outdir).map_err(|e| CliError::Io {
        path: outdir.to_path_buf(),
        source: e,
    })?;
    output::write_matrix_csv(&outdir.join("a.csv"), &fitted.a)?;
    output::write_matrix_csv(&outdir.join("z.csv"), &fitted.z)?;
    output::write_matrix_csv(&outdir.join("h.csv"), &fitted.h)?;
    output::write_labels(&outdir.join("labels.txt"), &pred)?;
    output::write_objective_csv(&outdir.join("objective.csv"), &fitted)?;
    emit_trace(&fitted, outdir)?;

    let report = FitReport {
        alpha1: fitted.alpha1,
        alpha2: fitted.alpha2,
        iterations: fitted.iterations_run,
        objective_final: *fitted
            .objective_trace
            .last()
            .expect("fit records at least one iteration"),
        acc: acc_v,
        nmi: nmi_v,
    };
    output::write_json(&outdir.join("result.json"), &report)?;
    Ok(report)
}

/// Writes the plot-ready trace files: `z_abs.csv` (entrywise |Z|) and
/// `pdist.csv`, the pairwise distance matrix of the unit-normalized embedding
/// columns (P_ij = ‖ĥ_i − ĥ_j‖). Block structure in these matrices is the
/// visual signature of a good clustering.
pub fn emit_trace(result: &FitResult, dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    output::write_matrix_csv(&dir.join("z_abs.csv"), &result.z.mapv(f64::abs))?;

    let p = normalize_columns(&result.h);
    let (k, n) = p.dim();
    let mut dist = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (0..k)
                .map(|r| (p[[r, i]] - p[[r, j]]).powi(2))
                .sum::<f64>()
                .sqrt();
            dist[[i, j]] = d;
            dist[[j, i]] = d;
        }
    }
    output::write_matrix_csv(&dir.join("pdist.csv"), &dist)
}

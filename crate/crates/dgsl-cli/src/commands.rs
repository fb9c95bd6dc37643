//! Flag/config resolution and the per-subcommand entry points.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::Instant;

use dgsl::{
    accuracy, hybrid_affinity, hypergraph_laplacian, knn_affinity, nmi, normalized_adjacency,
    parse_config, parse_hyperedges, parse_labels, selfrep_affinity, ConfigFile, Hypergraph,
    SolverConfig,
};
use serde::Serialize;

use crate::args::{
    AffinityArgs, AffinityKind, Cli, Cmd, CommonArgs, ExperimentArgs, FitArgs, GenConstraintsArgs,
    HypergraphArgs, MetricsArgs,
};
use crate::dataset::{load_dataset, read_file, read_matrix_csv, Dataset};
use crate::error::CliError;
use crate::experiment::{run_experiment, run_fit, ExperimentSpec, Protocol};
use crate::output;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Fit(a) => cmd_fit(a),
        Cmd::Experiment(a) => cmd_experiment(a),
        Cmd::GenConstraints(a) => cmd_gen_constraints(a),
        Cmd::Affinity(a) => cmd_affinity(a),
        Cmd::Hypergraph(a) => cmd_hypergraph(a),
        Cmd::Metrics(a) => cmd_metrics(a),
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<ConfigFile, CliError> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => parse_config(&read_file(p)?).map_err(|e| CliError::Config {
            path: p.clone(),
            source: e,
        }),
    }
}

fn parse_protocol(
    name: &str,
    f: Option<usize>,
    n_ml: Option<usize>,
    cl_ratio: Option<f64>,
    class_fraction: Option<f64>,
) -> Result<Protocol, CliError> {
    match name {
        "setting1" => Ok(Protocol::Setting1 {
            f: f.ok_or_else(|| CliError::Usage("protocol setting1 needs --f".to_string()))?,
        }),
        "setting2" => Ok(Protocol::Setting2 {
            n_ml: n_ml
                .ok_or_else(|| CliError::Usage("protocol setting2 needs --n-ml".to_string()))?,
            cl_ratio: cl_ratio.unwrap_or(3.0),
        }),
        "incomplete" => Ok(Protocol::Incomplete {
            f: f.ok_or_else(|| CliError::Usage("protocol incomplete needs --f".to_string()))?,
            class_fraction: class_fraction.ok_or_else(|| {
                CliError::Usage("protocol incomplete needs --class-fraction".to_string())
            })?,
        }),
        other => Err(CliError::Usage(format!(
            "unknown protocol {other:?} (expected setting1, setting2, or incomplete)"
        ))),
    }
}

/// Everything `fit` and `experiment` share after merging flags over the
/// config file over the defaults.
struct Resolved {
    dataset: Dataset,
    protocol: Protocol,
    solver: SolverConfig,
    restarts: usize,
    div255: bool,
    outdir: PathBuf,
    /// Kept for command-specific extras (e.g. `trials`).
    file: ConfigFile,
}

fn resolve_common(c: &CommonArgs) -> Result<Resolved, CliError> {
    let file = load_config(c.config.as_ref())?;

    let features = c
        .features
        .clone()
        .or_else(|| file.features.clone().map(PathBuf::from))
        .ok_or_else(|| CliError::Usage("--features is required (flag or config)".to_string()))?;
    let labels = c
        .labels
        .clone()
        .or_else(|| file.labels.clone().map(PathBuf::from));
    let div255 = c.div255 || file.div255.unwrap_or(false);
    let dataset = load_dataset(&features, labels.as_deref(), div255)?;

    let constraints_path = c
        .constraints
        .clone()
        .or_else(|| file.constraints.clone().map(PathBuf::from));
    let protocol_name = c.protocol.clone().or_else(|| file.protocol.clone());
    let protocol = match (constraints_path, protocol_name) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either a constraints file or a protocol, not both".to_string(),
            ))
        }
        (Some(path), None) => Protocol::File(path),
        (None, Some(name)) => parse_protocol(
            &name,
            c.f.or(file.f),
            c.n_ml.or(file.n_ml),
            c.cl_ratio.or(file.cl_ratio),
            c.class_fraction.or(file.class_fraction),
        )?,
        (None, None) => {
            return Err(CliError::Usage(
                "constraints are required: --constraints FILE or --protocol NAME".to_string(),
            ))
        }
    };

    let mut solver = SolverConfig::default();
    macro_rules! overlay {
        ($src:expr, [$($field:ident),* $(,)?]) => {
            $( if let Some(v) = $src.$field { solver.$field = v; } )*
        };
    }
    overlay!(
        file,
        [k, lambda, lambda_z, lambda_m, tau, alpha2_ratio, knn_m, knn_l, eta, max_outer,
         tol_outer, normalize, seed]
    );
    overlay!(
        c.solver,
        [k, lambda, lambda_z, lambda_m, tau, alpha2_ratio, knn_m, knn_l, eta, max_outer,
         tol_outer, normalize, seed]
    );
    if c.solver.k.is_none() && file.k.is_none() {
        if let Some(truth) = &dataset.truth {
            solver.k = truth.iter().collect::<BTreeSet<_>>().len();
        }
    }

    let restarts = c.restarts.or(file.restarts).unwrap_or(10);
    let outdir = c
        .output
        .clone()
        .or_else(|| file.output.clone().map(PathBuf::from))
        .ok_or_else(|| CliError::Usage("--output is required (flag or config)".to_string()))?;

    Ok(Resolved {
        dataset,
        protocol,
        solver,
        restarts,
        div255,
        outdir,
        file,
    })
}

/// Echo of the fully merged settings, written as `resolved.json` so a run's
/// directory documents exactly what produced it.
#[derive(Serialize)]
struct ResolvedConfig {
    protocol: String,
    k: usize,
    lambda: f64,
    lambda_z: f64,
    lambda_m: f64,
    tau: f64,
    alpha2_ratio: f64,
    knn_m: usize,
    knn_l: usize,
    eta: usize,
    max_outer: usize,
    tol_outer: f64,
    normalize: bool,
    seed: u64,
    restarts: usize,
    div255: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<usize>,
}

fn write_resolved(r: &Resolved, trials: Option<usize>) -> Result<(), CliError> {
    std::fs::create_dir_all(&r.outdir).map_err(|e| CliError::Io {
        path: r.outdir.clone(),
        source: e,
    })?;
    let echo = ResolvedConfig {
        protocol: r.protocol.to_string(),
        k: r.solver.k,
        lambda: r.solver.lambda,
        lambda_z: r.solver.lambda_z,
        lambda_m: r.solver.lambda_m,
        tau: r.solver.tau,
        alpha2_ratio: r.solver.alpha2_ratio,
        knn_m: r.solver.knn_m,
        knn_l: r.solver.knn_l,
        eta: r.solver.eta,
        max_outer: r.solver.max_outer,
        tol_outer: r.solver.tol_outer,
        normalize: r.solver.normalize,
        seed: r.solver.seed,
        restarts: r.restarts,
        div255: r.div255,
        trials,
    };
    output::write_json(&r.outdir.join("resolved.json"), &echo)
}

fn cmd_fit(a: FitArgs) -> Result<(), CliError> {
    let r = resolve_common(&a.common)?;
    r.solver.validate()?;
    write_resolved(&r, None)?;
    let report = run_fit(&r.dataset, &r.protocol, &r.solver, r.restarts, &r.outdir)?;
    eprintln!(
        "fit: {} iterations, final objective {:.6e}",
        report.iterations, report.objective_final
    );
    if let (Some(acc), Some(nmi)) = (report.acc, report.nmi) {
        eprintln!("fit: acc {acc:.4}, nmi {nmi:.4}");
    }
    Ok(())
}

fn cmd_experiment(a: ExperimentArgs) -> Result<(), CliError> {
    let r = resolve_common(&a.common)?;
    r.solver.validate()?;
    let trials = a.trials.or(r.file.trials).unwrap_or(20);
    write_resolved(&r, Some(trials))?;
    let spec = ExperimentSpec {
        base_seed: r.solver.seed,
        dataset: r.dataset,
        protocol: r.protocol,
        solver: r.solver,
        trials,
        restarts: r.restarts,
        jobs: a.jobs,
        outdir: r.outdir,
    };
    let start = Instant::now();
    let summary = run_experiment(&spec)?;
    eprintln!(
        "experiment: {} trials in {:.2?}: acc {:.4} ± {:.4}, nmi {:.4} ± {:.4}",
        summary.trials,
        start.elapsed(),
        summary.acc_mean,
        summary.acc_std,
        summary.nmi_mean,
        summary.nmi_std,
    );
    Ok(())
}

fn cmd_gen_constraints(a: GenConstraintsArgs) -> Result<(), CliError> {
    let truth = parse_labels(&read_file(&a.labels)?).map_err(|e| CliError::DataFile {
        path: a.labels.clone(),
        source: e,
    })?;
    let protocol = parse_protocol(&a.protocol, a.f, a.n_ml, a.cl_ratio, a.class_fraction)?;
    let cs = protocol.constraints(Some(&truth), truth.len(), a.seed)?;
    output::write_constraints(&a.output, &cs)?;
    eprintln!(
        "gen-constraints: wrote {} must-links and {} cannot-links",
        cs.must_links().len(),
        cs.cannot_links().len()
    );
    Ok(())
}

fn cmd_affinity(a: AffinityArgs) -> Result<(), CliError> {
    let ds = load_dataset(&a.features, None, a.div255)?;
    let w = match a.kind {
        AffinityKind::Knn => knn_affinity(&ds.x, a.knn_m, a.knn_l)?,
        AffinityKind::Selfrep => selfrep_affinity(&ds.x, a.lambda, a.lambda_z, a.iters)?,
    };
    output::write_matrix_csv(&a.output, &w)
}

fn cmd_hypergraph(a: HypergraphArgs) -> Result<(), CliError> {
    let (edges, weights) = parse_hyperedges(&read_file(&a.edges)?).map_err(|e| {
        CliError::DataFile {
            path: a.edges.clone(),
            source: e,
        }
    })?;
    let max_index = edges.iter().flatten().copied().max().unwrap_or(0);
    let n = a.n_vertices.unwrap_or(max_index + 1);
    let hg = Hypergraph::new(n, edges, weights)?;
    let o = normalized_adjacency(&hg)?;
    let delta = hypergraph_laplacian(&hg)?;
    std::fs::create_dir_all(&a.output).map_err(|e| CliError::Io {
        path: a.output.clone(),
        source: e,
    })?;
    output::write_matrix_csv(&a.output.join("o.csv"), &o)?;
    output::write_matrix_csv(&a.output.join("delta.csv"), &delta)?;
    if let Some(wpath) = &a.affinity {
        let w = read_matrix_csv(wpath)?;
        let hybrid = hybrid_affinity(&w, &o, a.gamma2)?;
        output::write_matrix_csv(&a.output.join("hybrid.csv"), &hybrid)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct MetricsReport {
    acc: f64,
    nmi: f64,
}

fn cmd_metrics(a: MetricsArgs) -> Result<(), CliError> {
    let pred = parse_labels(&read_file(&a.pred)?).map_err(|e| CliError::DataFile {
        path: a.pred.clone(),
        source: e,
    })?;
    let truth = parse_labels(&read_file(&a.truth)?).map_err(|e| CliError::DataFile {
        path: a.truth.clone(),
        source: e,
    })?;
    let report = MetricsReport {
        acc: accuracy(&pred, &truth)?,
        nmi: nmi(&pred, &truth)?,
    };
    match &a.output {
        Some(path) => output::write_json(path, &report),
        None => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
            Ok(())
        }
    }
}

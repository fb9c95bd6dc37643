//! Writers for the CLI's file formats: matrix CSV, label lists, constraint
//! files, JSON reports. All floats use Rust's shortest round-trip formatting,
//! so equal values produce equal bytes.

use std::fmt::Write as _;
use std::path::Path;

use dgsl::{ConstraintSet, DenseMatrix, FitResult};
use serde::Serialize;

use crate::error::CliError;

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// One line per matrix row, comma-separated.
pub fn write_matrix_csv(path: &Path, m: &DenseMatrix) -> Result<(), CliError> {
    let mut s = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", m[[i, j]]);
        }
        s.push('\n');
    }
    write_text(path, &s)
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<(), CliError> {
    let mut s = String::new();
    for l in labels {
        let _ = writeln!(s, "{l}");
    }
    write_text(path, &s)
}

/// The same `ml i j` / `cl i j` line format the constraint parser reads.
pub fn write_constraints(path: &Path, cs: &ConstraintSet) -> Result<(), CliError> {
    let mut s = String::new();
    for &(i, j) in cs.must_links() {
        let _ = writeln!(s, "ml {i} {j}");
    }
    for &(i, j) in cs.cannot_links() {
        let _ = writeln!(s, "cl {i} {j}");
    }
    write_text(path, &s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    write_text(path, &text)
}

/// Per-iteration solver trace: objective value, block step norms, and the
/// largest entry magnitude, one row per outer iteration.
pub fn write_objective_csv(path: &Path, fit: &FitResult) -> Result<(), CliError> {
    let mut s = String::from("iteration,objective,delta_a,delta_z,max_abs\n");
    for (t, ((obj, (da, dz)), mx)) in fit
        .objective_trace
        .iter()
        .zip(fit.step_norms.iter())
        .zip(fit.max_abs_trace.iter())
        .enumerate()
    {
        let _ = writeln!(s, "{},{obj},{da},{dz},{mx}", t + 1);
    }
    write_text(path, &s)
}

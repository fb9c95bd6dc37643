//! Loading feature matrices, labels, and plain CSV matrices from disk.

use std::path::Path;

use dgsl::{parse_features_csv, parse_labels, DenseMatrix};

use crate::error::CliError;

/// A loaded feature matrix (d×n, columns are samples) with optional
/// ground-truth labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: DenseMatrix,
    pub truth: Option<Vec<usize>>,
    pub name: String,
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Reads a features CSV (one sample per row) and, when given, a labels file
/// (one integer per line, same count as samples). `div255` rescales grayscale
/// byte values into [0, 1].
pub fn load_dataset(
    features: &Path,
    labels: Option<&Path>,
    div255: bool,
) -> Result<Dataset, CliError> {
    let mut x = parse_features_csv(&read_file(features)?).map_err(|e| CliError::DataFile {
        path: features.to_path_buf(),
        source: e,
    })?;
    if div255 {
        x.mapv_inplace(|v| v / 255.0);
    }
    let truth = match labels {
        Some(lp) => {
            let t = parse_labels(&read_file(lp)?).map_err(|e| CliError::DataFile {
                path: lp.to_path_buf(),
                source: e,
            })?;
            if t.len() != x.ncols() {
                return Err(CliError::DataFile {
                    path: lp.to_path_buf(),
                    source: dgsl::Error::LengthMismatch {
                        left: t.len(),
                        right: x.ncols(),
                    },
                });
            }
            Some(t)
        }
        None => None,
    };
    let name = features
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Ok(Dataset { x, truth, name })
}

/// Reads a CSV as a matrix in file orientation (row r of the file is row r of
/// the matrix). The features parser stores rows as columns, so undo that.
pub fn read_matrix_csv(path: &Path) -> Result<DenseMatrix, CliError> {
    let m = parse_features_csv(&read_file(path)?).map_err(|e| CliError::DataFile {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(m.t().to_owned())
}

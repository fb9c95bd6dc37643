//! Text-format parsers for datasets, labels, pairwise constraints,
//! hyperedges, and key-value config files. Every parser tolerates arbitrary
//! input without panicking and reports 1-based line numbers on failure.
//! Lines may carry `#` comments; blank lines are skipped.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Strips a trailing `#` comment and surrounding whitespace; returns None for
/// lines with no content.
fn payload(line: &str) -> Option<&str> {
    let body = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let body = body.trim();
    if body.is_empty() {
        None
    } else {
        Some(body)
    }
}

fn parse_f64(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a number, got {token:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite value {token:?}"),
        });
    }
    Ok(v)
}

fn parse_usize(token: &str, line: usize) -> Result<usize> {
    token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a nonnegative integer, got {token:?}"),
    })
}

/// Parses comma-separated features, one sample per line, into a d×n matrix
/// with one column per sample.
pub fn parse_features_csv(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let Some(body) = payload(raw) else { continue };
        let mut row = Vec::new();
        for token in body.split(',') {
            let token = token.trim();
            if token.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "empty field".into(),
                });
            }
            row.push(parse_f64(token, line_no)?);
        }
        if rows.is_empty() {
            width = row.len();
        } else if row.len() != width {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("row has {} fields, expected {width}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no data rows".into(),
        });
    }
    let n = rows.len();
    let mut x = Array2::<f64>::zeros((width, n));
    for (s, row) in rows.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            x[[i, s]] = v;
        }
    }
    Ok(x)
}

/// Parses one nonnegative integer label per line.
pub fn parse_labels(text: &str) -> Result<Vec<usize>> {
    let mut labels = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let Some(body) = payload(raw) else { continue };
        labels.push(parse_usize(body, line_no)?);
    }
    if labels.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no labels".into(),
        });
    }
    Ok(labels)
}

/// Parses constraint lines of the form `ml i j` / `cl i j` into
/// (must-links, cannot-links).
#[allow(clippy::type_complexity)]
pub fn parse_constraints(text: &str) -> Result<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    let mut ml = Vec::new();
    let mut cl = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let Some(body) = payload(raw) else { continue };
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `ml i j` or `cl i j`, got {} tokens", tokens.len()),
            });
        }
        let i = parse_usize(tokens[1], line_no)?;
        let j = parse_usize(tokens[2], line_no)?;
        match tokens[0] {
            "ml" => ml.push((i, j)),
            "cl" => cl.push((i, j)),
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unknown constraint kind {other:?}"),
                })
            }
        }
    }
    Ok((ml, cl))
}

/// Parses one hyperedge per line as whitespace-separated vertex indices with
/// an optional trailing `w=<weight>`; the weight defaults to 1.
#[allow(clippy::type_complexity)]
pub fn parse_hyperedges(text: &str) -> Result<(Vec<Vec<usize>>, Vec<f64>)> {
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let Some(body) = payload(raw) else { continue };
        let mut vertices = Vec::new();
        let mut weight = 1.0;
        let tokens: Vec<&str> = body.split_whitespace().collect();
        for (pos, token) in tokens.iter().enumerate() {
            if let Some(value) = token.strip_prefix("w=") {
                if pos + 1 != tokens.len() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "w=<weight> must be the last token".into(),
                    });
                }
                weight = parse_f64(value, line_no)?;
                if weight <= 0.0 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("hyperedge weight must be positive, got {weight}"),
                    });
                }
            } else {
                vertices.push(parse_usize(token, line_no)?);
            }
        }
        if vertices.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: "hyperedge has no vertices".into(),
            });
        }
        edges.push(vertices);
        weights.push(weight);
    }
    if edges.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no hyperedges".into(),
        });
    }
    Ok((edges, weights))
}

/// Optional solver and experiment settings read from a `key = value` file.
/// Every field is `None` until the file sets it; the caller layers these over
/// its defaults and lets command-line flags override both.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub k: Option<usize>,
    pub lambda: Option<f64>,
    pub lambda_z: Option<f64>,
    pub lambda_m: Option<f64>,
    pub tau: Option<f64>,
    pub alpha2_ratio: Option<f64>,
    pub knn_m: Option<usize>,
    pub knn_l: Option<usize>,
    pub eta: Option<usize>,
    pub max_outer: Option<usize>,
    pub tol_outer: Option<f64>,
    pub normalize: Option<bool>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub trials: Option<usize>,
    pub gamma2: Option<f64>,
    pub protocol: Option<String>,
    pub f: Option<usize>,
    pub n_ml: Option<usize>,
    pub cl_ratio: Option<f64>,
    pub class_fraction: Option<f64>,
    pub div255: Option<bool>,
    pub features: Option<String>,
    pub labels: Option<String>,
    pub constraints: Option<String>,
    pub output: Option<String>,
}

fn parse_bool(token: &str, line: usize) -> Result<bool> {
    match token {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::Parse {
            line,
            msg: format!("expected true or false, got {other:?}"),
        }),
    }
}

fn parse_u64(token: &str, line: usize) -> Result<u64> {
    token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a nonnegative integer, got {token:?}"),
    })
}

/// Parses a `key = value` config file. Unknown or repeated keys are errors.
pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut cfg = ConfigFile::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let Some(body) = payload(raw) else { continue };
        let Some((key, value)) = body.split_once('=') else {
            return Err(Error::Parse {
                line: line_no,
                msg: "expected `key = value`".into(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("key {key:?} has no value"),
            });
        }
        if seen.iter().any(|k| k == key) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate key {key:?}"),
            });
        }
        seen.push(key.to_string());
        match key {
            "k" => cfg.k = Some(parse_usize(value, line_no)?),
            "lambda" => cfg.lambda = Some(parse_f64(value, line_no)?),
            "lambda_z" => cfg.lambda_z = Some(parse_f64(value, line_no)?),
            "lambda_m" => cfg.lambda_m = Some(parse_f64(value, line_no)?),
            "tau" => cfg.tau = Some(parse_f64(value, line_no)?),
            "alpha2_ratio" => cfg.alpha2_ratio = Some(parse_f64(value, line_no)?),
            "knn_m" => cfg.knn_m = Some(parse_usize(value, line_no)?),
            "knn_l" => cfg.knn_l = Some(parse_usize(value, line_no)?),
            "eta" => cfg.eta = Some(parse_usize(value, line_no)?),
            "max_outer" => cfg.max_outer = Some(parse_usize(value, line_no)?),
            "tol_outer" => cfg.tol_outer = Some(parse_f64(value, line_no)?),
            "normalize" => cfg.normalize = Some(parse_bool(value, line_no)?),
            "seed" => cfg.seed = Some(parse_u64(value, line_no)?),
            "restarts" => cfg.restarts = Some(parse_usize(value, line_no)?),
            "trials" => cfg.trials = Some(parse_usize(value, line_no)?),
            "gamma2" => cfg.gamma2 = Some(parse_f64(value, line_no)?),
            "protocol" => cfg.protocol = Some(value.to_string()),
            "f" => cfg.f = Some(parse_usize(value, line_no)?),
            "n_ml" => cfg.n_ml = Some(parse_usize(value, line_no)?),
            "cl_ratio" => cfg.cl_ratio = Some(parse_f64(value, line_no)?),
            "class_fraction" => cfg.class_fraction = Some(parse_f64(value, line_no)?),
            "div255" => cfg.div255 = Some(parse_bool(value, line_no)?),
            "features" => cfg.features = Some(value.to_string()),
            "labels" => cfg.labels = Some(value.to_string()),
            "constraints" => cfg.constraints = Some(value.to_string()),
            "output" => cfg.output = Some(value.to_string()),
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unknown key {other:?}"),
                })
            }
        }
    }
    Ok(cfg)
}

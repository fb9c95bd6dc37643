//! Self-representation updates: the ridge-regularized coefficient solve, the
//! embedding-weighted shrinkage thresholds, the soft-threshold sparsification,
//! and the standalone affinity construction used for baselines.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::eval::normalize_columns;
use crate::graph::laplacian;
use crate::linalg::{spd_solve, DenseMatrix};

/// Guard under trace denominators: the cannot-link quadratic form has rank at
/// most twice the constraint count, and an unlucky embedding can nearly
/// annihilate it.
pub(crate) const EPS_DEN: f64 = 1e-12;

/// Dense coefficient update: the unique minimizer of
/// ½‖X−XA‖² + (λ/2)‖A−Z‖², i.e. A = (XᵀX+λI)⁻¹(XᵀX+λZ).
pub fn update_a(x: &DenseMatrix, z: &DenseMatrix, lambda: f64) -> Result<DenseMatrix> {
    let n = x.ncols();
    if z.dim() != (n, n) {
        return Err(Error::ShapeMismatch {
            context: "update_a coefficients",
            expected: (n, n),
            got: z.dim(),
        });
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParam {
            name: "lambda",
            why: format!("must be finite and > 0, got {lambda}"),
        });
    }
    let gram = x.t().dot(x);
    let mut k = gram.clone();
    for i in 0..n {
        k[[i, i]] += lambda;
    }
    let b = &gram + &(lambda * z);
    spd_solve(&k, &b)
}

/// Per-entry shrinkage weights for the sparse update:
/// Θ_ij = α₁‖h_i−h_j‖² / (2λ·Tr(H L_C Hᵀ)) + λ_Z/λ.
///
/// With `normalize` set the distances use unit-length embedding columns
/// (columns below 1e-12 in norm count as zero vectors); the trace in the
/// denominator always uses H as given.
pub fn build_theta(
    h: &DenseMatrix,
    c: &DenseMatrix,
    alpha1: f64,
    lambda: f64,
    lambda_z: f64,
    normalize: bool,
) -> Result<DenseMatrix> {
    let n = h.ncols();
    if c.dim() != (n, n) {
        return Err(Error::ShapeMismatch {
            context: "build_theta cannot-link matrix",
            expected: (n, n),
            got: c.dim(),
        });
    }
    for (name, v, min_ok) in [
        ("alpha1", alpha1, 0.0),
        ("lambda", lambda, f64::MIN_POSITIVE),
        ("lambda_z", lambda_z, 0.0),
    ] {
        if !v.is_finite() || v < min_ok {
            return Err(Error::InvalidParam {
                name: "build_theta weight",
                why: format!("{name} out of range: {v}"),
            });
        }
    }

    let l_c = laplacian(c)?;
    let tr_c = h.dot(&l_c).dot(&h.t()).diag().sum();
    if !(tr_c.is_finite() && tr_c > EPS_DEN) {
        return Err(Error::DegenerateDenominator("build_theta"));
    }

    let hd = if normalize { normalize_columns(h) } else { h.clone() };
    let k = hd.nrows();
    let base = lambda_z / lambda;
    let scale = alpha1 / (2.0 * lambda * tr_c);
    let mut theta = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let mut d2 = 0.0;
            for t in 0..k {
                let d = hd[[t, i]] - hd[[t, j]];
                d2 += d * d;
            }
            let v = scale * d2 + base;
            theta[[i, j]] = v;
            theta[[j, i]] = v;
        }
        theta[[i, i]] = base;
    }
    Ok(theta)
}

/// Entrywise soft-threshold with a zeroed diagonal:
/// z_ij = sgn(a_ij)·max(|a_ij|−θ_ij, 0), z_ii = 0.
///
/// This is the exact minimizer of ½‖Z−A‖² + ‖Θ⊙Z‖₁ subject to diag(Z)=0.
pub fn update_z(a: &DenseMatrix, theta: &DenseMatrix) -> Result<DenseMatrix> {
    let dim = a.dim();
    if theta.dim() != dim {
        return Err(Error::ShapeMismatch {
            context: "update_z thresholds",
            expected: dim,
            got: theta.dim(),
        });
    }
    let mut z = Array2::<f64>::zeros(dim);
    for ((i, j), &av) in a.indexed_iter() {
        if i != j {
            let mag = av.abs() - theta[[i, j]];
            if mag > 0.0 {
                z[[i, j]] = av.signum() * mag;
            }
        }
    }
    Ok(z)
}

fn soft_threshold_scalar(a: &DenseMatrix, theta: f64) -> DenseMatrix {
    let mut z = Array2::<f64>::zeros(a.dim());
    for ((i, j), &av) in a.indexed_iter() {
        if i != j {
            let mag = av.abs() - theta;
            if mag > 0.0 {
                z[[i, j]] = av.signum() * mag;
            }
        }
    }
    z
}

pub(crate) fn selfrep_objective(
    x: &DenseMatrix,
    a: &DenseMatrix,
    z: &DenseMatrix,
    lambda: f64,
    lambda_z: f64,
) -> f64 {
    let resid = x - &x.dot(a);
    let fit: f64 = resid.iter().map(|v| v * v).sum::<f64>() * 0.5;
    let prox: f64 = a
        .iter()
        .zip(z.iter())
        .map(|(av, zv)| (av - zv) * (av - zv))
        .sum::<f64>()
        * 0.5
        * lambda;
    let l1: f64 = z.iter().map(|v| v.abs()).sum::<f64>() * lambda_z;
    fit + prox + l1
}

/// Standalone self-representation affinity: alternate the dense coefficient
/// solve with constant-threshold shrinkage (θ = λ_Z/λ) on
/// ½‖X−XA‖² + (λ/2)‖A−Z‖² + λ_Z‖Z‖₁, diag(Z)=0, then rescale each column of
/// |Z| by its max entry. Zero columns stay zero. Stops early once the
/// objective's relative change drops below 1e-8.
pub fn selfrep_affinity(
    x: &DenseMatrix,
    lambda: f64,
    lambda_z: f64,
    iters: usize,
) -> Result<DenseMatrix> {
    if !(lambda.is_finite() && lambda > 0.0) || !(lambda_z.is_finite() && lambda_z >= 0.0) {
        return Err(Error::InvalidParam {
            name: "selfrep_affinity weights",
            why: format!("lambda={lambda}, lambda_z={lambda_z}"),
        });
    }
    let n = x.ncols();
    let theta = lambda_z / lambda;
    let mut z = Array2::<f64>::zeros((n, n));
    let mut prev = f64::INFINITY;
    for it in 0..iters.max(1) {
        let a = update_a(x, &z, lambda)?;
        z = soft_threshold_scalar(&a, theta);
        let obj = selfrep_objective(x, &a, &z, lambda, lambda_z);
        if !obj.is_finite() {
            return Err(Error::NonFiniteObjective { iteration: it + 1 });
        }
        if (prev - obj).abs() <= 1e-8 * prev.abs().max(1.0) {
            break;
        }
        prev = obj;
    }

    let mut out = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mx = (0..n).map(|i| z[[i, j]].abs()).fold(0.0, f64::max);
        if mx > 0.0 {
            for i in 0..n {
                out[[i, j]] = z[[i, j]].abs() / mx;
            }
        }
    }
    Ok(out)
}

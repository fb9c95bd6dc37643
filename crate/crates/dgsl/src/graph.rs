//! Affinity-side construction: kNN Gaussian affinities, must-link /
//! cannot-link encodings, graph Laplacians, and the fused affinity that the
//! embedding solver consumes.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Pairwise supervision: unordered index pairs declared same-cluster
/// (must-link) or different-cluster (cannot-link).
///
/// Pairs are stored with i < j and deduplicated; a pair present in both lists
/// is rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSet {
    n: usize,
    must_links: Vec<(usize, usize)>,
    cannot_links: Vec<(usize, usize)>,
}

impl ConstraintSet {
    pub fn new(
        n: usize,
        must_links: Vec<(usize, usize)>,
        cannot_links: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let norm = |pairs: Vec<(usize, usize)>, context: &'static str| -> Result<Vec<(usize, usize)>> {
            let mut out = Vec::with_capacity(pairs.len());
            for (i, j) in pairs {
                if i >= n {
                    return Err(Error::IndexOutOfRange { context, index: i, n });
                }
                if j >= n {
                    return Err(Error::IndexOutOfRange { context, index: j, n });
                }
                if i == j {
                    return Err(Error::InvalidParam {
                        name: "constraint pair",
                        why: format!("({i},{j}) links a point to itself"),
                    });
                }
                out.push((i.min(j), i.max(j)));
            }
            out.sort_unstable();
            out.dedup();
            Ok(out)
        };
        let must_links = norm(must_links, "must-link")?;
        let cannot_links = norm(cannot_links, "cannot-link")?;
        let mut ci = cannot_links.iter().peekable();
        for &(i, j) in &must_links {
            while let Some(&&c) = ci.peek() {
                if c < (i, j) {
                    ci.next();
                } else {
                    break;
                }
            }
            if ci.peek() == Some(&&(i, j)) {
                return Err(Error::ContradictoryPair { i, j });
            }
        }
        Ok(Self {
            n,
            must_links,
            cannot_links,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn must_links(&self) -> &[(usize, usize)] {
        &self.must_links
    }

    pub fn cannot_links(&self) -> &[(usize, usize)] {
        &self.cannot_links
    }
}

/// The graph-side state of one problem instance: kNN affinity W, must-link
/// indicator M, normalized cannot-link matrix C, and the per-point kernel
/// scales sigma.
#[derive(Debug, Clone)]
pub struct GraphModel {
    pub w: DenseMatrix,
    pub m: DenseMatrix,
    pub c: DenseMatrix,
    pub sigma: Vec<f64>,
    pub knn_m: usize,
    pub knn_l: usize,
}

impl GraphModel {
    /// Builds W from the data columns and (M, C) from the constraints.
    pub fn build(x: &DenseMatrix, cs: &ConstraintSet, m: usize, l: usize) -> Result<Self> {
        if cs.n() != x.ncols() {
            return Err(Error::ShapeMismatch {
                context: "constraint set vs data columns",
                expected: (x.ncols(), 0),
                got: (cs.n(), 0),
            });
        }
        let (w, sigma) = knn_affinity_with_scales(x, m, l)?;
        let (mm, cc) = encode_constraints(cs)?;
        Ok(Self {
            w,
            m: mm,
            c: cc,
            sigma,
            knn_m: m,
            knn_l: l,
        })
    }
}

/// kNN Gaussian affinity over the columns of `x` (one point per column):
/// w_ij = exp(−‖x_i−x_j‖²/σ_i²) for the m nearest neighbors of x_i, else 0,
/// with σ_i the distance from x_i to its l-th nearest neighbor.
///
/// A point is never its own neighbor. Distance ties at the neighbor-set
/// boundary break toward the smaller index, so rows always hold exactly m
/// nonzeros and the result is reproducible. Duplicated points give σ_i = 0;
/// the fallback is the smallest strictly positive distance to any other
/// point, or 1 when every other point coincides with x_i.
pub fn knn_affinity(x: &DenseMatrix, m: usize, l: usize) -> Result<DenseMatrix> {
    knn_affinity_with_scales(x, m, l).map(|(w, _)| w)
}

pub(crate) fn knn_affinity_with_scales(
    x: &DenseMatrix,
    m: usize,
    l: usize,
) -> Result<(DenseMatrix, Vec<f64>)> {
    let n = x.ncols();
    if m == 0 || l == 0 || l > m {
        return Err(Error::InvalidParam {
            name: "knn (m, l)",
            why: format!("need 1 <= l <= m, got m={m}, l={l}"),
        });
    }
    if n < m + 1 {
        return Err(Error::TooFewPoints {
            what: "knn_affinity",
            needed: m + 1,
            n,
        });
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("knn_affinity data"));
    }

    // Squared distances once; σ² is read back from the same table so the
    // l-th neighbor's weight is exp(−1) exactly.
    let mut sq = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let mut s = 0.0;
            for t in 0..x.nrows() {
                let d = x[[t, i]] - x[[t, j]];
                s += d * d;
            }
            sq[[i, j]] = s;
            sq[[j, i]] = s;
        }
    }

    let mut w = Array2::<f64>::zeros((n, n));
    let mut sigma = Vec::with_capacity(n);
    let mut order: Vec<usize> = Vec::with_capacity(n - 1);
    for i in 0..n {
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        order.sort_by(|&a, &b| {
            sq[[i, a]]
                .partial_cmp(&sq[[i, b]])
                .expect("finite distances")
                .then(a.cmp(&b))
        });
        let mut sigma_sq = sq[[i, order[l - 1]]];
        if sigma_sq == 0.0 {
            sigma_sq = order
                .iter()
                .map(|&j| sq[[i, j]])
                .find(|&d| d > 0.0)
                .unwrap_or(1.0);
        }
        sigma.push(sigma_sq.sqrt());
        for &j in order.iter().take(m) {
            w[[i, j]] = (-sq[[i, j]] / sigma_sq).exp();
        }
    }
    Ok((w, sigma))
}

/// Expands a constraint set into matrices: m_ij = m_ji = 1 per must-link;
/// c_ij = c_ji = 1/n_c per cannot-link, where n_c counts unordered
/// cannot-link pairs. The cannot-link mass is normalized so that
/// Σ_ij c_ij = 2 regardless of how many constraints there are.
pub fn encode_constraints(cs: &ConstraintSet) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = cs.n();
    let n_c = cs.cannot_links().len();
    if n_c == 0 {
        return Err(Error::EmptyCannotLink);
    }
    let mut m = Array2::<f64>::zeros((n, n));
    for &(i, j) in cs.must_links() {
        m[[i, j]] = 1.0;
        m[[j, i]] = 1.0;
    }
    let mut c = Array2::<f64>::zeros((n, n));
    let v = 1.0 / n_c as f64;
    for &(i, j) in cs.cannot_links() {
        c[[i, j]] = v;
        c[[j, i]] = v;
    }
    Ok((m, c))
}

/// Graph Laplacian of an arbitrary square matrix via its symmetrized
/// absolute values: L = D − (|S|+|S|ᵀ)/2 with D the diagonal of that
/// adjacency's row sums. For any embedding H (columns h_i),
/// Tr(H L Hᵀ) = ½·Σ_ij |s_ij|·‖h_i−h_j‖².
pub fn laplacian(s: &DenseMatrix) -> Result<DenseMatrix> {
    let (rows, cols) = s.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        let mut deg = 0.0;
        for j in 0..n {
            let a = 0.5 * (s[[i, j]].abs() + s[[j, i]].abs());
            l[[i, j]] -= a;
            deg += a;
        }
        l[[i, i]] += deg;
    }
    Ok(l)
}

/// Symmetrically normalized Laplacian N = D^(−1/2) L D^(−1/2), with L and D
/// from [`laplacian`]'s symmetrized adjacency. Eigenvalues lie in [0, 2].
pub fn normalized_laplacian(s: &DenseMatrix) -> Result<DenseMatrix> {
    let (rows, cols) = s.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    let mut deg = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            deg[i] += 0.5 * (s[[i, j]].abs() + s[[j, i]].abs());
        }
    }
    if let Some(index) = deg.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegree {
            context: "normalized_laplacian requires every vertex to have an edge",
            index,
        });
    }
    let inv_sqrt: Vec<f64> = deg.iter().map(|d| 1.0 / d.sqrt()).collect();
    let l = laplacian(s)?;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        l[[i, j]] * inv_sqrt[i] * inv_sqrt[j]
    }))
}

/// Fused affinity combining the self-representation magnitudes with the kNN
/// and must-link graphs: W̃ = α₁|Z| + α₂(W + λ_M·M).
///
/// With `normalize` set, each column of |Z| is rescaled by its max entry
/// first, so every point's strongest self-representation edge counts as 1;
/// all-zero columns pass through as zeros.
pub fn fuse_affinity(
    z: &DenseMatrix,
    w: &DenseMatrix,
    m: &DenseMatrix,
    alpha1: f64,
    alpha2: f64,
    lambda_m: f64,
    normalize: bool,
) -> Result<DenseMatrix> {
    let n = z.nrows();
    for (mat, context) in [
        (z, "fuse_affinity Z"),
        (w, "fuse_affinity W"),
        (m, "fuse_affinity M"),
    ] {
        if mat.dim() != (n, n) {
            return Err(Error::ShapeMismatch {
                context,
                expected: (n, n),
                got: mat.dim(),
            });
        }
    }
    for (name, v) in [("alpha1", alpha1), ("alpha2", alpha2), ("lambda_m", lambda_m)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParam {
                name: "fuse_affinity weight",
                why: format!("{name} must be finite and >= 0, got {v}"),
            });
        }
    }

    let mut out = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let scale = if normalize {
            let mx = (0..n).map(|i| z[[i, j]].abs()).fold(0.0, f64::max);
            if mx > 0.0 {
                1.0 / mx
            } else {
                0.0
            }
        } else {
            1.0
        };
        for i in 0..n {
            out[[i, j]] =
                alpha1 * z[[i, j]].abs() * scale + alpha2 * (w[[i, j]] + lambda_m * m[[i, j]]);
        }
    }
    Ok(out)
}

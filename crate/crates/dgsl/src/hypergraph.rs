//! Hypergraph machinery: incidence matrix, the normalized adjacency operator
//! O = D_v^(-1/2) U W_e D_e^(-1) Uᵀ D_v^(-1/2), the hypergraph Laplacian
//! Δ = I − O, and the hybrid affinity W + γ₂·O that feeds the main solver.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// A weighted hypergraph on vertices 0..n. Hyperedges are stored as sorted,
/// deduplicated vertex lists; every weight is positive and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    n_vertices: usize,
    hyperedges: Vec<Vec<usize>>,
    weights: Vec<f64>,
}

impl Hypergraph {
    pub fn new(n_vertices: usize, hyperedges: Vec<Vec<usize>>, weights: Vec<f64>) -> Result<Self> {
        if hyperedges.len() != weights.len() {
            return Err(Error::LengthMismatch {
                left: hyperedges.len(),
                right: weights.len(),
            });
        }
        let mut edges = Vec::with_capacity(hyperedges.len());
        for (e, edge) in hyperedges.into_iter().enumerate() {
            if edge.is_empty() {
                return Err(Error::InvalidParam {
                    name: "hyperedge",
                    why: format!("hyperedge {e} is empty"),
                });
            }
            let mut edge = edge;
            edge.sort_unstable();
            edge.dedup();
            if let Some(&v) = edge.last() {
                if v >= n_vertices {
                    return Err(Error::IndexOutOfRange {
                        context: "hyperedge vertex",
                        index: v,
                        n: n_vertices,
                    });
                }
            }
            edges.push(edge);
        }
        for (e, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParam {
                    name: "hyperedge weight",
                    why: format!("weight of hyperedge {e} must be positive and finite, got {w}"),
                });
            }
        }
        Ok(Self {
            n_vertices,
            hyperedges: edges,
            weights,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted vertex degrees d(v) = Σ_e w(e)·1[v ∈ e].
    fn vertex_degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_vertices];
        for (edge, &w) in self.hyperedges.iter().zip(self.weights.iter()) {
            for &v in edge {
                d[v] += w;
            }
        }
        d
    }
}

/// The n×|E| incidence matrix: U(v,e) = 1 iff vertex v lies in hyperedge e.
pub fn incidence(hg: &Hypergraph) -> DenseMatrix {
    let mut u = Array2::<f64>::zeros((hg.n_vertices, hg.hyperedges.len()));
    for (e, edge) in hg.hyperedges.iter().enumerate() {
        for &v in edge {
            u[[v, e]] = 1.0;
        }
    }
    u
}

/// The normalized adjacency operator O = D_v^(-1/2) U W_e D_e^(-1) Uᵀ D_v^(-1/2),
/// accumulated edge by edge so closed-form cases come out exactly.
pub fn normalized_adjacency(hg: &Hypergraph) -> Result<DenseMatrix> {
    let n = hg.n_vertices;
    let degrees = hg.vertex_degrees();
    if let Some(index) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::ZeroDegree {
            context: "hypergraph vertex",
            index,
        });
    }
    let inv_sqrt_d: Vec<f64> = degrees.iter().map(|&d| 1.0 / d.sqrt()).collect();
    let mut o = Array2::<f64>::zeros((n, n));
    for (edge, &w) in hg.hyperedges.iter().zip(hg.weights.iter()) {
        let scale = w / edge.len() as f64;
        for &u in edge {
            for &v in edge {
                o[[u, v]] += scale * inv_sqrt_d[u] * inv_sqrt_d[v];
            }
        }
    }
    Ok(o)
}

/// The hypergraph Laplacian Δ = I − O; symmetric positive semidefinite with
/// D_v^(1/2)·1 in its nullspace on each connected component.
pub fn hypergraph_laplacian(hg: &Hypergraph) -> Result<DenseMatrix> {
    let mut delta = normalized_adjacency(hg)?;
    delta.map_inplace(|v| *v = -*v);
    for i in 0..hg.n_vertices {
        delta[[i, i]] += 1.0;
    }
    Ok(delta)
}

/// Entrywise W + γ₂·O: swaps the plain kNN affinity for a hypergraph-informed
/// one without touching the rest of the pipeline.
pub fn hybrid_affinity(w: &DenseMatrix, o: &DenseMatrix, gamma2: f64) -> Result<DenseMatrix> {
    if w.dim() != o.dim() {
        return Err(Error::ShapeMismatch {
            context: "hybrid_affinity",
            expected: w.dim(),
            got: o.dim(),
        });
    }
    if !(gamma2.is_finite() && gamma2 >= 0.0) {
        return Err(Error::InvalidParam {
            name: "gamma2",
            why: format!("must be finite and >= 0, got {gamma2}"),
        });
    }
    Ok(w + &(o * gamma2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eig_topk;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn incidence_examples() {
        let hg = Hypergraph::new(3, vec![vec![0, 1, 2]], vec![1.0]).unwrap();
        assert_eq!(incidence(&hg), array![[1.0], [1.0], [1.0]]);

        let hg = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2]], vec![1.0, 1.0]).unwrap();
        assert_eq!(
            incidence(&hg),
            array![[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
        );
    }

    #[test]
    fn single_edge_gives_exact_third() {
        let hg = Hypergraph::new(3, vec![vec![0, 1, 2]], vec![1.0]).unwrap();
        let o = normalized_adjacency(&hg).unwrap();
        for v in o.iter() {
            assert_eq!(*v, 1.0 / 3.0);
        }
        let delta = hypergraph_laplacian(&hg).unwrap();
        let eigs = sym_eig_topk(&delta, 3).unwrap();
        assert!((eigs[0].value - 1.0).abs() < 1e-9);
        assert!((eigs[1].value - 1.0).abs() < 1e-9);
        assert!(eigs[2].value.abs() < 1e-9);
    }

    #[test]
    fn singleton_edge() {
        let hg = Hypergraph::new(1, vec![vec![0]], vec![1.0]).unwrap();
        let o = normalized_adjacency(&hg).unwrap();
        assert_eq!(o[[0, 0]], 1.0);
        let delta = hypergraph_laplacian(&hg).unwrap();
        assert_eq!(delta[[0, 0]], 0.0);
    }

    #[test]
    fn two_edge_hand_oracle() {
        // edges {0,1} w=2 and {1,2,3} w=1: d = (2, 3, 1, 1), δ = (2, 3)
        let hg = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2, 3]], vec![2.0, 1.0]).unwrap();
        let o = normalized_adjacency(&hg).unwrap();
        assert!((o[[0, 0]] - 0.5).abs() < 1e-15);
        assert!((o[[0, 1]] - 1.0 / 6.0_f64.sqrt()).abs() < 1e-15);
        assert!((o[[1, 1]] - (1.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
        assert!((o[[1, 2]] - 1.0 / (3.0 * 3.0_f64.sqrt())).abs() < 1e-15);
        assert!((o[[2, 3]] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(o[[0, 2]], 0.0);
        assert_eq!(o[[0, 3]], 0.0);

        // D^(1/2)·1 lies in the nullspace of Δ
        let delta = hypergraph_laplacian(&hg).unwrap();
        let sqrt_d = array![2.0_f64.sqrt(), 3.0_f64.sqrt(), 1.0, 1.0];
        let residual = delta.dot(&sqrt_d);
        assert!(residual.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn constructor_and_degree_errors() {
        assert!(matches!(
            Hypergraph::new(3, vec![vec![0, 3]], vec![1.0]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![]], vec![1.0]),
            Err(Error::InvalidParam { .. })
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![0]], vec![0.0]),
            Err(Error::InvalidParam { .. })
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![0], vec![1]], vec![1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        // vertex 2 in no edge
        let hg = Hypergraph::new(3, vec![vec![0, 1]], vec![1.0]).unwrap();
        assert!(matches!(
            normalized_adjacency(&hg),
            Err(Error::ZeroDegree { index: 2, .. })
        ));
    }

    #[test]
    fn dedupe_and_sort_edges() {
        let hg = Hypergraph::new(3, vec![vec![2, 1, 1, 0]], vec![1.0]).unwrap();
        assert_eq!(hg.hyperedges()[0], vec![0, 1, 2]);
        // cardinality after dedupe is 3, so the complete-edge case applies
        let o = normalized_adjacency(&hg).unwrap();
        assert_eq!(o[[0, 2]], 1.0 / 3.0);
    }

    #[test]
    fn hybrid_affinity_conventions() {
        let w = array![[0.0, 1.0], [1.0, 0.0]];
        let o = array![[0.5, 0.5], [0.5, 0.5]];
        assert_eq!(hybrid_affinity(&w, &o, 0.0).unwrap(), w);
        let h = hybrid_affinity(&w, &o, 2.0).unwrap();
        assert_eq!(h, array![[1.0, 2.0], [2.0, 1.0]]);
        let bad = Array2::<f64>::zeros((3, 3));
        assert!(matches!(
            hybrid_affinity(&w, &bad, 1.0),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            hybrid_affinity(&w, &o, -1.0),
            Err(Error::InvalidParam { .. })
        ));
    }

    fn random_hypergraph(rng: &mut ChaCha8Rng) -> Hypergraph {
        let n = rng.gen_range(2..12);
        let n_edges = rng.gen_range(1..6);
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut weights = Vec::new();
        let mut covered = vec![false; n];
        for _ in 0..n_edges {
            let size = rng.gen_range(1..=n);
            let mut edge: Vec<usize> = (0..size).map(|_| rng.gen_range(0..n)).collect();
            edge.sort_unstable();
            edge.dedup();
            for &v in &edge {
                covered[v] = true;
            }
            edges.push(edge);
            weights.push(rng.gen_range(0.1..3.0));
        }
        for (v, c) in covered.into_iter().enumerate() {
            if !c {
                edges.push(vec![v]);
                weights.push(rng.gen_range(0.1..3.0));
            }
        }
        Hypergraph::new(n, edges, weights).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        // Δ is symmetric PSD with spectrum in [0, 1+ε] and D^(1/2)·1 in its nullspace
        #[test]
        fn laplacian_is_psd(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let hg = random_hypergraph(&mut rng);
            let n = hg.n_vertices();
            let delta = hypergraph_laplacian(&hg).unwrap();
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((delta[[i, j]] - delta[[j, i]]).abs() < 1e-14);
                }
            }
            let eigs = sym_eig_topk(&delta, n).unwrap();
            prop_assert!(eigs.last().unwrap().value > -1e-9);
            prop_assert!(eigs[0].value < 1.0 + 1e-9);

            let degrees: Vec<f64> = {
                let mut d = vec![0.0; n];
                for (edge, &w) in hg.hyperedges().iter().zip(hg.weights()) {
                    for &v in edge {
                        d[v] += w;
                    }
                }
                d
            };
            let sqrt_d = ndarray::Array1::from_iter(degrees.iter().map(|d| d.sqrt()));
            let residual = delta.dot(&sqrt_d);
            let scale = sqrt_d.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(residual.iter().all(|v| v.abs() < 1e-9 * scale.max(1.0)));
        }

        // incidence column sums recount hyperedge cardinalities
        #[test]
        fn incidence_column_sums(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let hg = random_hypergraph(&mut rng);
            let u = incidence(&hg);
            for (e, edge) in hg.hyperedges().iter().enumerate() {
                let sum: f64 = u.column(e).sum();
                prop_assert_eq!(sum as usize, edge.len());
            }
        }
    }
}

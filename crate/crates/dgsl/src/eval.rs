//! Evaluation pipeline: column normalization, seeded K-means, clustering
//! accuracy by optimal cluster-to-class assignment, normalized mutual
//! information, and the seeded constraint-generation protocols.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::ConstraintSet;
use crate::linalg::DenseMatrix;

/// Clustering metrics for one evaluated trial.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub acc: f64,
    pub nmi: f64,
    pub seed: u64,
}

/// Rescales every column to unit Euclidean norm; columns below 1e-12 in norm
/// are returned as zeros rather than blown up.
pub fn normalize_columns(h: &DenseMatrix) -> DenseMatrix {
    let (k, n) = h.dim();
    let mut out = Array2::<f64>::zeros((k, n));
    for j in 0..n {
        let norm = (0..k).map(|i| h[[i, j]] * h[[i, j]]).sum::<f64>().sqrt();
        if norm >= 1e-12 {
            for i in 0..k {
                out[[i, j]] = h[[i, j]] / norm;
            }
        }
    }
    out
}

fn col_dist_sq(p: &DenseMatrix, j: usize, center: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, c) in center.iter().enumerate() {
        let d = p[[i, j]] - c;
        s += d * d;
    }
    s
}

struct LloydRun {
    labels: Vec<usize>,
    sse: f64,
}

fn lloyd_once(p: &DenseMatrix, k: usize, rng: &mut ChaCha8Rng) -> LloydRun {
    let (d, n) = p.dim();

    // k-means++ seeding; when every remaining point coincides with a chosen
    // center the weighted draw degenerates and we fall back to the first
    // unchosen index.
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    chosen.push(first);
    let mut d2: Vec<f64> = (0..n)
        .map(|j| {
            let c: Vec<f64> = (0..d).map(|i| p[[i, first]]).collect();
            col_dist_sq(p, j, &c)
        })
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let r = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (j, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > r {
                    pick = j;
                    break;
                }
            }
            pick
        } else {
            (0..n)
                .find(|j| !chosen.contains(j))
                .expect("k <= n guarantees an unchosen point")
        };
        chosen.push(next);
        for j in 0..n {
            let c: Vec<f64> = (0..d).map(|i| p[[i, next]]).collect();
            d2[j] = d2[j].min(col_dist_sq(p, j, &c));
        }
    }

    let mut centers: Vec<Vec<f64>> = chosen
        .iter()
        .map(|&j| (0..d).map(|i| p[[i, j]]).collect())
        .collect();
    let mut labels = vec![0usize; n];
    for _ in 0..300 {
        let mut changed = false;
        for j in 0..n {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let dist = col_dist_sq(p, j, center);
                if dist < best_d {
                    best_d = dist;
                    best = c;
                }
            }
            if labels[j] != best {
                labels[j] = best;
                changed = true;
            }
        }

        let mut sums = vec![vec![0.0; d]; k];
        let mut counts = vec![0usize; k];
        for j in 0..n {
            counts[labels[j]] += 1;
            for i in 0..d {
                sums[labels[j]][i] += p[[i, j]];
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                for i in 0..d {
                    centers[c][i] = sums[c][i] / counts[c] as f64;
                }
            } else {
                // revive an empty cluster at the point farthest from its center
                let far = (0..n)
                    .max_by(|&a, &b| {
                        col_dist_sq(p, a, &centers[labels[a]])
                            .partial_cmp(&col_dist_sq(p, b, &centers[labels[b]]))
                            .expect("finite distances")
                            .then(b.cmp(&a))
                    })
                    .expect("n >= 1");
                centers[c] = (0..d).map(|i| p[[i, far]]).collect();
                labels[far] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let sse = (0..n).map(|j| col_dist_sq(p, j, &centers[labels[j]])).sum();
    LloydRun { labels, sse }
}

/// Lloyd's K-means over the columns of `p` with k-means++ seeding, keeping
/// the best of `restarts` runs by within-cluster sum of squares.
/// Deterministic for a fixed seed.
pub fn kmeans(p: &DenseMatrix, k: usize, restarts: usize, seed: u64) -> Result<Vec<usize>> {
    let n = p.ncols();
    if k == 0 || restarts == 0 {
        return Err(Error::InvalidParam {
            name: "kmeans",
            why: format!("k={k}, restarts={restarts}: both must be positive"),
        });
    }
    if n < k {
        return Err(Error::TooFewPoints {
            what: "kmeans",
            needed: k,
            n,
        });
    }
    if !p.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("kmeans input"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<LloydRun> = None;
    for _ in 0..restarts {
        let run = lloyd_once(p, k, &mut rng);
        if best.as_ref().map_or(true, |b| run.sse < b.sse) {
            best = Some(run);
        }
    }
    Ok(best.expect("restarts >= 1").labels)
}

/// Maximum-weight perfect assignment on a square weight matrix via the O(k³)
/// potentials (Hungarian) method. Weights are nonnegative counts.
fn max_assignment(weights: &[Vec<i64>]) -> i64 {
    let k = weights.len();
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut matched = vec![0usize; k + 1]; // matched[j] = row assigned to column j, 1-based
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        matched[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=k {
                if !used[j] {
                    let cur = -weights[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=k).map(|j| weights[matched[j] - 1][j - 1]).sum()
}

fn check_labelings(pred: &[usize], truth: &[usize]) -> Result<usize> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::TooFewPoints {
            what: "labeling metrics",
            needed: 1,
            n: 0,
        });
    }
    let k = pred
        .iter()
        .chain(truth.iter())
        .map(|&v| v + 1)
        .max()
        .unwrap_or(1);
    Ok(k)
}

/// Clustering accuracy: the fraction of points matched under the best
/// one-to-one assignment of predicted clusters to true classes.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let k = check_labelings(pred, truth)?;
    let mut confusion = vec![vec![0i64; k]; k];
    for (&p, &t) in pred.iter().zip(truth.iter()) {
        confusion[p][t] += 1;
    }
    Ok(max_assignment(&confusion) as f64 / pred.len() as f64)
}

/// Normalized mutual information I(pred;truth)/sqrt(H(pred)·H(truth)), with
/// the 0/0 case (either partition constant) defined as 0.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let k = check_labelings(pred, truth)?;
    let n = pred.len() as f64;
    let mut joint = vec![vec![0u64; k]; k];
    let mut row = vec![0u64; k];
    let mut col = vec![0u64; k];
    for (&p, &t) in pred.iter().zip(truth.iter()) {
        joint[p][t] += 1;
        row[p] += 1;
        col[t] += 1;
    }
    let mut info = 0.0;
    for p in 0..k {
        for t in 0..k {
            let nij = joint[p][t];
            if nij > 0 {
                let nij = nij as f64;
                info += nij / n * ((n * nij) / (row[p] as f64 * col[t] as f64)).ln();
            }
        }
    }
    let entropy = |counts: &[u64]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| c as f64 / n * (n / c as f64).ln())
            .sum()
    };
    let hp = entropy(&row);
    let ht = entropy(&col);
    if hp == 0.0 || ht == 0.0 {
        return Ok(0.0);
    }
    Ok((info / (hp * ht).sqrt()).clamp(0.0, 1.0))
}

fn distinct_classes(truth: &[usize]) -> Vec<usize> {
    let mut classes: Vec<usize> = truth.to_vec();
    classes.sort_unstable();
    classes.dedup();
    classes
}

/// Stable per-class stream so that generating constraints for a subset of
/// classes draws exactly what the full run would draw for those classes.
fn class_rng(seed: u64, class: usize) -> ChaCha8Rng {
    let mixed = seed
        ^ (class as u64)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0xD1B5_4A32_D192_ED03);
    ChaCha8Rng::seed_from_u64(mixed)
}

fn partial_shuffle_take<T: Copy>(items: &mut [T], take: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let take = take.min(items.len());
    for i in 0..take {
        let j = rng.gen_range(i..items.len());
        items.swap(i, j);
    }
    items[..take].to_vec()
}

fn constraints_for_classes(
    truth: &[usize],
    f: usize,
    classes: &[usize],
    seed: u64,
) -> Result<ConstraintSet> {
    if f == 0 {
        return Err(Error::InvalidParam {
            name: "f",
            why: "must select at least one point per class".into(),
        });
    }
    if classes.len() < 2 {
        return Err(Error::TooFewClasses {
            found: classes.len(),
            needed: 2,
        });
    }
    let mut chosen_per_class: Vec<Vec<usize>> = Vec::with_capacity(classes.len());
    for &c in classes {
        let mut members: Vec<usize> = truth
            .iter()
            .enumerate()
            .filter(|(_, &t)| t == c)
            .map(|(i, _)| i)
            .collect();
        if members.len() < f {
            return Err(Error::ClassTooSmall {
                class: c,
                size: members.len(),
                needed: f,
            });
        }
        let mut rng = class_rng(seed, c);
        let mut picks = partial_shuffle_take(&mut members, f, &mut rng);
        picks.sort_unstable();
        chosen_per_class.push(picks);
    }
    let mut must = Vec::new();
    let mut cannot = Vec::new();
    for (a, picks_a) in chosen_per_class.iter().enumerate() {
        for (x, &i) in picks_a.iter().enumerate() {
            for &j in picks_a.iter().skip(x + 1) {
                must.push((i, j));
            }
        }
        for picks_b in chosen_per_class.iter().skip(a + 1) {
            for &i in picks_a {
                for &j in picks_b {
                    cannot.push((i, j));
                }
            }
        }
    }
    ConstraintSet::new(truth.len(), must, cannot)
}

/// Labeled-subset protocol: pick f points per class; must-links are all
/// within-class pairs among the picks, cannot-links all cross-class pairs.
pub fn gen_constraints_setting1(truth: &[usize], f: usize, seed: u64) -> Result<ConstraintSet> {
    let classes = distinct_classes(truth);
    constraints_for_classes(truth, f, &classes, seed)
}

/// Pair-sampling protocol: draw n_ml distinct same-class pairs and
/// round(cl_ratio·n_ml) distinct cross-class pairs, without replacement.
pub fn gen_constraints_setting2(
    truth: &[usize],
    n_ml: usize,
    cl_ratio: f64,
    seed: u64,
) -> Result<ConstraintSet> {
    if !(cl_ratio.is_finite() && cl_ratio >= 0.0) {
        return Err(Error::InvalidParam {
            name: "cl_ratio",
            why: format!("must be finite and >= 0, got {cl_ratio}"),
        });
    }
    let n = truth.len();
    let mut same = Vec::new();
    let mut cross = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if truth[i] == truth[j] {
                same.push((i, j));
            } else {
                cross.push((i, j));
            }
        }
    }
    let n_cl = (cl_ratio * n_ml as f64).round() as usize;
    if n_ml > same.len() {
        return Err(Error::NotEnoughPairs {
            kind: "must-link",
            requested: n_ml,
            available: same.len(),
        });
    }
    if n_cl > cross.len() {
        return Err(Error::NotEnoughPairs {
            kind: "cannot-link",
            requested: n_cl,
            available: cross.len(),
        });
    }
    if n_cl == 0 {
        return Err(Error::EmptyCannotLink);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ml = partial_shuffle_take(&mut same, n_ml, &mut rng);
    let cl = partial_shuffle_take(&mut cross, n_cl, &mut rng);
    ConstraintSet::new(n, ml, cl)
}

/// Partial-supervision protocol: select round(class_fraction·k) classes, then
/// run the labeled-subset protocol inside them only. With class_fraction = 1
/// this reproduces [`gen_constraints_setting1`] exactly, including the draws.
pub fn gen_constraints_incomplete(
    truth: &[usize],
    f: usize,
    class_fraction: f64,
    seed: u64,
) -> Result<ConstraintSet> {
    if !(class_fraction.is_finite() && class_fraction > 0.0 && class_fraction <= 1.0) {
        return Err(Error::InvalidParam {
            name: "class_fraction",
            why: format!("must lie in (0, 1], got {class_fraction}"),
        });
    }
    let classes = distinct_classes(truth);
    let k0 = (class_fraction * classes.len() as f64).round() as usize;
    let chosen = if k0 >= classes.len() {
        classes
    } else {
        let mut pool = classes;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picks = partial_shuffle_take(&mut pool, k0, &mut rng);
        picks.sort_unstable();
        picks
    };
    constraints_for_classes(truth, f, &chosen, seed)
}

//! Test support: an independent brute-force oracle for the SVM dual, a
//! KKT audit, and synthetic dataset generators.
//!
//! Everything here recomputes kernels and decision values from dense
//! expansions on purpose — none of it goes through the solver's own
//! code paths, so it can serve as an independent check on them.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, LabeledSample};
use crate::kernel::KernelSpec;
use crate::sparse::SparseVector;
use crate::svm::SvmModel;

/// Dense kernel evaluation, independent of [`SparseVector::dot`].
pub fn dense_kernel(kernel: KernelSpec, a: &[f64], b: &[f64]) -> f64 {
    match kernel {
        KernelSpec::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        KernelSpec::Rbf { gamma } => {
            let dist_sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            (-gamma * dist_sq).exp()
        }
    }
}

/// The dual objective W(alpha) = sum(alpha) - 1/2 sum_ij a_i a_j y_i y_j K_ij.
pub fn dual_objective(gram: &[Vec<f64>], labels: &[f64], alphas: &[f64]) -> f64 {
    let n = alphas.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alphas[i] * alphas[j] * labels[i] * labels[j] * gram[i][j];
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

/// Kernel matrix from dense sample expansions.
pub fn dense_gram(kernel: KernelSpec, points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| points.iter().map(|b| dense_kernel(kernel, a, b)).collect())
        .collect()
}

/// Projects `v` onto the dual feasible set {0 <= a <= c, y . a = 0} by
/// bisecting on the multiplier of the equality constraint.
fn project_feasible(v: &[f64], labels: &[f64], c: f64) -> Vec<f64> {
    let clip = |lambda: f64| -> Vec<f64> {
        v.iter()
            .zip(labels)
            .map(|(&vi, &yi)| (vi - lambda * yi).clamp(0.0, c))
            .collect()
    };
    let balance = |alpha: &[f64]| -> f64 {
        alpha.iter().zip(labels).map(|(&a, &y)| a * y).sum()
    };
    // balance(clip(lambda)) is non-increasing in lambda.
    let bound = c + v.iter().fold(0.0f64, |m, &x| m.max(x.abs())) + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if balance(&clip(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    clip(0.5 * (lo + hi))
}

/// Maximizes the dual by projected gradient ascent. Slow and simple by
/// design: it shares no code with the production solver.
pub fn maximize_dual(
    gram: &[Vec<f64>],
    labels: &[f64],
    c: f64,
    iterations: usize,
) -> (Vec<f64>, f64) {
    let n = labels.len();
    // Safe step size: 1 over an upper bound on the Hessian spectral norm.
    let row_norm = (0..n)
        .map(|i| (0..n).map(|j| gram[i][j].abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let step = 1.0 / row_norm.max(1e-9);

    let mut alphas = vec![0.0; n];
    for _ in 0..iterations {
        let gradient: Vec<f64> = (0..n)
            .map(|i| {
                let mut g = 1.0;
                for j in 0..n {
                    g -= labels[i] * labels[j] * gram[i][j] * alphas[j];
                }
                g
            })
            .collect();
        let moved: Vec<f64> = alphas
            .iter()
            .zip(&gradient)
            .map(|(&a, &g)| a + step * g)
            .collect();
        alphas = project_feasible(&moved, labels, c);
    }
    let objective = dual_objective(gram, labels, &alphas);
    (alphas, objective)
}

/// Dense decision values for every sample of `data` under `model`,
/// computed without the model's own kernel path.
pub fn dense_decision_values(model: &SvmModel, data: &Dataset) -> Vec<f64> {
    let expand = |v: &SparseVector| v.to_dense();
    let svs: Vec<(Vec<f64>, f64, f64)> = model
        .support_samples()
        .iter()
        .zip(model.alphas())
        .map(|(s, &a)| (expand(&s.features), f64::from(s.label), a))
        .collect();
    data.iter()
        .map(|sample| {
            let x = expand(&sample.features);
            let mut f = model.bias();
            for (sv, y, a) in &svs {
                f += a * y * dense_kernel(model.kernel(), sv, &x);
            }
            f
        })
        .collect()
}

/// Checks the per-sample KKT conditions of `model` on its training data at
/// tolerance `tol`. Returns one description per violation.
pub fn kkt_violations(model: &SvmModel, data: &Dataset, tol: f64) -> Vec<String> {
    let alpha_by_id: std::collections::BTreeMap<u64, f64> = model
        .support_samples()
        .iter()
        .zip(model.alphas())
        .map(|(s, &a)| (s.id, a))
        .collect();
    let values = dense_decision_values(model, data);
    let c = model.c();
    let mut violations = Vec::new();
    for (sample, &f) in data.iter().zip(&values) {
        let alpha = alpha_by_id.get(&sample.id).copied().unwrap_or(0.0);
        let margin = f64::from(sample.label) * f;
        let ok = if alpha <= 0.0 {
            margin >= 1.0 - tol
        } else if alpha < c * (1.0 - 1e-9) {
            (margin - 1.0).abs() <= tol
        } else {
            margin <= 1.0 + tol
        };
        if !ok {
            violations.push(format!(
                "sample {}: alpha={alpha:.6}, y*f={margin:.6}, c={c}",
                sample.id
            ));
        }
    }
    violations
}

/// Sum of alpha_i * y_i over the support vectors (should vanish).
pub fn dual_balance(model: &SvmModel) -> f64 {
    model
        .support_samples()
        .iter()
        .zip(model.alphas())
        .map(|(s, &a)| a * f64::from(s.label))
        .sum()
}

fn to_sparse(dimension: usize, dense: &[f64]) -> SparseVector {
    let entries = dense
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v != 0.0)
        .map(|(i, &v)| (i, v));
    SparseVector::new(dimension, entries).expect("generated entries are finite")
}

/// Builds a dataset from dense rows and labels, ids in row order.
pub fn dataset_from_dense(rows: &[Vec<f64>], labels: &[i32]) -> Dataset {
    let dimension = rows.first().map(Vec::len).unwrap_or(0);
    let samples = rows
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(id, (row, &label))| {
            LabeledSample::new(id as u64, to_sparse(dimension, row), label)
        })
        .collect();
    Dataset::new(dimension, samples).expect("generated rows share dimension")
}

/// A tiny random binary dataset (for the brute-force oracle): up to
/// `max_samples` points in up to `max_dim` dimensions, both classes
/// guaranteed present.
pub fn tiny_random_dataset(seed: u64, max_samples: usize, max_dim: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_samples.max(2));
    let dim = rng.random_range(1..=max_dim.max(1));
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
        // Force one sample of each class, then follow a latent separator
        // with occasional flips so some sets are non-separable.
        let label = if i == 0 {
            -1
        } else if i == 1 {
            1
        } else {
            let score: f64 = row.iter().sum();
            let noisy = rng.random_range(0.0..1.0) < 0.25;
            if (score >= 0.0) ^ noisy {
                1
            } else {
                -1
            }
        };
        rows.push(row);
        labels.push(label);
    }
    dataset_from_dense(&rows, &labels)
}

/// Two Gaussian-ish blobs in `dim` dimensions separated along a random
/// unit direction; `margin` scales the separation, `noise_rate` flips
/// that share of labels.
pub fn blob_dataset(
    seed: u64,
    n: usize,
    dim: usize,
    margin: f64,
    noise_rate: f64,
) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direction: Vec<f64> = {
        let raw: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
        raw.into_iter().map(|x| x / norm).collect()
    };
    let mut pairs: Vec<(Vec<f64>, i32)> = Vec::with_capacity(n);
    for i in 0..n {
        let label = if i % 2 == 0 { 1 } else { -1 };
        let offset = f64::from(label) * margin;
        let row: Vec<f64> = direction
            .iter()
            .map(|&d| d * offset + rng.random_range(-1.0..1.0))
            .collect();
        let flipped = rng.random_range(0.0..1.0) < noise_rate;
        pairs.push((row, if flipped { -label } else { label }));
    }
    // Shuffle so the class pattern is not aligned with sample position.
    use rand::seq::SliceRandom;
    pairs.shuffle(&mut rng);
    let (rows, labels): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    dataset_from_dense(&rows, &labels)
}

/// Three well-separated 2-D blobs labeled -1, 0, +1.
pub fn three_blob_dataset(seed: u64, per_class: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = [(-8.0, -8.0, -1), (8.0, -8.0, 0), (0.0, 8.0, 1)];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for &(cx, cy, label) in &centers {
        for _ in 0..per_class {
            rows.push(vec![
                cx + rng.random_range(-1.0..1.0),
                cy + rng.random_range(-1.0..1.0),
            ]);
            labels.push(label);
        }
    }
    dataset_from_dense(&rows, &labels)
}

/// Dense expansion of every sample plus labels as f64, oracle-side inputs.
pub fn dense_view(data: &Dataset) -> (Vec<Vec<f64>>, Vec<f64>) {
    let rows = data.iter().map(|s| s.features.to_dense()).collect();
    let labels = data.iter().map(|s| f64::from(s.label)).collect();
    (rows, labels)
}

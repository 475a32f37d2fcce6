//! Sequential minimal optimization for the soft-margin dual.
//!
//! Two-multiplier working sets: the first multiplier is any sample whose
//! KKT conditions are violated, the second is chosen to maximize |E1 - E2|,
//! falling back to a deterministic rotation when that pair cannot move.
//! Convergence is declared after `max_passes` consecutive full sweeps
//! without a multiplier change.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::error::CoreError;
use crate::kernel::KernelSpec;
use crate::svm::{SolverConfig, SvmModel};

/// Absolute ceiling on full sweeps so training always terminates.
const MAX_SWEEPS: usize = 100_000;

/// Largest sample count for which the full kernel matrix is precomputed.
const GRAM_CACHE_LIMIT: usize = 2048;

/// Minimum relative step for the second multiplier, as in Platt's pseudocode.
const STEP_EPS: f64 = 1e-12;

struct Solver<'a> {
    data: &'a Dataset,
    labels: Vec<f64>,
    kernel: KernelSpec,
    c: f64,
    /// Internal tolerance; half the configured one, so that the final
    /// bias averaging keeps every sample within the configured tolerance.
    tol: f64,
    alphas: Vec<f64>,
    bias: f64,
    /// Error cache: E_i = f(x_i) - y_i, maintained incrementally.
    errors: Vec<f64>,
    gram: Option<Vec<f64>>,
    diag: Vec<f64>,
}

impl<'a> Solver<'a> {
    fn new(data: &'a Dataset, config: &SolverConfig) -> Result<Self, CoreError> {
        let n = data.len();
        let labels: Vec<f64> = data.iter().map(|s| f64::from(s.label)).collect();
        let gram = if n <= GRAM_CACHE_LIMIT {
            let mut matrix = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let value = config
                        .kernel
                        .eval(&data.samples()[i].features, &data.samples()[j].features)?;
                    matrix[i * n + j] = value;
                    matrix[j * n + i] = value;
                }
            }
            Some(matrix)
        } else {
            None
        };
        let mut diag = vec![0.0; n];
        for (i, value) in diag.iter_mut().enumerate() {
            *value = match &gram {
                Some(matrix) => matrix[i * n + i],
                None => config
                    .kernel
                    .eval(&data.samples()[i].features, &data.samples()[i].features)?,
            };
        }
        // All alphas start at zero, so f(x) = 0 and E_i = -y_i.
        let errors = labels.iter().map(|y| -y).collect();
        Ok(Self {
            data,
            labels,
            kernel: config.kernel,
            c: config.c,
            tol: config.kkt_tolerance / 2.0,
            alphas: vec![0.0; n],
            bias: 0.0,
            errors,
            gram,
            diag,
        })
    }

    fn k(&self, i: usize, j: usize) -> f64 {
        match &self.gram {
            Some(matrix) => matrix[i * self.data.len() + j],
            None => self
                .kernel
                .eval(
                    &self.data.samples()[i].features,
                    &self.data.samples()[j].features,
                )
                .expect("dataset dimensions verified at construction"),
        }
    }

    fn violates_kkt(&self, i: usize) -> bool {
        let r = self.errors[i] * self.labels[i];
        (r < -self.tol && self.alphas[i] < self.c) || (r > self.tol && self.alphas[i] > 0.0)
    }

    /// Attempts one joint step on the pair (i, j). Returns whether the
    /// multipliers actually moved.
    fn take_step(&mut self, i: usize, j: usize) -> bool {
        if i == j {
            return false;
        }
        let (y_i, y_j) = (self.labels[i], self.labels[j]);
        let (alpha_i, alpha_j) = (self.alphas[i], self.alphas[j]);
        let (e_i, e_j) = (self.errors[i], self.errors[j]);
        let s = y_i * y_j;

        let (low, high) = if (y_i - y_j).abs() > 0.5 {
            (
                (alpha_j - alpha_i).max(0.0),
                (self.c + alpha_j - alpha_i).min(self.c),
            )
        } else {
            (
                (alpha_i + alpha_j - self.c).max(0.0),
                (alpha_i + alpha_j).min(self.c),
            )
        };
        if low >= high {
            return false;
        }

        let k_ii = self.diag[i];
        let k_jj = self.diag[j];
        let k_ij = self.k(i, j);
        let eta = 2.0 * k_ij - k_ii - k_jj;
        if eta >= 0.0 {
            // Flat or concave-up directions only arise from coincident
            // points; another partner will make progress instead.
            return false;
        }

        let mut alpha_j_new = (alpha_j - y_j * (e_i - e_j) / eta).clamp(low, high);
        // Snap the clipped multiplier to the exact bound so support-vector
        // extraction sees clean zeros and Cs.
        let snap = 1e-8 * self.c.max(1.0);
        if alpha_j_new < snap {
            alpha_j_new = 0.0;
        } else if alpha_j_new > self.c - snap {
            alpha_j_new = self.c;
        }
        if (alpha_j_new - alpha_j).abs() < STEP_EPS * (alpha_j_new + alpha_j + STEP_EPS) {
            return false;
        }
        // The equality constraint fixes alpha_i once alpha_j moves; the
        // clamp only strips float residue, the exact value is in range.
        let alpha_i_new = (alpha_i + s * (alpha_j - alpha_j_new)).clamp(0.0, self.c);

        let delta_i = alpha_i_new - alpha_i;
        let delta_j = alpha_j_new - alpha_j;
        let b1 = self.bias - e_i - y_i * delta_i * k_ii - y_j * delta_j * k_ij;
        let b2 = self.bias - e_j - y_i * delta_i * k_ij - y_j * delta_j * k_jj;
        let bias_new = if alpha_i_new > 0.0 && alpha_i_new < self.c {
            b1
        } else if alpha_j_new > 0.0 && alpha_j_new < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };

        let delta_b = bias_new - self.bias;
        for k in 0..self.data.len() {
            self.errors[k] += y_i * delta_i * self.k(i, k) + y_j * delta_j * self.k(j, k) + delta_b;
        }
        self.alphas[i] = alpha_i_new;
        self.alphas[j] = alpha_j_new;
        self.bias = bias_new;
        true
    }

    /// Examines sample `i`; if it violates KKT, tries the |E1 - E2|
    /// maximizer first and then every other partner in rotation.
    fn examine(&mut self, i: usize) -> bool {
        if !self.violates_kkt(i) {
            return false;
        }
        let e_i = self.errors[i];
        let mut best = None;
        let mut best_gap = -1.0;
        for j in 0..self.data.len() {
            if j == i {
                continue;
            }
            let gap = (e_i - self.errors[j]).abs();
            if gap > best_gap {
                best_gap = gap;
                best = Some(j);
            }
        }
        if let Some(j) = best {
            if self.take_step(i, j) {
                return true;
            }
        }
        for offset in 1..self.data.len() {
            let j = (i + offset) % self.data.len();
            if Some(j) == best {
                continue;
            }
            if self.take_step(i, j) {
                return true;
            }
        }
        false
    }

    /// Bias chosen to center the margin: averaged over unbounded support
    /// vectors. When every coefficient sits at a bound, the bias is only
    /// constrained to an interval, so take that interval's midpoint
    /// (derived from all samples, not just support vectors).
    fn averaged_bias(&self, support: &[usize]) -> f64 {
        let biasless = |i: usize| {
            let mut f = 0.0;
            for &j in support {
                f += self.alphas[j] * self.labels[j] * self.k(j, i);
            }
            f
        };
        let bound_cut = self.c * (1.0 - 1e-9);
        let margin: Vec<usize> = support
            .iter()
            .copied()
            .filter(|&i| self.alphas[i] < bound_cut)
            .collect();
        if !margin.is_empty() {
            return margin
                .iter()
                .map(|&i| self.labels[i] - biasless(i))
                .sum::<f64>()
                / margin.len() as f64;
        }
        // y_i (f0(x_i) + b) >= 1 for alpha = 0 and <= 1 for alpha = C
        // bracket b; any value between the tightest bounds is optimal.
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for i in 0..self.data.len() {
            let pinned = self.labels[i] - biasless(i);
            let at_bound = self.alphas[i] >= bound_cut;
            let positive = self.labels[i] > 0.0;
            if at_bound == positive {
                upper = upper.min(pinned);
            } else {
                lower = lower.max(pinned);
            }
        }
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => 0.5 * (lower + upper),
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => self.bias,
        }
    }
}

pub(super) fn solve(data: &Dataset, config: &SolverConfig) -> Result<SvmModel, CoreError> {
    let mut solver = Solver::new(data, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();

    let mut quiet_sweeps = 0;
    let mut sweeps = 0;
    while quiet_sweeps < config.max_passes && sweeps < MAX_SWEEPS {
        order.shuffle(&mut rng);
        let mut changed = 0usize;
        for &i in &order {
            if solver.examine(i) {
                changed += 1;
            }
        }
        if changed == 0 {
            quiet_sweeps += 1;
        } else {
            quiet_sweeps = 0;
        }
        sweeps += 1;
    }

    // Support vectors are the samples whose coefficient stayed positive;
    // tiny residues from floating-point updates count as zero.
    let zero_cut = 1e-10 * config.c.max(1.0);
    let support: Vec<usize> = (0..data.len())
        .filter(|&i| solver.alphas[i] > zero_cut)
        .collect();
    let bias = solver.averaged_bias(&support);

    let support_samples = support
        .iter()
        .map(|&i| data.samples()[i].clone())
        .collect();
    let alphas = support.iter().map(|&i| solver.alphas[i]).collect();
    SvmModel::new(
        support_samples,
        alphas,
        bias,
        config.kernel,
        config.c,
        data.dimension(),
    )
}

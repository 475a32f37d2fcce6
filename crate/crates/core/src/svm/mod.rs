//! Soft-margin binary SVM: model representation, training entry point,
//! prediction, and empirical risk.

mod smo;

use crate::data::{Dataset, LabeledSample};
use crate::error::CoreError;
use crate::kernel::KernelSpec;
use crate::sparse::SparseVector;

/// Loss function used when computing empirical risk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// 1 when the predicted label differs from the actual label, else 0.
    ZeroOne,
    /// max(0, 1 - y * f(x)).
    Hinge,
}

/// Training parameters for the binary solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Slack penalty of the soft-margin objective.
    pub c: f64,
    pub kernel: KernelSpec,
    /// Per-sample optimality tolerance; also bounds the final bias spread.
    pub kkt_tolerance: f64,
    /// Consecutive full sweeps without a multiplier change before the
    /// solver declares convergence.
    pub max_passes: usize,
    /// Drives the sweep-order shuffle; fixed seed means identical models.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            kernel: KernelSpec::Linear,
            kkt_tolerance: 1e-3,
            max_passes: 10,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(CoreError::InvalidConfig(format!(
                "c must be a positive finite number, got {}",
                self.c
            )));
        }
        if !(self.kkt_tolerance.is_finite() && self.kkt_tolerance > 0.0) {
            return Err(CoreError::InvalidConfig(format!(
                "kkt_tolerance must be a positive finite number, got {}",
                self.kkt_tolerance
            )));
        }
        if self.max_passes == 0 {
            return Err(CoreError::InvalidConfig(
                "max_passes must be at least 1".into(),
            ));
        }
        self.kernel.validate()
    }
}

/// A trained binary classifier: support vectors with their dual
/// coefficients, a bias term, and the kernel it was trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    support_samples: Vec<LabeledSample>,
    alphas: Vec<f64>,
    bias: f64,
    kernel: KernelSpec,
    c: f64,
    dimension: usize,
}

impl SvmModel {
    /// Builds a model from its parts, enforcing the coefficient invariants
    /// (alignment, 0 < alpha <= c, shared dimension).
    pub fn new(
        support_samples: Vec<LabeledSample>,
        alphas: Vec<f64>,
        bias: f64,
        kernel: KernelSpec,
        c: f64,
        dimension: usize,
    ) -> Result<Self, CoreError> {
        if support_samples.len() != alphas.len() {
            return Err(CoreError::LengthMismatch(format!(
                "{} support vectors vs {} coefficients",
                support_samples.len(),
                alphas.len()
            )));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(CoreError::InvalidConfig(format!(
                "c must be a positive finite number, got {c}"
            )));
        }
        if !bias.is_finite() {
            return Err(CoreError::InvalidConfig(format!("bias must be finite, got {bias}")));
        }
        kernel.validate()?;
        for (sample, &alpha) in support_samples.iter().zip(&alphas) {
            if !(alpha.is_finite() && alpha > 0.0 && alpha <= c) {
                return Err(CoreError::InvalidConfig(format!(
                    "coefficient {alpha} for sample {} outside (0, {c}]",
                    sample.id
                )));
            }
            if sample.features.dimension() != dimension {
                return Err(CoreError::DimensionMismatch {
                    left: sample.features.dimension(),
                    right: dimension,
                });
            }
        }
        Ok(Self {
            support_samples,
            alphas,
            bias,
            kernel,
            c,
            dimension,
        })
    }

    pub fn support_samples(&self) -> &[LabeledSample] {
        &self.support_samples
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn num_support_vectors(&self) -> usize {
        self.support_samples.len()
    }

    /// Ids of the support vectors, ascending.
    pub fn support_ids(&self) -> std::collections::BTreeSet<u64> {
        self.support_samples.iter().map(|s| s.id).collect()
    }

    /// The decision function f(x) = sum_i alpha_i y_i K(s_i, x) + bias.
    pub fn decision_value(&self, x: &SparseVector) -> Result<f64, CoreError> {
        if x.dimension() != self.dimension {
            return Err(CoreError::DimensionMismatch {
                left: x.dimension(),
                right: self.dimension,
            });
        }
        let mut sum = self.bias;
        for (sample, &alpha) in self.support_samples.iter().zip(&self.alphas) {
            sum += alpha * f64::from(sample.label) * self.kernel.eval(&sample.features, x)?;
        }
        Ok(sum)
    }

    /// sign(f(x)) with ties (exactly zero) resolving to +1.
    pub fn predict(&self, x: &SparseVector) -> Result<i32, CoreError> {
        Ok(if self.decision_value(x)? >= 0.0 { 1 } else { -1 })
    }

    /// Re-embeds the support vectors in a wider feature space. Exact for
    /// both kernels since absent trailing features are zero.
    pub fn with_dimension(&self, dimension: usize) -> Result<Self, CoreError> {
        let support_samples = self
            .support_samples
            .iter()
            .map(|s| {
                Ok(LabeledSample::new(
                    s.id,
                    s.features.with_dimension(dimension)?,
                    s.label,
                ))
            })
            .collect::<Result<Vec<_>, CoreError>>()?;
        Self::new(
            support_samples,
            self.alphas.clone(),
            self.bias,
            self.kernel,
            self.c,
            dimension,
        )
    }
}

/// Trains a binary soft-margin SVM with sequential minimal optimization.
///
/// Requires binary labels (-1/+1) with at least one sample of each class;
/// single-class data raises [`CoreError::DegenerateTraining`]. Support
/// vectors are exactly the samples whose dual coefficient stays positive.
pub fn train_binary(data: &Dataset, config: &SolverConfig) -> Result<SvmModel, CoreError> {
    config.validate()?;
    check_binary(data)?;
    let mut positives = 0usize;
    for sample in data.iter() {
        if sample.label == 1 {
            positives += 1;
        }
    }
    if positives == 0 || positives == data.len() {
        return Err(CoreError::DegenerateTraining(format!(
            "all {} samples share one class",
            data.len()
        )));
    }
    smo::solve(data, config)
}

/// Average loss of `model` over `data` (empirical risk).
pub fn empirical_risk(model: &SvmModel, data: &Dataset, loss: Loss) -> Result<f64, CoreError> {
    check_binary(data)?;
    let mut total = 0.0;
    for sample in data.iter() {
        total += match loss {
            Loss::ZeroOne => {
                if model.predict(&sample.features)? != sample.label {
                    1.0
                } else {
                    0.0
                }
            }
            Loss::Hinge => {
                let value = model.decision_value(&sample.features)?;
                (1.0 - f64::from(sample.label) * value).max(0.0)
            }
        };
    }
    Ok(total / data.len() as f64)
}

fn check_binary(data: &Dataset) -> Result<(), CoreError> {
    if data.is_empty() {
        return Err(CoreError::EmptyInput("dataset has no samples".into()));
    }
    for sample in data.iter() {
        if sample.label != 1 && sample.label != -1 {
            return Err(CoreError::InvalidDataset(format!(
                "sample {} has label {}, expected -1 or +1",
                sample.id, sample.label
            )));
        }
    }
    Ok(())
}

//! Kernel functions for the SVM solver and decision function.

use crate::error::CoreError;
use crate::sparse::SparseVector;

/// Kernel used by training and prediction. Linear is the default for
/// TF-IDF text features; RBF is available behind the same interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Linear,
    Rbf { gamma: f64 },
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec::Linear
    }
}

impl KernelSpec {
    pub fn validate(&self) -> Result<(), CoreError> {
        match self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { gamma } => {
                if gamma.is_finite() && *gamma > 0.0 {
                    Ok(())
                } else {
                    Err(CoreError::InvalidConfig(format!(
                        "rbf gamma must be a positive finite number, got {gamma}"
                    )))
                }
            }
        }
    }

    /// K(a, b). Errors when the vectors live in different feature spaces.
    pub fn eval(&self, a: &SparseVector, b: &SparseVector) -> Result<f64, CoreError> {
        match self {
            KernelSpec::Linear => a.dot(b),
            KernelSpec::Rbf { gamma } => {
                let dist_sq = (a.norm_sq() - 2.0 * a.dot(b)? + b.norm_sq()).max(0.0);
                Ok((-gamma * dist_sq).exp())
            }
        }
    }
}

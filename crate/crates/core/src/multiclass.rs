//! One-vs-rest decomposition over the binary trainer.

use crate::data::{Dataset, LabeledSample};
use crate::error::CoreError;
use crate::sparse::SparseVector;
use crate::svm::SvmModel;

/// One binary model per class, trained class-vs-rest. Prediction takes the
/// class whose model reports the largest decision value.
#[derive(Debug, Clone)]
pub struct MulticlassModel {
    classes: Vec<i32>,
    per_class_models: Vec<SvmModel>,
}

impl MulticlassModel {
    /// Assembles a model from aligned classes and binary models.
    pub fn new(classes: Vec<i32>, per_class_models: Vec<SvmModel>) -> Result<Self, CoreError> {
        if classes.len() != per_class_models.len() {
            return Err(CoreError::LengthMismatch(format!(
                "{} classes vs {} models",
                classes.len(),
                per_class_models.len()
            )));
        }
        if classes.is_empty() {
            return Err(CoreError::EmptyInput("no classes".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &class in &classes {
            if !seen.insert(class) {
                return Err(CoreError::InvalidConfig(format!("duplicate class {class}")));
            }
        }
        Ok(Self {
            classes,
            per_class_models,
        })
    }

    pub fn classes(&self) -> &[i32] {
        &self.classes
    }

    pub fn per_class_models(&self) -> &[SvmModel] {
        &self.per_class_models
    }

    pub fn dimension(&self) -> usize {
        self.per_class_models
            .first()
            .map(SvmModel::dimension)
            .unwrap_or(0)
    }

    /// Decision value of every class model, aligned with `classes()`.
    pub fn decision_values(&self, x: &SparseVector) -> Result<Vec<f64>, CoreError> {
        self.per_class_models
            .iter()
            .map(|m| m.decision_value(x))
            .collect()
    }

    /// Argmax over per-class decision values; exact ties resolve to the
    /// smallest class code.
    pub fn predict(&self, x: &SparseVector) -> Result<i32, CoreError> {
        let values = self.decision_values(x)?;
        let mut best_class = self.classes[0];
        let mut best_value = values[0];
        for (&class, &value) in self.classes.iter().zip(&values).skip(1) {
            if value > best_value || (value == best_value && class < best_class) {
                best_class = class;
                best_value = value;
            }
        }
        Ok(best_class)
    }

    /// Re-embeds every class model in a wider feature space.
    pub fn with_dimension(&self, dimension: usize) -> Result<Self, CoreError> {
        let models = self
            .per_class_models
            .iter()
            .map(|m| m.with_dimension(dimension))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.classes.clone(), models)
    }
}

/// Trains one binary model per class by relabeling `class -> +1, rest -> -1`
/// and delegating to `trainer` (monolithic or cascade, injected).
pub fn train_multiclass<F>(
    data: &Dataset,
    classes: &[i32],
    trainer: F,
) -> Result<MulticlassModel, CoreError>
where
    F: Fn(&Dataset) -> Result<SvmModel, CoreError>,
{
    if classes.is_empty() {
        return Err(CoreError::EmptyInput("no classes to train".into()));
    }
    let counts = data.class_counts();
    for &class in classes {
        if !counts.contains_key(&class) {
            return Err(CoreError::InvalidDataset(format!(
                "class {class} has no samples"
            )));
        }
    }
    let mut models = Vec::with_capacity(classes.len());
    for &class in classes {
        let relabeled: Vec<LabeledSample> = data
            .iter()
            .map(|s| {
                LabeledSample::new(s.id, s.features.clone(), if s.label == class { 1 } else { -1 })
            })
            .collect();
        let binary = Dataset::new(data.dimension(), relabeled)?;
        models.push(trainer(&binary)?);
    }
    MulticlassModel::new(classes.to_vec(), models)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;
    use crate::svm::{train_binary, SolverConfig};

    fn bias_model(bias: f64) -> SvmModel {
        SvmModel::new(vec![], vec![], bias, KernelSpec::Linear, 1.0, 2).unwrap()
    }

    #[test]
    fn predict_takes_argmax() {
        let model = MulticlassModel::new(
            vec![-1, 0, 1],
            vec![bias_model(0.2), bias_model(0.9), bias_model(-0.3)],
        )
        .unwrap();
        let x = SparseVector::empty(2);
        assert_eq!(model.predict(&x).unwrap(), 0);
    }

    #[test]
    fn exact_ties_resolve_to_smallest_class() {
        let model = MulticlassModel::new(
            vec![-1, 0, 1],
            vec![bias_model(0.5), bias_model(0.1), bias_model(0.5)],
        )
        .unwrap();
        let x = SparseVector::empty(2);
        assert_eq!(model.predict(&x).unwrap(), -1);
    }

    #[test]
    fn negated_pair_matches_binary_sign_rule() {
        // Train a binary model, pair it with its mirror (labels and bias
        // flipped, so f_neg = -f); the one-vs-rest argmax must then agree
        // with sign(f) everywhere the value is nonzero.
        let mk = |id, x: f64, y: f64, label| {
            LabeledSample::new(
                id,
                SparseVector::new(2, [(0, x), (1, y)]).unwrap(),
                label,
            )
        };
        let data = Dataset::new(
            2,
            vec![
                mk(0, 0.0, 0.2, -1),
                mk(1, 0.4, 0.0, -1),
                mk(2, 3.0, 2.8, 1),
                mk(3, 2.6, 3.2, 1),
            ],
        )
        .unwrap();
        let positive = train_binary(&data, &SolverConfig::default()).unwrap();
        let mirrored_svs: Vec<LabeledSample> = positive
            .support_samples()
            .iter()
            .map(|s| LabeledSample::new(s.id, s.features.clone(), -s.label))
            .collect();
        let negative = SvmModel::new(
            mirrored_svs,
            positive.alphas().to_vec(),
            -positive.bias(),
            positive.kernel(),
            positive.c(),
            positive.dimension(),
        )
        .unwrap();
        let ovr = MulticlassModel::new(vec![-1, 1], vec![negative, positive.clone()]).unwrap();
        for sample in data.iter() {
            let f = positive.decision_value(&sample.features).unwrap();
            assert!(f != 0.0, "test points should be margin-clear");
            let sign_label = if f >= 0.0 { 1 } else { -1 };
            assert_eq!(ovr.predict(&sample.features).unwrap(), sign_label);
        }
    }

    #[test]
    fn missing_class_is_rejected() {
        let data = Dataset::new(
            1,
            vec![
                LabeledSample::new(0, SparseVector::new(1, [(0, 1.0)]).unwrap(), 1),
                LabeledSample::new(1, SparseVector::new(1, [(0, 2.0)]).unwrap(), -1),
            ],
        )
        .unwrap();
        let result = train_multiclass(&data, &[-1, 0, 1], |d| {
            train_binary(d, &SolverConfig::default())
        });
        assert!(matches!(result, Err(CoreError::InvalidDataset(_))));
    }

    #[test]
    fn one_sample_per_class_trains_one_vs_two() {
        let mk = |id, x: f64, label| {
            LabeledSample::new(id, SparseVector::new(1, [(0, x)]).unwrap(), label)
        };
        let data = Dataset::new(1, vec![mk(0, 0.0, -1), mk(1, 5.0, 0), mk(2, 10.0, 1)]).unwrap();
        let model = train_multiclass(&data, &[-1, 0, 1], |d| {
            // Each relabeled problem has one positive and two negatives.
            let counts = d.class_counts();
            assert_eq!(counts[&1], 1);
            assert_eq!(counts[&-1], 2);
            train_binary(d, &SolverConfig::default())
        })
        .unwrap();
        assert_eq!(model.classes(), &[-1, 0, 1]);
        assert_eq!(model.per_class_models().len(), 3);
    }
}

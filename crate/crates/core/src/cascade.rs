//! Iterative map/reduce SVM training.
//!
//! Each iteration merges every partition with the current global
//! support-vector set (map), trains a per-partition SVM and extracts its
//! support vectors (reduce), unions those into the global set, retrains a
//! single model on the global set, and measures its empirical risk on the
//! full dataset. The loop stops when the risk change falls within the
//! configured threshold or the global set stops growing.

use std::collections::{BTreeMap, BTreeSet};

use crate::data::{Dataset, LabeledSample, PartitionStrategy};
use crate::error::CoreError;
use crate::mapreduce::MapReduceJob;
use crate::svm::{empirical_risk, train_binary, Loss, SolverConfig, SvmModel};

/// Configuration of the cascade training loop.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeConfig {
    pub num_partitions: usize,
    /// Stop once |risk(t-1) - risk(t)| falls within this threshold.
    pub risk_tolerance: f64,
    /// Safety bound on the number of iterations.
    pub max_iterations: usize,
    pub solver: SolverConfig,
    pub risk_loss: Loss,
    pub partition_strategy: PartitionStrategy,
    /// Seed for the partitioning shuffle (the solver has its own seed).
    pub seed: u64,
    /// Worker threads for the map and reduce phases.
    pub workers: usize,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        Self {
            num_partitions: 4,
            risk_tolerance: 0.0,
            max_iterations: 20,
            solver: SolverConfig::default(),
            risk_loss: Loss::ZeroOne,
            partition_strategy: PartitionStrategy::Stratified,
            seed: 0,
            workers: 1,
        }
    }
}

impl CascadeConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if self.num_partitions == 0 {
            return Err(CoreError::InvalidConfig(
                "num_partitions must be at least 1".into(),
            ));
        }
        if !(self.risk_tolerance.is_finite() && self.risk_tolerance >= 0.0) {
            return Err(CoreError::InvalidConfig(format!(
                "risk_tolerance must be a non-negative finite number, got {}",
                self.risk_tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(CoreError::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        if self.workers == 0 {
            return Err(CoreError::InvalidConfig(
                "workers must be at least 1".into(),
            ));
        }
        self.solver.validate()
    }
}

/// Whether the loop stopped on the risk criterion or ran out of iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CascadeStatus {
    Converged,
    MaxIterationsReached,
}

/// The global support-vector pool, keyed and deduplicated by sample id.
/// Updates are union-only, so the pool never shrinks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SupportSet {
    samples: BTreeMap<u64, LabeledSample>,
}

impl SupportSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.samples.contains_key(&id)
    }

    pub fn ids(&self) -> BTreeSet<u64> {
        self.samples.keys().copied().collect()
    }

    /// Samples in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = &LabeledSample> {
        self.samples.values()
    }

    /// Union with `samples`; existing ids win, so a sample never changes
    /// once pooled.
    pub fn extend(&mut self, samples: impl IntoIterator<Item = LabeledSample>) {
        for sample in samples {
            self.samples.entry(sample.id).or_insert(sample);
        }
    }

    /// Materializes the pool as a dataset (ascending id order).
    pub fn to_dataset(&self, dimension: usize) -> Result<Dataset, CoreError> {
        Dataset::new(dimension, self.samples.values().cloned().collect())
    }
}

/// Observable state of a cascade run.
#[derive(Debug, Clone)]
pub struct CascadeState {
    pub global_svs: SupportSet,
    /// Completed iterations; equals `risk_history.len()`.
    pub iterations: usize,
    /// Empirical risk of the global model after each iteration.
    pub risk_history: Vec<f64>,
    /// Size of the global support-vector pool after each iteration.
    pub sv_count_history: Vec<usize>,
    pub current_model: Option<SvmModel>,
    pub status: CascadeStatus,
    /// Degenerate-partition skips, one note per event.
    pub warnings: Vec<String>,
}

/// Merges one partition with a snapshot of the global support-vector set,
/// deduplicating by sample id. Partition samples keep their order; pooled
/// samples not already present follow in ascending id order.
pub fn cascade_map(
    partition_id: usize,
    partition: &Dataset,
    global_svs: &SupportSet,
) -> Result<(usize, Dataset), CoreError> {
    let mut merged: Vec<LabeledSample> = partition.samples().to_vec();
    let present: BTreeSet<u64> = partition.iter().map(|s| s.id).collect();
    for sample in global_svs.iter() {
        if sample.features.dimension() != partition.dimension() {
            return Err(CoreError::DimensionMismatch {
                left: sample.features.dimension(),
                right: partition.dimension(),
            });
        }
        if !present.contains(&sample.id) {
            merged.push(sample.clone());
        }
    }
    Ok((partition_id, Dataset::new(partition.dimension(), merged)?))
}

/// Trains a binary SVM on a merged partition and extracts its support
/// vectors (the samples whose dual coefficient stayed positive).
pub fn cascade_reduce(
    partition_id: usize,
    merged: &Dataset,
    solver: &SolverConfig,
) -> Result<(Vec<LabeledSample>, SvmModel), CoreError> {
    let _ = partition_id;
    let model = train_binary(merged, solver)?;
    let svs = model.support_samples().to_vec();
    Ok((svs, model))
}

enum ReduceOutcome {
    Trained(Vec<LabeledSample>),
    Degenerate(String),
}

/// Runs the iterative cascade trainer.
///
/// Returns the final global model together with the run state. When the
/// loop exhausts `max_iterations` without the risk stabilizing, the model
/// with the lowest observed risk is returned and the state is flagged
/// [`CascadeStatus::MaxIterationsReached`]; that is an outcome, not an
/// error. Fixed inputs and seeds give bit-identical results, whatever the
/// worker count.
pub fn train_cascade(
    data: &Dataset,
    config: &CascadeConfig,
) -> Result<(SvmModel, CascadeState), CoreError> {
    config.validate()?;
    validate_binary_with_both_classes(data)?;

    // Partitions are drawn once and stay fixed across iterations.
    let partitions = data.partition(config.num_partitions, config.partition_strategy, config.seed)?;

    let mut state = CascadeState {
        global_svs: SupportSet::new(),
        iterations: 0,
        risk_history: Vec::new(),
        sv_count_history: Vec::new(),
        current_model: None,
        status: CascadeStatus::MaxIterationsReached,
        warnings: Vec::new(),
    };
    let mut previous_ids: BTreeSet<u64> = BTreeSet::new();
    let mut best: Option<(f64, SvmModel)> = None;

    for iteration in 1..=config.max_iterations {
        // Map tasks see an immutable snapshot of the pool; the pool itself
        // is updated only between iterations.
        let snapshot = state.global_svs.clone();
        let solver = &config.solver;
        let job = MapReduceJob {
            inputs: partitions.iter().enumerate().collect::<Vec<_>>(),
            map_fn: |partition_id: usize, partition: &Dataset| {
                cascade_map(partition_id, partition, &snapshot).map(|pair| vec![pair])
            },
            reduce_fn: |partition_id: usize, mut merged: Vec<Dataset>| {
                debug_assert_eq!(merged.len(), 1, "one merged dataset per partition key");
                let merged = merged.pop().expect("grouped by partition id");
                match cascade_reduce(partition_id, &merged, solver) {
                    Ok((svs, _model)) => Ok(vec![(partition_id, ReduceOutcome::Trained(svs))]),
                    Err(CoreError::DegenerateTraining(msg)) => {
                        Ok(vec![(partition_id, ReduceOutcome::Degenerate(msg))])
                    }
                    Err(other) => Err(other),
                }
            },
        };

        let outcomes = job.run(config.workers)?;
        let mut trained_any = false;
        for (partition_id, outcome) in outcomes {
            match outcome {
                ReduceOutcome::Trained(svs) => {
                    trained_any = true;
                    state.global_svs.extend(svs);
                }
                ReduceOutcome::Degenerate(msg) => {
                    state
                        .warnings
                        .push(format!("iteration {iteration}: partition {partition_id}: {msg}; skipped"));
                }
            }
        }
        if !trained_any {
            return Err(CoreError::TrainingFailed(format!(
                "every partition was single-class at iteration {iteration}"
            )));
        }

        let pooled = state.global_svs.to_dataset(data.dimension())?;
        let model = train_binary(&pooled, &config.solver)?;
        let risk = empirical_risk(&model, data, config.risk_loss)?;
        state.risk_history.push(risk);
        state.sv_count_history.push(state.global_svs.len());
        state.iterations = iteration;

        if best.as_ref().is_none_or(|(best_risk, _)| risk < *best_risk) {
            best = Some((risk, model.clone()));
        }

        let ids = state.global_svs.ids();
        let pool_stable = ids == previous_ids;
        let risk_stable = iteration >= 2 && {
            let previous = state.risk_history[iteration - 2];
            (previous - risk).abs() <= config.risk_tolerance
        };
        if pool_stable || risk_stable {
            state.status = CascadeStatus::Converged;
            state.current_model = Some(model.clone());
            return Ok((model, state));
        }
        previous_ids = ids;
    }

    let (_, model) = best.expect("at least one iteration ran");
    state.status = CascadeStatus::MaxIterationsReached;
    state.current_model = Some(model.clone());
    Ok((model, state))
}

fn validate_binary_with_both_classes(data: &Dataset) -> Result<(), CoreError> {
    if data.is_empty() {
        return Err(CoreError::EmptyInput("dataset has no samples".into()));
    }
    let mut positives = 0usize;
    for sample in data.iter() {
        match sample.label {
            1 => positives += 1,
            -1 => {}
            other => {
                return Err(CoreError::InvalidDataset(format!(
                    "sample {} has label {other}, expected -1 or +1",
                    sample.id
                )))
            }
        }
    }
    if positives == 0 || positives == data.len() {
        return Err(CoreError::DegenerateTraining(
            "cascade training needs both classes".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseVector;

    fn one_d(id: u64, x: f64, label: i32) -> LabeledSample {
        LabeledSample::new(id, SparseVector::new(1, [(0, x)]).unwrap(), label)
    }

    fn two_point_data() -> Dataset {
        Dataset::new(1, vec![one_d(0, 0.0, -1), one_d(1, 2.0, 1)]).unwrap()
    }

    #[test]
    fn map_with_empty_pool_returns_partition_unchanged() {
        let data = two_point_data();
        let (key, merged) = cascade_map(3, &data, &SupportSet::new()).unwrap();
        assert_eq!(key, 3);
        assert_eq!(merged, data);
    }

    #[test]
    fn map_deduplicates_by_id() {
        let data = two_point_data();
        let mut pool = SupportSet::new();
        pool.extend(data.samples().to_vec());
        let (_, merged) = cascade_map(0, &data, &pool).unwrap();
        assert_eq!(merged, data, "pool subset of partition leaves it unchanged");
    }

    #[test]
    fn map_unions_disjoint_ids() {
        let partition = Dataset::new(
            1,
            (0..5).map(|i| one_d(i, i as f64, if i % 2 == 0 { 1 } else { -1 })).collect(),
        )
        .unwrap();
        let mut pool = SupportSet::new();
        pool.extend((10..13).map(|i| one_d(i, i as f64, 1)));
        let (_, merged) = cascade_map(0, &partition, &pool).unwrap();
        assert_eq!(merged.len(), 8);
    }

    #[test]
    fn map_rejects_dimension_mismatch() {
        let partition = two_point_data();
        let mut pool = SupportSet::new();
        pool.extend([LabeledSample::new(
            9,
            SparseVector::new(2, [(1, 1.0)]).unwrap(),
            1,
        )]);
        assert!(cascade_map(0, &partition, &pool).is_err());
    }

    #[test]
    fn reduce_extracts_both_points_of_the_analytic_problem() {
        let config = SolverConfig {
            c: 10.0,
            ..SolverConfig::default()
        };
        let (svs, model) = cascade_reduce(0, &two_point_data(), &config).unwrap();
        assert_eq!(svs.len(), 2);
        assert_eq!(model.num_support_vectors(), 2);
    }

    #[test]
    fn reduce_is_deterministic() {
        let data = Dataset::new(
            1,
            vec![
                one_d(0, 0.0, -1),
                one_d(1, 0.5, -1),
                one_d(2, 2.5, 1),
                one_d(3, 3.0, 1),
            ],
        )
        .unwrap();
        let config = SolverConfig::default();
        let (svs_a, _) = cascade_reduce(0, &data, &config).unwrap();
        let (svs_b, _) = cascade_reduce(0, &data, &config).unwrap();
        let ids = |svs: &[LabeledSample]| svs.iter().map(|s| s.id).collect::<Vec<_>>();
        assert_eq!(ids(&svs_a), ids(&svs_b));
    }

    #[test]
    fn degenerate_partition_is_skipped_with_warning() {
        // Three samples of one class in one partition, mixed in the other.
        // Round-robin over ids keeps partition 1 single-class.
        let data = Dataset::new(
            1,
            vec![
                one_d(0, 0.0, -1),
                one_d(1, 5.0, 1),
                one_d(2, 0.3, -1),
                one_d(3, 6.0, 1),
                one_d(4, 0.6, -1),
                one_d(5, 0.9, -1),
            ],
        )
        .unwrap();
        let config = CascadeConfig {
            num_partitions: 3,
            partition_strategy: PartitionStrategy::RoundRobin,
            max_iterations: 5,
            ..CascadeConfig::default()
        };
        // Partitions: {0,3}, {1,4}, {2,5} by position -> labels
        // {-1,+1}, {+1,-1}, {-1,-1}: the last one is degenerate.
        let (_, state) = train_cascade(&data, &config).unwrap();
        assert!(
            state.warnings.iter().any(|w| w.contains("iteration 1") && w.contains("partition 2")),
            "warnings: {:?}",
            state.warnings
        );
    }

    #[test]
    fn all_degenerate_partitions_fail() {
        // One positive, one negative, two partitions of one sample each.
        let data = Dataset::new(1, vec![one_d(0, 0.0, -1), one_d(1, 2.0, 1)]).unwrap();
        let config = CascadeConfig {
            num_partitions: 2,
            ..CascadeConfig::default()
        };
        assert!(matches!(
            train_cascade(&data, &config),
            Err(CoreError::TrainingFailed(_))
        ));
    }

    #[test]
    fn max_iterations_one_yields_single_history_entry() {
        let data = Dataset::new(
            1,
            vec![
                one_d(0, 0.0, -1),
                one_d(1, 0.4, -1),
                one_d(2, 2.2, 1),
                one_d(3, 2.9, 1),
            ],
        )
        .unwrap();
        let config = CascadeConfig {
            num_partitions: 2,
            max_iterations: 1,
            ..CascadeConfig::default()
        };
        let (_, state) = train_cascade(&data, &config).unwrap();
        assert_eq!(state.iterations, 1);
        assert_eq!(state.risk_history.len(), 1);
        assert_eq!(state.status, CascadeStatus::MaxIterationsReached);
    }

    #[test]
    fn single_class_dataset_is_rejected() {
        let data = Dataset::new(1, vec![one_d(0, 0.0, 1), one_d(1, 1.0, 1)]).unwrap();
        assert!(matches!(
            train_cascade(&data, &CascadeConfig::default()),
            Err(CoreError::DegenerateTraining(_))
        ));
    }

    #[test]
    fn support_set_updates_are_union_only() {
        let mut pool = SupportSet::new();
        pool.extend([one_d(1, 1.0, 1)]);
        pool.extend([one_d(1, 9.0, -1), one_d(2, 2.0, -1)]);
        assert_eq!(pool.len(), 2);
        // The first insertion wins; later duplicates never overwrite.
        assert_eq!(pool.iter().next().unwrap().label, 1);
    }
}

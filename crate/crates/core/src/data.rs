//! Labeled samples, datasets, and deterministic partitioning.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CoreError;
use crate::sparse::SparseVector;

/// One training sample: a stable id, sparse features, and an integer class code.
///
/// Ids are assigned at ingestion and act as the deduplication key when
/// support vectors from different partitions are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub id: u64,
    pub features: SparseVector,
    pub label: i32,
}

impl LabeledSample {
    pub fn new(id: u64, features: SparseVector, label: i32) -> Self {
        Self {
            id,
            features,
            label,
        }
    }
}

/// How [`Dataset::partition`] assigns samples to partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionStrategy {
    /// Deal samples to partitions in input order.
    RoundRobin,
    /// Shuffle within each class, then deal so every partition keeps the
    /// overall class proportions within one sample per class.
    Stratified,
}

/// An ordered collection of samples over one shared feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
    dimension: usize,
}

impl Dataset {
    /// Builds a dataset, checking that ids are unique and dimensions agree.
    pub fn new(dimension: usize, samples: Vec<LabeledSample>) -> Result<Self, CoreError> {
        let mut seen = HashSet::with_capacity(samples.len());
        for sample in &samples {
            if sample.features.dimension() != dimension {
                return Err(CoreError::InvalidDataset(format!(
                    "sample {} has dimension {}, dataset expects {}",
                    sample.id,
                    sample.features.dimension(),
                    dimension
                )));
            }
            if !seen.insert(sample.id) {
                return Err(CoreError::InvalidDataset(format!(
                    "duplicate sample id {}",
                    sample.id
                )));
            }
        }
        Ok(Self { samples, dimension })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledSample> {
        self.samples.iter()
    }

    /// Per-class sample counts in ascending class-code order.
    pub fn class_counts(&self) -> BTreeMap<i32, usize> {
        let mut counts = BTreeMap::new();
        for sample in &self.samples {
            *counts.entry(sample.label).or_insert(0) += 1;
        }
        counts
    }

    /// Re-embeds every sample in a feature space of dimension `dimension`.
    pub fn with_dimension(&self, dimension: usize) -> Result<Self, CoreError> {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                Ok(LabeledSample::new(
                    s.id,
                    s.features.with_dimension(dimension)?,
                    s.label,
                ))
            })
            .collect::<Result<Vec<_>, CoreError>>()?;
        Dataset::new(dimension, samples)
    }

    /// Splits the dataset into `parts` partitions.
    ///
    /// Every sample lands in exactly one partition and partition sizes differ
    /// by at most one. The stratified strategy additionally keeps per-class
    /// counts balanced within one sample per class; it shuffles within each
    /// class using `seed`, so the split is deterministic for a fixed seed.
    pub fn partition(
        &self,
        parts: usize,
        strategy: PartitionStrategy,
        seed: u64,
    ) -> Result<Vec<Dataset>, CoreError> {
        if parts == 0 {
            return Err(CoreError::InvalidPartition(
                "partition count must be at least 1".into(),
            ));
        }
        if parts > self.samples.len() {
            return Err(CoreError::InvalidPartition(format!(
                "cannot split {} samples into {} partitions",
                self.samples.len(),
                parts
            )));
        }

        let mut buckets: Vec<Vec<LabeledSample>> = vec![Vec::new(); parts];
        match strategy {
            PartitionStrategy::RoundRobin => {
                for (position, sample) in self.samples.iter().enumerate() {
                    buckets[position % parts].push(sample.clone());
                }
            }
            PartitionStrategy::Stratified => {
                let mut by_class: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
                for (position, sample) in self.samples.iter().enumerate() {
                    by_class.entry(sample.label).or_default().push(position);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                // One dealing cursor shared across classes keeps both the
                // global sizes and the per-class counts within +/-1.
                let mut cursor = 0usize;
                for positions in by_class.values_mut() {
                    positions.shuffle(&mut rng);
                    for &position in positions.iter() {
                        buckets[cursor % parts].push(self.samples[position].clone());
                        cursor += 1;
                    }
                }
            }
        }

        buckets
            .into_iter()
            .map(|samples| Dataset::new(self.dimension, samples))
            .collect()
    }
}

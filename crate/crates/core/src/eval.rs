//! Confusion-matrix evaluation and per-entity polarity aggregation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::CoreError;

/// Class-by-class prediction counts. Rows are actual classes, columns are
/// predicted classes, both in the order of `classes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: Vec<i32>,
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    /// Tallies actual/predicted pairs. Both lists must be non-empty, of
    /// equal length, and drawn from `classes`.
    pub fn from_labels(
        actual: &[i32],
        predicted: &[i32],
        classes: &[i32],
    ) -> Result<Self, CoreError> {
        if actual.len() != predicted.len() {
            return Err(CoreError::LengthMismatch(format!(
                "{} actual vs {} predicted labels",
                actual.len(),
                predicted.len()
            )));
        }
        if actual.is_empty() {
            return Err(CoreError::EmptyInput("no labels to evaluate".into()));
        }
        let mut matrix = Self::zeroed(classes)?;
        let index: BTreeMap<i32, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i))
            .collect();
        for (&a, &p) in actual.iter().zip(predicted) {
            let row = *index.get(&a).ok_or(CoreError::UnknownClass(a))?;
            let col = *index.get(&p).ok_or(CoreError::UnknownClass(p))?;
            matrix.counts[row][col] += 1;
        }
        Ok(matrix)
    }

    /// Builds a matrix from raw counts (rows = actual, columns = predicted).
    pub fn from_counts(classes: &[i32], counts: Vec<Vec<u64>>) -> Result<Self, CoreError> {
        let mut matrix = Self::zeroed(classes)?;
        if counts.len() != classes.len() || counts.iter().any(|row| row.len() != classes.len()) {
            return Err(CoreError::LengthMismatch(format!(
                "counts must be {n}x{n}",
                n = classes.len()
            )));
        }
        matrix.counts = counts;
        Ok(matrix)
    }

    fn zeroed(classes: &[i32]) -> Result<Self, CoreError> {
        if classes.is_empty() {
            return Err(CoreError::EmptyInput("no classes".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &c in classes {
            if !seen.insert(c) {
                return Err(CoreError::InvalidConfig(format!("duplicate class {c}")));
            }
        }
        Ok(Self {
            classes: classes.to_vec(),
            counts: vec![vec![0; classes.len()]; classes.len()],
        })
    }

    pub fn classes(&self) -> &[i32] {
        &self.classes
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn count(&self, actual_index: usize, predicted_index: usize) -> u64 {
        self.counts[actual_index][predicted_index]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Per-class actual counts (row sums).
    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|row| row.iter().sum()).collect()
    }

    /// Fraction of correctly classified samples. Errors on an all-zero
    /// matrix.
    pub fn accuracy(&self) -> Result<f64, CoreError> {
        let total = self.total();
        if total == 0 {
            return Err(CoreError::EmptyInput("confusion matrix has no samples".into()));
        }
        Ok(self.trace() as f64 / total as f64)
    }

    /// Cell shares of the grand total, in percent, rounded half-up to two
    /// decimals (display form).
    pub fn percentages(&self) -> Vec<Vec<f64>> {
        let total = self.total().max(1) as f64;
        self.counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| round_half_up_2(c as f64 * 100.0 / total))
                    .collect()
            })
            .collect()
    }
}

fn round_half_up_2(value: f64) -> f64 {
    (value * 100.0).round() / 100.0
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let headers: Vec<String> = self.classes.iter().map(|c| format!("pred {c}")).collect();
        let width = headers
            .iter()
            .map(String::len)
            .chain(self.counts.iter().flatten().map(|c| c.to_string().len()))
            .max()
            .unwrap_or(1)
            .max(6);
        let label_width = self
            .classes
            .iter()
            .map(|c| format!("actual {c}").len())
            .max()
            .unwrap_or(6);
        write!(f, "{:label_width$}", "")?;
        for header in &headers {
            write!(f, "  {header:>width$}")?;
        }
        writeln!(f)?;
        for (i, &class) in self.classes.iter().enumerate() {
            write!(f, "{:label_width$}", format!("actual {class}"))?;
            for &count in &self.counts[i] {
                write!(f, "  {count:>width$}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Polarity profile of one entity: per-class prediction counts and shares.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityPolarity {
    pub entity_key: String,
    pub per_class_counts: BTreeMap<i32, u64>,
    pub total: u64,
    pub ratios: BTreeMap<i32, f64>,
}

impl EntityPolarity {
    pub fn count(&self, class: i32) -> u64 {
        self.per_class_counts.get(&class).copied().unwrap_or(0)
    }

    pub fn ratio(&self, class: i32) -> f64 {
        self.ratios.get(&class).copied().unwrap_or(0.0)
    }
}

/// Ranking key for entity tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankBy {
    /// Number of predictions for the entity.
    Total,
    /// Share of predictions falling in one class.
    ClassRatio(i32),
}

/// Groups predictions by entity and computes per-class counts and ratios.
/// Rows with an empty entity key are not counted. The result is keyed
/// ascending by entity.
pub fn aggregate_entities(predictions: &[(String, i32)]) -> Vec<EntityPolarity> {
    let mut grouped: BTreeMap<&str, BTreeMap<i32, u64>> = BTreeMap::new();
    for (entity, class) in predictions {
        if entity.is_empty() {
            continue;
        }
        *grouped
            .entry(entity.as_str())
            .or_default()
            .entry(*class)
            .or_insert(0) += 1;
    }
    grouped
        .into_iter()
        .map(|(entity, per_class_counts)| {
            let total: u64 = per_class_counts.values().sum();
            let ratios = per_class_counts
                .iter()
                .map(|(&class, &count)| (class, count as f64 / total as f64))
                .collect();
            EntityPolarity {
                entity_key: entity.to_string(),
                per_class_counts,
                total,
                ratios,
            }
        })
        .collect()
}

/// Sorts entities by the chosen key, descending, breaking ties by entity
/// key ascending so rankings are total orders.
pub fn rank_entities(mut entities: Vec<EntityPolarity>, by: RankBy) -> Vec<EntityPolarity> {
    entities.sort_by(|a, b| {
        let ordering = match by {
            RankBy::Total => b.total.cmp(&a.total),
            RankBy::ClassRatio(class) => b
                .ratio(class)
                .partial_cmp(&a.ratio(class))
                .expect("ratios are finite"),
        };
        ordering.then_with(|| a.entity_key.cmp(&b.entity_key))
    });
    entities
}

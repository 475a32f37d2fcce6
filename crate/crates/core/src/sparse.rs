//! Sparse feature vectors: sorted index/value pairs with an explicit dimension.

use crate::error::CoreError;

/// A sparse vector over a fixed-dimension feature space.
///
/// Only nonzero entries are stored, strictly sorted by feature index.
/// Zeros handed to the constructor are dropped; NaN and infinite values,
/// duplicate indices, and indices at or beyond `dimension` are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    indices: Vec<usize>,
    values: Vec<f64>,
    dimension: usize,
}

impl SparseVector {
    /// Builds a vector from (index, value) pairs in any order.
    pub fn new(
        dimension: usize,
        entries: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self, CoreError> {
        let mut pairs: Vec<(usize, f64)> = entries.into_iter().collect();
        pairs.sort_by_key(|&(index, _)| index);

        let mut indices = Vec::with_capacity(pairs.len());
        let mut values = Vec::with_capacity(pairs.len());
        let mut previous: Option<usize> = None;
        for (index, value) in pairs {
            if !value.is_finite() {
                return Err(CoreError::InvalidVector(format!(
                    "non-finite value {value} at index {index}"
                )));
            }
            if index >= dimension {
                return Err(CoreError::InvalidVector(format!(
                    "index {index} out of range for dimension {dimension}"
                )));
            }
            if previous == Some(index) {
                return Err(CoreError::InvalidVector(format!("duplicate index {index}")));
            }
            previous = Some(index);
            if value != 0.0 {
                indices.push(index);
                values.push(value);
            }
        }
        Ok(Self {
            indices,
            values,
            dimension,
        })
    }

    /// The zero vector of the given dimension.
    pub fn empty(dimension: usize) -> Self {
        Self {
            indices: Vec::new(),
            values: Vec::new(),
            dimension,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Value at `index`, zero when the entry is not stored.
    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    /// Stored entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Dot product over shared indices. Errors when dimensions differ.
    pub fn dot(&self, other: &SparseVector) -> Result<f64, CoreError> {
        if self.dimension != other.dimension {
            return Err(CoreError::DimensionMismatch {
                left: self.dimension,
                right: other.dimension,
            });
        }
        let mut sum = 0.0;
        let mut i = 0;
        let mut j = 0;
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    sum += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(sum)
    }

    /// Squared Euclidean norm.
    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Re-embeds the vector in a feature space of dimension `dimension`.
    ///
    /// Growing a vector is exact (absent trailing features are zero);
    /// shrinking fails if any stored index would fall out of range.
    pub fn with_dimension(&self, dimension: usize) -> Result<Self, CoreError> {
        if let Some(&max) = self.indices.last() {
            if max >= dimension {
                return Err(CoreError::InvalidVector(format!(
                    "index {max} out of range for dimension {dimension}"
                )));
            }
        }
        Ok(Self {
            indices: self.indices.clone(),
            values: self.values.clone(),
            dimension,
        })
    }

    /// Dense expansion, mostly for small-scale checks.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dimension];
        for (index, value) in self.iter() {
            dense[index] = value;
        }
        dense
    }
}

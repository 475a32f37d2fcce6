//! Error types shared by every module in the crate.

use thiserror::Error;

/// Errors raised by dataset construction, training, and the text pipeline.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Two vectors (or a vector and a model) live in different feature spaces.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A sparse vector violated its construction invariants.
    #[error("invalid sparse vector: {0}")]
    InvalidVector(String),

    /// A dataset violated its construction invariants (duplicate ids, mixed dimensions).
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    /// A partition request cannot be satisfied.
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    /// A training set contains samples of only one class.
    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    /// A configuration value is outside its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An operation that requires input received none.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// Every candidate term was filtered out of the vocabulary.
    #[error("vocabulary is empty after filtering")]
    EmptyVocabulary,

    /// A term index does not exist in the vocabulary.
    #[error("term index {index} out of range for vocabulary of {size} terms")]
    InvalidTermIndex { index: usize, size: usize },

    /// The cascade could not train on any partition.
    #[error("cascade training failed: {0}")]
    TrainingFailed(String),

    /// A class code was not declared in the evaluation class list.
    #[error("unknown class code {0}")]
    UnknownClass(i32),

    /// Paired inputs (actual vs predicted) have different lengths.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

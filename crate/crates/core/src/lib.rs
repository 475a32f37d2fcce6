//! Cascade SVM training over partitioned data, with a TF-IDF text
//! pipeline and polarity evaluation.
//!
//! The training scheme splits the dataset into partitions, trains a
//! soft-margin SVM per partition, pools the resulting support vectors
//! into a global set that is merged back into every partition, and
//! repeats until the empirical risk of the pooled model stabilizes. A
//! local map/reduce runner supplies the partition parallelism; the text
//! modules turn raw messages into the sparse TF-IDF space the classifier
//! consumes; the evaluation module covers confusion matrices and
//! per-entity polarity rankings.

pub mod cascade;
pub mod data;
pub mod error;
pub mod eval;
pub mod kernel;
pub mod mapreduce;
pub mod multiclass;
pub mod sparse;
pub mod svm;
pub mod text;

#[cfg(feature = "testkit")]
pub mod testkit;

pub use cascade::{
    cascade_map, cascade_reduce, train_cascade, CascadeConfig, CascadeState, CascadeStatus,
    SupportSet,
};
pub use data::{Dataset, LabeledSample, PartitionStrategy};
pub use error::CoreError;
pub use eval::{aggregate_entities, rank_entities, ConfusionMatrix, EntityPolarity, RankBy};
pub use kernel::KernelSpec;
pub use mapreduce::MapReduceJob;
pub use multiclass::{train_multiclass, MulticlassModel};
pub use sparse::SparseVector;
pub use svm::{empirical_risk, train_binary, Loss, SolverConfig, SvmModel};
pub use text::{
    build_vocabulary, remove_stopwords, tokenize, vectorize, Message, StopwordList, Vocabulary,
    DEFAULT_STOPWORDS,
};

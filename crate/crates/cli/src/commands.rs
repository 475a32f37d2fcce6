//! Implementations of the five subcommands.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};

use polarity_core::{
    aggregate_entities, build_vocabulary, rank_entities, remove_stopwords, tokenize,
    train_cascade, train_multiclass, vectorize, CascadeConfig, CascadeStatus, ConfusionMatrix,
    Dataset, KernelSpec, LabeledSample, Loss, Message, PartitionStrategy, RankBy, SolverConfig,
    StopwordList, SvmModel, Vocabulary,
};

use crate::error::CliError;
use crate::formats::{
    read_messages, read_predictions, read_sparse, write_predictions, write_sparse, PredictionRow,
};
use crate::persist::{
    load_model, load_vocabulary, save_binary_model, save_multiclass_model, save_vocabulary,
    LoadedModel,
};
use crate::table::{render_percent_matrix, render_ranking, write_confusion_csv, write_ranking_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// `label idx:val idx:val ...`, 0-based ascending indices.
    Sparse,
    /// `entity_key<TAB>label<TAB>text`, label in {-1, 0, 1, ?}.
    Messages,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Linear,
    Rbf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    ZeroOne,
    Hinge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Stratified,
    RoundRobin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankKeyArg {
    /// Most messages first.
    Total,
    /// Highest share of +1 predictions first.
    Positive,
    /// Highest share of -1 predictions first.
    Negative,
    /// Highest share of 0 predictions first.
    Neutral,
}

#[derive(Debug, Args)]
pub struct VectorizeArgs {
    /// Messages TSV to ingest.
    #[arg(long)]
    pub input: PathBuf,
    /// Where to write the vocabulary.
    #[arg(long)]
    pub vocab_out: PathBuf,
    /// Where to write the sparse dataset.
    #[arg(long)]
    pub data_out: PathBuf,
    /// Keep only terms appearing in at least this many documents.
    #[arg(long, default_value_t = 2)]
    pub min_df: usize,
    /// Keep at most this many terms (highest document frequency wins).
    #[arg(long)]
    pub max_features: Option<usize>,
    /// Stopword file, one word per line (default: built-in Turkish list).
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training data.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Sparse)]
    pub format: FormatArg,
    /// Where to write the trained model.
    #[arg(long)]
    pub model_out: PathBuf,
    /// Number of training partitions.
    #[arg(long, default_value_t = 4)]
    pub partitions: usize,
    /// Risk-delta stopping threshold.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 20)]
    pub max_iterations: usize,
    /// Slack penalty of the soft-margin objective.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = KernelArg::Linear)]
    pub kernel: KernelArg,
    /// RBF bandwidth; required with --kernel rbf.
    #[arg(long, allow_negative_numbers = true)]
    pub rbf_gamma: Option<f64>,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub kkt_tolerance: f64,
    #[arg(long, default_value_t = 10)]
    pub max_passes: usize,
    /// Worker threads for the map and reduce phases.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Seed for partitioning and the solver sweep order.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = LossArg::ZeroOne)]
    pub loss: LossArg,
    #[arg(long, value_enum, default_value_t = StrategyArg::Stratified)]
    pub strategy: StrategyArg,
    /// Train one-vs-rest over all classes present instead of a binary model.
    #[arg(long)]
    pub multiclass: bool,
    /// Only with --format messages: minimum document frequency.
    #[arg(long)]
    pub min_df: Option<usize>,
    /// Only with --format messages: vocabulary size cap.
    #[arg(long)]
    pub max_features: Option<usize>,
    /// Only with --format messages: stopword file.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Only with --format messages: also write the vocabulary here.
    #[arg(long)]
    pub vocab_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Data to classify.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Sparse)]
    pub format: FormatArg,
    /// Vocabulary file; required with --format messages.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Stopword file used with --format messages.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Where to write the predictions CSV.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Predictions CSV written by `predict`.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Labeled data to evaluate against (joined on sample id).
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Sparse)]
    pub format: FormatArg,
    /// Also write the confusion counts as CSV.
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Predictions CSV written by `predict`.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Ranking key.
    #[arg(long, value_enum, default_value_t = RankKeyArg::Total)]
    pub by: RankKeyArg,
    /// Keep only the first N rows.
    #[arg(long)]
    pub top: Option<usize>,
    /// Also write the ranking as CSV.
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
}

fn load_stopwords(path: &Option<PathBuf>) -> Result<StopwordList, CliError> {
    match path {
        Some(path) => {
            StopwordList::from_file(path).map_err(|e| CliError::file(path, e.to_string()))
        }
        None => Ok(StopwordList::default()),
    }
}

fn tokenized_docs(messages: &[Message], stops: &StopwordList) -> Vec<Vec<String>> {
    messages
        .iter()
        .map(|m| remove_stopwords(&tokenize(&m.text), stops))
        .collect()
}

/// Turns labeled messages into a dataset over `vocab`. Unlabeled rows are
/// rejected: a training file must carry classes.
fn dataset_from_messages(
    path: &Path,
    messages: &[Message],
    docs: &[Vec<String>],
    vocab: &Vocabulary,
) -> Result<Dataset, CliError> {
    let samples = messages
        .iter()
        .zip(docs)
        .map(|(message, doc)| {
            let label = message.label.ok_or_else(|| {
                CliError::parse(
                    path,
                    message.id as usize + 1,
                    "unlabeled message (label `?`) cannot enter a training set",
                )
            })?;
            Ok(LabeledSample::new(message.id, vectorize(doc, vocab), label))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Dataset::new(vocab.len(), samples)?)
}

pub fn run_vectorize(args: &VectorizeArgs) -> Result<(), CliError> {
    let messages = read_messages(&args.input)?;
    if messages.is_empty() {
        return Err(CliError::file(&args.input, "no messages to vectorize"));
    }
    let stops = load_stopwords(&args.stopwords)?;
    let docs = tokenized_docs(&messages, &stops);
    let vocab = build_vocabulary(&docs, args.min_df, args.max_features)?;
    let data = dataset_from_messages(&args.input, &messages, &docs, &vocab)?;
    save_vocabulary(&args.vocab_out, &vocab)?;
    write_sparse(&args.data_out, &data)?;
    println!(
        "vectorized {} messages into {} features",
        messages.len(),
        vocab.len()
    );
    Ok(())
}

fn build_cascade_config(args: &TrainArgs) -> Result<CascadeConfig, CliError> {
    if args.gamma < 0.0 || !args.gamma.is_finite() {
        return Err(CliError::Usage(format!(
            "--gamma must be a non-negative finite number, got {}",
            args.gamma
        )));
    }
    let kernel = match args.kernel {
        KernelArg::Linear => {
            if args.rbf_gamma.is_some() {
                return Err(CliError::Usage(
                    "--rbf-gamma only applies with --kernel rbf".into(),
                ));
            }
            KernelSpec::Linear
        }
        KernelArg::Rbf => KernelSpec::Rbf {
            gamma: args
                .rbf_gamma
                .ok_or_else(|| CliError::Usage("--kernel rbf requires --rbf-gamma".into()))?,
        },
    };
    let config = CascadeConfig {
        num_partitions: args.partitions,
        risk_tolerance: args.gamma,
        max_iterations: args.max_iterations,
        solver: SolverConfig {
            c: args.c,
            kernel,
            kkt_tolerance: args.kkt_tolerance,
            max_passes: args.max_passes,
            seed: args.seed,
        },
        risk_loss: match args.loss {
            LossArg::ZeroOne => Loss::ZeroOne,
            LossArg::Hinge => Loss::Hinge,
        },
        partition_strategy: match args.strategy {
            StrategyArg::Stratified => PartitionStrategy::Stratified,
            StrategyArg::RoundRobin => PartitionStrategy::RoundRobin,
        },
        seed: args.seed,
        workers: args.workers,
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

fn load_training_data(args: &TrainArgs) -> Result<Dataset, CliError> {
    match args.format {
        FormatArg::Sparse => {
            for (flag, set) in [
                ("--min-df", args.min_df.is_some()),
                ("--max-features", args.max_features.is_some()),
                ("--stopwords", args.stopwords.is_some()),
                ("--vocab-out", args.vocab_out.is_some()),
            ] {
                if set {
                    return Err(CliError::Usage(format!(
                        "{flag} only applies with --format messages"
                    )));
                }
            }
            read_sparse(&args.input)
        }
        FormatArg::Messages => {
            let messages = read_messages(&args.input)?;
            if messages.is_empty() {
                return Err(CliError::file(&args.input, "no messages to train on"));
            }
            let stops = load_stopwords(&args.stopwords)?;
            let docs = tokenized_docs(&messages, &stops);
            let vocab = build_vocabulary(&docs, args.min_df.unwrap_or(2), args.max_features)?;
            let data = dataset_from_messages(&args.input, &messages, &docs, &vocab)?;
            if let Some(vocab_out) = &args.vocab_out {
                save_vocabulary(vocab_out, &vocab)?;
            }
            Ok(data)
        }
    }
}

fn describe_cascade(model: &SvmModel, status: CascadeStatus, iterations: usize, risk: f64) -> String {
    let status = match status {
        CascadeStatus::Converged => "converged",
        CascadeStatus::MaxIterationsReached => "did not converge",
    };
    format!(
        "{status} after {iterations} iteration(s); final risk {risk:.6}; {} support vectors",
        model.num_support_vectors()
    )
}

pub fn run_train(args: &TrainArgs) -> Result<(), CliError> {
    let config = build_cascade_config(args)?;
    let data = load_training_data(args)?;
    if data.is_empty() {
        return Err(CliError::file(&args.input, "no training samples"));
    }

    if args.multiclass {
        let classes: Vec<i32> = data.class_counts().keys().copied().collect();
        if classes.len() < 2 {
            return Err(CliError::Usage(format!(
                "--multiclass needs at least 2 classes, found {classes:?}"
            )));
        }
        let model = train_multiclass(&data, &classes, |binary| {
            train_cascade(binary, &config).map(|(model, state)| {
                for warning in &state.warnings {
                    eprintln!("warning: {warning}");
                }
                model
            })
        })?;
        save_multiclass_model(&args.model_out, &model)?;
        println!(
            "trained one-vs-rest model over classes {classes:?}; written to {}",
            args.model_out.display()
        );
    } else {
        let (model, state) = train_cascade(&data, &config)?;
        for warning in &state.warnings {
            eprintln!("warning: {warning}");
        }
        let risk = *state.risk_history.last().expect("at least one iteration");
        println!(
            "{}",
            describe_cascade(&model, state.status, state.iterations, risk)
        );
        save_binary_model(&args.model_out, &model)?;
        println!("model written to {}", args.model_out.display());
    }
    Ok(())
}

enum PredictInput {
    Sparse(Dataset),
    Messages(Vec<Message>, Vec<Vec<String>>, Vocabulary),
}

fn classify(
    model: &LoadedModel,
    features: &polarity_core::SparseVector,
) -> Result<i32, CliError> {
    Ok(match model {
        LoadedModel::Binary(m) => m.predict(features)?,
        LoadedModel::Multiclass(m) => m.predict(features)?,
    })
}

pub fn run_predict(args: &PredictArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let input = match args.format {
        FormatArg::Sparse => {
            if args.vocab.is_some() {
                return Err(CliError::Usage(
                    "--vocab only applies with --format messages".into(),
                ));
            }
            PredictInput::Sparse(read_sparse(&args.input)?)
        }
        FormatArg::Messages => {
            let vocab_path = args
                .vocab
                .as_ref()
                .ok_or_else(|| CliError::Usage("--format messages requires --vocab".into()))?;
            let vocab = load_vocabulary(vocab_path)?;
            let messages = read_messages(&args.input)?;
            let stops = load_stopwords(&args.stopwords)?;
            let docs = tokenized_docs(&messages, &stops);
            PredictInput::Messages(messages, docs, vocab)
        }
    };

    // Align feature spaces: growing either side with zero features is exact.
    let data_dimension = match &input {
        PredictInput::Sparse(data) => data.dimension(),
        PredictInput::Messages(_, _, vocab) => vocab.len(),
    };
    let dimension = model.dimension().max(data_dimension);
    let model = match model {
        LoadedModel::Binary(m) => LoadedModel::Binary(m.with_dimension(dimension)?),
        LoadedModel::Multiclass(m) => LoadedModel::Multiclass(m.with_dimension(dimension)?),
    };

    let mut rows = Vec::new();
    match &input {
        PredictInput::Sparse(data) => {
            for sample in data.iter() {
                let features = sample.features.with_dimension(dimension)?;
                rows.push(PredictionRow {
                    id: sample.id,
                    entity_key: String::new(),
                    predicted: classify(&model, &features)?,
                });
            }
        }
        PredictInput::Messages(messages, docs, vocab) => {
            for (message, doc) in messages.iter().zip(docs) {
                let features = vectorize(doc, vocab).with_dimension(dimension)?;
                rows.push(PredictionRow {
                    id: message.id,
                    entity_key: message.entity_key.clone(),
                    predicted: classify(&model, &features)?,
                });
            }
        }
    }
    write_predictions(&args.output, &rows)?;
    println!("wrote {} predictions to {}", rows.len(), args.output.display());
    Ok(())
}

pub fn run_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let predictions = read_predictions(&args.predictions)?;
    if predictions.is_empty() {
        return Err(CliError::file(&args.predictions, "no predictions to evaluate"));
    }
    let labels: std::collections::BTreeMap<u64, Option<i32>> = match args.format {
        FormatArg::Sparse => read_sparse(&args.labels)?
            .iter()
            .map(|s| (s.id, Some(s.label)))
            .collect(),
        FormatArg::Messages => read_messages(&args.labels)?
            .iter()
            .map(|m| (m.id, m.label))
            .collect(),
    };

    let mut actual = Vec::with_capacity(predictions.len());
    let mut predicted = Vec::with_capacity(predictions.len());
    for row in &predictions {
        let label = labels
            .get(&row.id)
            .ok_or_else(|| {
                CliError::file(
                    &args.labels,
                    format!("no sample with id {} (needed by predictions)", row.id),
                )
            })?
            .ok_or_else(|| {
                CliError::file(
                    &args.labels,
                    format!("sample {} is unlabeled; cannot evaluate against it", row.id),
                )
            })?;
        actual.push(label);
        predicted.push(row.predicted);
    }

    let classes: Vec<i32> = actual
        .iter()
        .chain(predicted.iter())
        .copied()
        .collect::<BTreeSet<i32>>()
        .into_iter()
        .collect();
    let cm = ConfusionMatrix::from_labels(&actual, &predicted, &classes)?;
    print!("{cm}");
    println!();
    print!("{}", render_percent_matrix(&cm));
    println!("accuracy: {:.4}", cm.accuracy()?);
    if let Some(csv_out) = &args.csv_out {
        write_confusion_csv(csv_out, &cm)?;
    }
    Ok(())
}

pub fn run_rank(args: &RankArgs) -> Result<(), CliError> {
    let predictions = read_predictions(&args.predictions)?;
    let pairs: Vec<(String, i32)> = predictions
        .iter()
        .map(|row| (row.entity_key.clone(), row.predicted))
        .collect();
    let entities = aggregate_entities(&pairs);
    if entities.is_empty() {
        return Err(CliError::file(
            &args.predictions,
            "no entity keys in predictions; rank needs entity-attributed data",
        ));
    }
    let classes: Vec<i32> = pairs
        .iter()
        .map(|&(_, class)| class)
        .collect::<BTreeSet<i32>>()
        .into_iter()
        .collect();
    let key = match args.by {
        RankKeyArg::Total => RankBy::Total,
        RankKeyArg::Positive => RankBy::ClassRatio(1),
        RankKeyArg::Negative => RankBy::ClassRatio(-1),
        RankKeyArg::Neutral => RankBy::ClassRatio(0),
    };
    let mut ranked = rank_entities(entities, key);
    if let Some(top) = args.top {
        ranked.truncate(top);
    }
    print!("{}", render_ranking(&ranked, &classes));
    if let Some(csv_out) = &args.csv_out {
        write_ranking_csv(csv_out, &ranked, &classes)?;
    }
    Ok(())
}


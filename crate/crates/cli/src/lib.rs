//! Command-line driver for the polarity pipeline:
//! ingest -> vectorize -> train -> predict -> evaluate -> rank.
//!
//! Every command is deterministic: all randomness flows from `--seed`, so
//! identical invocations produce identical output files.

pub mod commands;
pub mod error;
pub mod formats;
pub mod persist;
pub mod table;

use clap::{Parser, Subcommand};

use commands::{EvaluateArgs, PredictArgs, RankArgs, TrainArgs, VectorizeArgs};

#[derive(Debug, Parser)]
#[command(
    name = "polarity",
    version,
    about = "Cascade SVM training and polarity classification over TF-IDF text"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn a messages TSV into a vocabulary and a sparse dataset.
    Vectorize(VectorizeArgs),
    /// Train a (cascade) SVM model on labeled data.
    Train(TrainArgs),
    /// Classify data with a trained model, writing a predictions CSV.
    Predict(PredictArgs),
    /// Compare predictions against labels: confusion matrix and accuracy.
    Evaluate(EvaluateArgs),
    /// Aggregate predictions per entity and rank by polarity.
    Rank(RankArgs),
}

/// Parses arguments and runs the chosen command. Returns the process exit
/// code: 0 on success, 2 for usage errors, 1 otherwise. Diagnostics go to
/// stderr as a single line.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Vectorize(args) => commands::run_vectorize(args),
        Command::Train(args) => commands::run_train(args),
        Command::Predict(args) => commands::run_predict(args),
        Command::Evaluate(args) => commands::run_evaluate(args),
        Command::Rank(args) => commands::run_rank(args),
    };
    match result {
        Ok(()) => 0,
        Err(error) => {
            eprintln!("error: {error}");
            error.exit_code()
        }
    }
}

//! End-to-end runs of the `polarity` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_polarity")
}

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy_corpus.tsv")
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(path: &Path) -> String {
    path.to_str().expect("utf-8 path").to_string()
}

#[test]
fn full_pipeline_runs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = path_str(&corpus());

    let mut rank_outputs = Vec::new();
    for round in 0..2 {
        let vocab = path_str(&dir.path().join(format!("vocab{round}.txt")));
        let data = path_str(&dir.path().join(format!("data{round}.svm")));
        let model = path_str(&dir.path().join(format!("model{round}.txt")));
        let pred = path_str(&dir.path().join(format!("pred{round}.csv")));

        let out = run(&[
            "vectorize",
            "--input",
            &corpus,
            "--vocab-out",
            &vocab,
            "--data-out",
            &data,
        ]);
        assert!(out.status.success(), "vectorize: {:?}", out);

        let out = run(&[
            "train",
            "--input",
            &data,
            "--model-out",
            &model,
            "--partitions",
            "4",
            "--gamma",
            "0.001",
            "--multiclass",
            "--workers",
            "2",
            "--seed",
            "9",
        ]);
        assert!(out.status.success(), "train: {:?}", out);

        let out = run(&[
            "predict",
            "--model",
            &model,
            "--input",
            &corpus,
            "--format",
            "messages",
            "--vocab",
            &vocab,
            "--output",
            &pred,
        ]);
        assert!(out.status.success(), "predict: {:?}", out);

        let out = run(&[
            "evaluate",
            "--predictions",
            &pred,
            "--labels",
            &corpus,
            "--format",
            "messages",
        ]);
        assert!(out.status.success(), "evaluate: {:?}", out);
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(stdout.contains("accuracy:"), "{stdout}");

        let out = run(&["rank", "--predictions", &pred, "--by", "positive"]);
        assert!(out.status.success(), "rank: {:?}", out);
        rank_outputs.push(String::from_utf8(out.stdout).unwrap());
    }

    assert_eq!(
        rank_outputs[0], rank_outputs[1],
        "identical seeded runs must produce identical rankings"
    );

    // Prediction files are byte-identical across the two runs.
    let a = std::fs::read(dir.path().join("pred0.csv")).unwrap();
    let b = std::fs::read(dir.path().join("pred1.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn binary_training_on_sparse_file_works() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("tiny.svm");
    std::fs::write(
        &data,
        "-1 0:0.1\n-1 0:0.4\n1 0:2.4\n1 0:2.9\n-1 0:0.2 1:0.3\n1 0:2.5 1:0.9\n",
    )
    .unwrap();
    let model = dir.path().join("model.txt");
    let out = run(&[
        "train",
        "--input",
        &path_str(&data),
        "--model-out",
        &path_str(&model),
        "--partitions",
        "2",
    ]);
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("support vectors"), "{stdout}");

    let pred = dir.path().join("pred.csv");
    let out = run(&[
        "predict",
        "--model",
        &path_str(&model),
        "--input",
        &path_str(&data),
        "--output",
        &path_str(&pred),
    ]);
    assert!(out.status.success(), "{out:?}");

    let out = run(&[
        "evaluate",
        "--predictions",
        &path_str(&pred),
        "--labels",
        &path_str(&data),
    ]);
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("accuracy: 1.0000"), "{stdout}");
}

#[test]
fn usage_errors_exit_2_before_any_computation() {
    let out = run(&[
        "train",
        "--input",
        "/nonexistent.svm",
        "--model-out",
        "/tmp/never.txt",
        "--gamma",
        "-0.5",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("--gamma"), "{stderr}");

    let out = run(&["train", "--unknown-flag"]);
    assert_eq!(out.status.code(), Some(2), "unknown flags are usage errors");

    // Invalid combination: sparse input with messages-only flags.
    let out = run(&[
        "train",
        "--input",
        "/nonexistent.svm",
        "--model-out",
        "/tmp/never.txt",
        "--min-df",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn runtime_errors_exit_1_with_one_line_diagnostic() {
    let out = run(&[
        "predict",
        "--model",
        "/nonexistent-model.txt",
        "--input",
        "/nonexistent.svm",
        "--output",
        "/tmp/never.csv",
    ]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "one-line diagnostic: {stderr}");
    assert!(stderr.starts_with("error: "), "{stderr}");
}

#[test]
fn parse_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.svm");
    std::fs::write(&data, "1 0:1\n1 3:1 0:1\n").unwrap();
    let out = run(&[
        "train",
        "--input",
        &path_str(&data),
        "--model-out",
        &path_str(&dir.path().join("m.txt")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("bad.svm:2"), "{stderr}");
}

#[test]
fn rank_orders_by_requested_key() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("pred.csv");
    std::fs::write(
        &pred,
        "id,entity_key,predicted\n0,a,1\n1,a,-1\n2,b,1\n3,b,1\n4,c,-1\n",
    )
    .unwrap();
    let out = run(&["rank", "--predictions", &path_str(&pred), "--by", "positive"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let entity_column: Vec<&str> = stdout
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(entity_column, vec!["b", "a", "c"]);

    let out = run(&["rank", "--predictions", &path_str(&pred), "--by", "total", "--top", "1"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 2, "header plus one row: {stdout}");
}

#[test]
fn unlabeled_messages_are_rejected_at_vectorize_time() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("unlabeled.tsv");
    std::fs::write(&corpus, "uniA\t1\tgüzel kampüs güzel\nuniB\t?\tders kayıt\n").unwrap();
    let out = run(&[
        "vectorize",
        "--input",
        &path_str(&corpus),
        "--vocab-out",
        &path_str(&dir.path().join("v.txt")),
        "--data-out",
        &path_str(&dir.path().join("d.svm")),
        "--min-df",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("unlabeled.tsv:2"), "{stderr}");
}

//! Input and output file formats.
//!
//! Messages: UTF-8 TSV, one record per line, `entity_key<TAB>label<TAB>text`
//! with label in {-1, 0, 1} or `?` for unlabeled.
//!
//! Sparse samples: one per line, `label idx:val idx:val ...` with 0-based
//! ascending indices.
//!
//! Predictions: CSV with header `id,entity_key,predicted`.
//!
//! Ids are assigned in file order; malformed lines are rejected with their
//! line number.

use std::fs;
use std::path::Path;

use polarity_core::{Dataset, LabeledSample, Message, SparseVector};

use crate::error::CliError;

pub fn read_messages(path: &Path) -> Result<Vec<Message>, CliError> {
    let contents = fs::read_to_string(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let mut messages = Vec::new();
    for (index, line) in contents.lines().enumerate() {
        let line_no = index + 1;
        let mut fields = line.splitn(3, '\t');
        let entity_key = fields.next().unwrap_or_default();
        let label_field = fields.next().ok_or_else(|| {
            CliError::parse(path, line_no, "expected entity_key<TAB>label<TAB>text")
        })?;
        let text = fields.next().ok_or_else(|| {
            CliError::parse(path, line_no, "expected entity_key<TAB>label<TAB>text")
        })?;
        let label = match label_field {
            "?" => None,
            "-1" => Some(-1),
            "0" => Some(0),
            "1" => Some(1),
            other => {
                return Err(CliError::parse(
                    path,
                    line_no,
                    format!("label must be -1, 0, 1 or ?, got {other:?}"),
                ))
            }
        };
        if text.trim().is_empty() {
            return Err(CliError::parse(path, line_no, "message text is empty"));
        }
        messages.push(Message {
            id: index as u64,
            entity_key: entity_key.to_string(),
            text: text.to_string(),
            label,
        });
    }
    Ok(messages)
}

pub fn read_sparse(path: &Path) -> Result<Dataset, CliError> {
    let contents = fs::read_to_string(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let mut raw: Vec<(i32, Vec<(usize, f64)>)> = Vec::new();
    let mut dimension = 0usize;
    for (index, line) in contents.lines().enumerate() {
        let line_no = index + 1;
        let mut tokens = line.split_whitespace();
        let label: i32 = tokens
            .next()
            .ok_or_else(|| CliError::parse(path, line_no, "empty line"))?
            .parse()
            .map_err(|_| CliError::parse(path, line_no, "label is not an integer"))?;
        let mut entries = Vec::new();
        let mut previous: Option<usize> = None;
        for token in tokens {
            let (idx_str, val_str) = token.split_once(':').ok_or_else(|| {
                CliError::parse(path, line_no, format!("expected idx:val, got {token:?}"))
            })?;
            let idx: usize = idx_str.parse().map_err(|_| {
                CliError::parse(path, line_no, format!("feature index {idx_str:?} is not an integer"))
            })?;
            let val: f64 = val_str.parse().map_err(|_| {
                CliError::parse(path, line_no, format!("feature value {val_str:?} is not a number"))
            })?;
            if !val.is_finite() {
                return Err(CliError::parse(path, line_no, "feature value is not finite"));
            }
            if previous.is_some_and(|p| idx <= p) {
                return Err(CliError::parse(path, line_no, "feature indices not ascending"));
            }
            previous = Some(idx);
            dimension = dimension.max(idx + 1);
            entries.push((idx, val));
        }
        raw.push((label, entries));
    }
    let samples = raw
        .into_iter()
        .enumerate()
        .map(|(id, (label, entries))| {
            let features = SparseVector::new(dimension, entries)?;
            Ok(LabeledSample::new(id as u64, features, label))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Dataset::new(dimension, samples)?)
}

pub fn write_sparse(path: &Path, data: &Dataset) -> Result<(), CliError> {
    let mut out = String::new();
    for sample in data.iter() {
        out.push_str(&sample.label.to_string());
        for (index, value) in sample.features.iter() {
            out.push_str(&format!(" {index}:{value}"));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::file(path, e.to_string()))
}

/// One row of a predictions file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRow {
    pub id: u64,
    pub entity_key: String,
    pub predicted: i32,
}

pub fn write_predictions(path: &Path, rows: &[PredictionRow]) -> Result<(), CliError> {
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| CliError::file(path, e.to_string()))?;
    writer
        .write_record(["id", "entity_key", "predicted"])
        .map_err(|e| CliError::file(path, e.to_string()))?;
    for row in rows {
        writer
            .write_record([
                row.id.to_string(),
                row.entity_key.clone(),
                row.predicted.to_string(),
            ])
            .map_err(|e| CliError::file(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::file(path, e.to_string()))
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRow>, CliError> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::file(path, e.to_string()))?;
    if headers != vec!["id", "entity_key", "predicted"] {
        return Err(CliError::file(
            path,
            format!("expected header id,entity_key,predicted, got {headers:?}"),
        ));
    }
    let mut rows = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let line_no = index + 2; // header is line 1
        let record = record.map_err(|e| CliError::parse(path, line_no, e.to_string()))?;
        if record.len() != 3 {
            return Err(CliError::parse(path, line_no, "expected 3 fields"));
        }
        let id: u64 = record[0]
            .parse()
            .map_err(|_| CliError::parse(path, line_no, "id is not an integer"))?;
        let predicted: i32 = record[2]
            .parse()
            .map_err(|_| CliError::parse(path, line_no, "predicted is not an integer"))?;
        rows.push(PredictionRow {
            id,
            entity_key: record[1].to_string(),
            predicted,
        });
    }
    Ok(rows)
}

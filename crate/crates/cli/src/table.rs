//! Aligned plain-text tables and CSV renderings for evaluation output.

use std::path::Path;

use polarity_core::{ConfusionMatrix, EntityPolarity};

use crate::error::CliError;

fn render_rows(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut first = true;
        for (i, cell) in row.iter().enumerate() {
            if !first {
                out.push_str("  ");
            }
            out.push_str(&format!("{cell:>width$}", width = widths[i]));
            first = false;
        }
        out.push('\n');
    }
    out
}

/// Confusion matrix as percentages of the grand total (two decimals,
/// half-up), in the style of published polarity tables.
pub fn render_percent_matrix(cm: &ConfusionMatrix) -> String {
    let percentages = cm.percentages();
    let mut rows = Vec::new();
    let mut header = vec![String::new()];
    header.extend(cm.classes().iter().map(|c| format!("pred {c}")));
    rows.push(header);
    for (i, &class) in cm.classes().iter().enumerate() {
        let mut row = vec![format!("actual {class}")];
        row.extend(percentages[i].iter().map(|p| format!("{p:.2}%")));
        rows.push(row);
    }
    render_rows(&rows)
}

pub fn write_confusion_csv(path: &Path, cm: &ConfusionMatrix) -> Result<(), CliError> {
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let mut header = vec!["actual".to_string()];
    header.extend(cm.classes().iter().map(|c| format!("pred_{c}")));
    writer
        .write_record(&header)
        .map_err(|e| CliError::file(path, e.to_string()))?;
    for (i, &class) in cm.classes().iter().enumerate() {
        let mut row = vec![class.to_string()];
        row.extend(cm.counts()[i].iter().map(u64::to_string));
        writer
            .write_record(&row)
            .map_err(|e| CliError::file(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::file(path, e.to_string()))
}

/// Entity polarity ranking as an aligned table: one row per entity with
/// per-class counts and shares.
pub fn render_ranking(entities: &[EntityPolarity], classes: &[i32]) -> String {
    let mut rows = Vec::new();
    let mut header = vec!["rank".to_string(), "entity".to_string(), "total".to_string()];
    for &class in classes {
        header.push(format!("count[{class}]"));
        header.push(format!("share[{class}]"));
    }
    rows.push(header);
    for (position, entity) in entities.iter().enumerate() {
        let mut row = vec![
            (position + 1).to_string(),
            entity.entity_key.clone(),
            entity.total.to_string(),
        ];
        for &class in classes {
            row.push(entity.count(class).to_string());
            row.push(format!("{:.4}", entity.ratio(class)));
        }
        rows.push(row);
    }
    render_rows(&rows)
}

pub fn write_ranking_csv(
    path: &Path,
    entities: &[EntityPolarity],
    classes: &[i32],
) -> Result<(), CliError> {
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let mut header = vec!["rank".to_string(), "entity".to_string(), "total".to_string()];
    for &class in classes {
        header.push(format!("count_{class}"));
        header.push(format!("share_{class}"));
    }
    writer
        .write_record(&header)
        .map_err(|e| CliError::file(path, e.to_string()))?;
    for (position, entity) in entities.iter().enumerate() {
        let mut row = vec![
            (position + 1).to_string(),
            entity.entity_key.clone(),
            entity.total.to_string(),
        ];
        for &class in classes {
            row.push(entity.count(class).to_string());
            row.push(format!("{:.4}", entity.ratio(class)));
        }
        writer
            .write_record(&row)
            .map_err(|e| CliError::file(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::file(path, e.to_string()))
}

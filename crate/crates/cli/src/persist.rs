//! Versioned textual persistence for models and vocabularies.
//!
//! Real numbers are written with Rust's shortest round-trip formatting,
//! so `load . save` recovers every field bit-exactly.

use std::fs;
use std::path::Path;

use polarity_core::{KernelSpec, LabeledSample, MulticlassModel, SparseVector, SvmModel, Vocabulary};

use crate::error::CliError;

const MODEL_HEADER: &str = "polarity model v1";
const VOCAB_HEADER: &str = "polarity vocab v1";

/// A persisted model: plain binary or one-vs-rest multiclass.
#[derive(Debug, Clone)]
pub enum LoadedModel {
    Binary(SvmModel),
    Multiclass(MulticlassModel),
}

impl LoadedModel {
    pub fn dimension(&self) -> usize {
        match self {
            LoadedModel::Binary(m) => m.dimension(),
            LoadedModel::Multiclass(m) => m.dimension(),
        }
    }
}

fn push_binary_body(out: &mut String, model: &SvmModel) {
    match model.kernel() {
        KernelSpec::Linear => out.push_str("kernel linear\n"),
        KernelSpec::Rbf { gamma } => out.push_str(&format!("kernel rbf {gamma}\n")),
    }
    out.push_str(&format!("c {}\n", model.c()));
    out.push_str(&format!("dimension {}\n", model.dimension()));
    out.push_str(&format!("bias {}\n", model.bias()));
    out.push_str(&format!("svs {}\n", model.num_support_vectors()));
    for (sample, &alpha) in model.support_samples().iter().zip(model.alphas()) {
        out.push_str(&format!("{} {} {}", sample.id, sample.label, alpha));
        for (index, value) in sample.features.iter() {
            out.push_str(&format!(" {index}:{value}"));
        }
        out.push('\n');
    }
}

pub fn save_binary_model(path: &Path, model: &SvmModel) -> Result<(), CliError> {
    let mut out = format!("{MODEL_HEADER}\nkind binary\n");
    push_binary_body(&mut out, model);
    fs::write(path, out).map_err(|e| CliError::file(path, e.to_string()))
}

pub fn save_multiclass_model(path: &Path, model: &MulticlassModel) -> Result<(), CliError> {
    let mut out = format!("{MODEL_HEADER}\nkind multiclass\n");
    let classes: Vec<String> = model.classes().iter().map(i32::to_string).collect();
    out.push_str(&format!("classes {}\n", classes.join(" ")));
    for (&class, binary) in model.classes().iter().zip(model.per_class_models()) {
        out.push_str(&format!("class {class}\n"));
        push_binary_body(&mut out, binary);
    }
    fs::write(path, out).map_err(|e| CliError::file(path, e.to_string()))
}

/// Line cursor with path-aware diagnostics.
struct Cursor<'a> {
    path: &'a Path,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Result<(usize, &'a str), CliError> {
        self.lines
            .next()
            .map(|(i, line)| (i + 1, line))
            .ok_or_else(|| CliError::file(self.path, "unexpected end of file"))
    }

    /// Next line, which must start with `keyword `; returns the rest.
    fn field(&mut self, keyword: &str) -> Result<(usize, &'a str), CliError> {
        let (line_no, line) = self.next()?;
        match line.strip_prefix(keyword).and_then(|r| r.strip_prefix(' ')) {
            Some(rest) => Ok((line_no, rest)),
            None => Err(CliError::parse(
                self.path,
                line_no,
                format!("expected {keyword:?} line, got {line:?}"),
            )),
        }
    }
}

fn parse_number<T: std::str::FromStr>(
    path: &Path,
    line_no: usize,
    text: &str,
    what: &str,
) -> Result<T, CliError> {
    text.parse()
        .map_err(|_| CliError::parse(path, line_no, format!("{what} is not valid: {text:?}")))
}

fn parse_binary_body(cursor: &mut Cursor) -> Result<SvmModel, CliError> {
    let path = cursor.path;
    let (line_no, kernel_text) = cursor.field("kernel")?;
    let kernel = match kernel_text.split_once(' ') {
        None if kernel_text == "linear" => KernelSpec::Linear,
        Some(("rbf", gamma)) => KernelSpec::Rbf {
            gamma: parse_number(path, line_no, gamma, "rbf gamma")?,
        },
        _ => {
            return Err(CliError::parse(
                path,
                line_no,
                format!("unknown kernel {kernel_text:?}"),
            ))
        }
    };
    let (line_no, c_text) = cursor.field("c")?;
    let c: f64 = parse_number(path, line_no, c_text, "c")?;
    let (line_no, dim_text) = cursor.field("dimension")?;
    let dimension: usize = parse_number(path, line_no, dim_text, "dimension")?;
    let (line_no, bias_text) = cursor.field("bias")?;
    let bias: f64 = parse_number(path, line_no, bias_text, "bias")?;
    let (line_no, count_text) = cursor.field("svs")?;
    let count: usize = parse_number(path, line_no, count_text, "support vector count")?;

    let mut samples = Vec::with_capacity(count);
    let mut alphas = Vec::with_capacity(count);
    for _ in 0..count {
        let (line_no, line) = cursor.next()?;
        let mut tokens = line.split_whitespace();
        let id: u64 = parse_number(
            path,
            line_no,
            tokens.next().unwrap_or_default(),
            "support vector id",
        )?;
        let label: i32 = parse_number(
            path,
            line_no,
            tokens.next().unwrap_or_default(),
            "support vector label",
        )?;
        let alpha: f64 = parse_number(
            path,
            line_no,
            tokens.next().unwrap_or_default(),
            "coefficient",
        )?;
        let mut entries = Vec::new();
        for token in tokens {
            let (idx, val) = token.split_once(':').ok_or_else(|| {
                CliError::parse(path, line_no, format!("expected idx:val, got {token:?}"))
            })?;
            entries.push((
                parse_number::<usize>(path, line_no, idx, "feature index")?,
                parse_number::<f64>(path, line_no, val, "feature value")?,
            ));
        }
        let features = SparseVector::new(dimension, entries)?;
        samples.push(LabeledSample::new(id, features, label));
        alphas.push(alpha);
    }
    Ok(SvmModel::new(samples, alphas, bias, kernel, c, dimension)?)
}

pub fn load_model(path: &Path) -> Result<LoadedModel, CliError> {
    let contents = fs::read_to_string(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let mut cursor = Cursor {
        path,
        lines: contents.lines().enumerate(),
    };
    let (_, header) = cursor.next()?;
    if header != MODEL_HEADER {
        return Err(CliError::file(
            path,
            format!("expected header {MODEL_HEADER:?}, got {header:?}"),
        ));
    }
    let (line_no, kind) = cursor.field("kind")?;
    match kind {
        "binary" => Ok(LoadedModel::Binary(parse_binary_body(&mut cursor)?)),
        "multiclass" => {
            let (line_no, classes_text) = cursor.field("classes")?;
            let classes = classes_text
                .split_whitespace()
                .map(|t| parse_number::<i32>(path, line_no, t, "class code"))
                .collect::<Result<Vec<_>, _>>()?;
            let mut models = Vec::with_capacity(classes.len());
            for &class in &classes {
                let (line_no, found) = cursor.field("class")?;
                let found: i32 = parse_number(path, line_no, found, "class code")?;
                if found != class {
                    return Err(CliError::parse(
                        path,
                        line_no,
                        format!("expected class {class}, found {found}"),
                    ));
                }
                models.push(parse_binary_body(&mut cursor)?);
            }
            Ok(LoadedModel::Multiclass(MulticlassModel::new(
                classes, models,
            )?))
        }
        other => Err(CliError::parse(
            path,
            line_no,
            format!("unknown model kind {other:?}"),
        )),
    }
}

pub fn save_vocabulary(path: &Path, vocab: &Vocabulary) -> Result<(), CliError> {
    let mut out = format!("{VOCAB_HEADER}\n");
    out.push_str(&format!("docs {}\n", vocab.num_docs()));
    out.push_str(&format!("terms {}\n", vocab.len()));
    for (index, term) in vocab.terms().iter().enumerate() {
        let df = vocab.doc_freq(index).expect("index in range");
        out.push_str(&format!("{term}\t{df}\n"));
    }
    fs::write(path, out).map_err(|e| CliError::file(path, e.to_string()))
}

pub fn load_vocabulary(path: &Path) -> Result<Vocabulary, CliError> {
    let contents = fs::read_to_string(path).map_err(|e| CliError::file(path, e.to_string()))?;
    let mut cursor = Cursor {
        path,
        lines: contents.lines().enumerate(),
    };
    let (_, header) = cursor.next()?;
    if header != VOCAB_HEADER {
        return Err(CliError::file(
            path,
            format!("expected header {VOCAB_HEADER:?}, got {header:?}"),
        ));
    }
    let (line_no, docs_text) = cursor.field("docs")?;
    let num_docs: usize = parse_number(path, line_no, docs_text, "document count")?;
    let (line_no, terms_text) = cursor.field("terms")?;
    let count: usize = parse_number(path, line_no, terms_text, "term count")?;
    let mut terms = Vec::with_capacity(count);
    let mut doc_freq = Vec::with_capacity(count);
    for _ in 0..count {
        let (line_no, line) = cursor.next()?;
        let (term, df) = line.split_once('\t').ok_or_else(|| {
            CliError::parse(path, line_no, "expected term<TAB>document-frequency")
        })?;
        terms.push(term.to_string());
        doc_freq.push(parse_number::<usize>(path, line_no, df, "document frequency")?);
    }
    Ok(Vocabulary::from_parts(terms, doc_freq, num_docs)?)
}

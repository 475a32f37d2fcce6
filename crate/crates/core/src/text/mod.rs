//! Text-to-feature pipeline: tokenization, stopword filtering, vocabulary
//! construction with document-frequency selection, and TF-IDF weighting.

mod stopwords;

pub use stopwords::{remove_stopwords, StopwordList, DEFAULT_STOPWORDS};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::CoreError;
use crate::sparse::SparseVector;

/// A raw ingested message: stable id, the entity it talks about (may be
/// empty), the text, and an optional class code.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub id: u64,
    pub entity_key: String,
    pub text: String,
    pub label: Option<i32>,
}

/// Lowercases with Turkish dotted/dotless i handling: 'İ' folds to 'i'
/// and 'I' folds to 'ı' (the Unicode default would produce "i\u{307}").
pub fn fold_lowercase(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            'İ' => out.push('i'),
            'I' => out.push('ı'),
            _ => out.extend(c.to_lowercase()),
        }
    }
    out
}

fn is_url(word: &str) -> bool {
    let lower = word.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.")
}

/// Splits text into normalized tokens.
///
/// Whitespace-delimited words that are URLs or @mentions are dropped
/// whole; a leading '#' is stripped so the tag body survives. What
/// remains is folded to lowercase and split on every non-alphanumeric
/// character; empty pieces and single-character pieces are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        if is_url(word) || word.starts_with('@') {
            continue;
        }
        let word = word.strip_prefix('#').unwrap_or(word);
        let folded = fold_lowercase(word);
        for piece in folded.split(|c: char| !c.is_alphanumeric()) {
            if piece.chars().count() >= 2 {
                tokens.push(piece.to_string());
            }
        }
    }
    tokens
}

/// An indexed term list with per-term document frequencies.
///
/// Terms are indexed by their position; `index_of` is the exact inverse
/// of that ordering. Document frequencies count documents containing the
/// term, not occurrences.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    term_to_index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    num_docs: usize,
}

impl Vocabulary {
    /// Reassembles a vocabulary from stored parts (used by persistence).
    pub fn from_parts(
        terms: Vec<String>,
        doc_freq: Vec<usize>,
        num_docs: usize,
    ) -> Result<Self, CoreError> {
        if terms.is_empty() {
            return Err(CoreError::EmptyVocabulary);
        }
        if terms.len() != doc_freq.len() {
            return Err(CoreError::LengthMismatch(format!(
                "{} terms vs {} document frequencies",
                terms.len(),
                doc_freq.len()
            )));
        }
        if num_docs == 0 {
            return Err(CoreError::InvalidConfig(
                "vocabulary needs a positive document count".into(),
            ));
        }
        for (term, &df) in terms.iter().zip(&doc_freq) {
            if df == 0 || df > num_docs {
                return Err(CoreError::InvalidConfig(format!(
                    "document frequency {df} for term {term:?} outside 1..={num_docs}"
                )));
            }
        }
        let mut term_to_index = HashMap::with_capacity(terms.len());
        for (index, term) in terms.iter().enumerate() {
            if term_to_index.insert(term.clone(), index).is_some() {
                return Err(CoreError::InvalidConfig(format!("duplicate term {term:?}")));
            }
        }
        Ok(Self {
            terms,
            term_to_index,
            doc_freq,
            num_docs,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.term_to_index.get(term).copied()
    }

    pub fn doc_freq(&self, index: usize) -> Option<usize> {
        self.doc_freq.get(index).copied()
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    /// Inverse document frequency, log10(N / df).
    pub fn idf(&self, index: usize) -> Result<f64, CoreError> {
        match self.doc_freq.get(index) {
            Some(&df) => Ok((self.num_docs as f64 / df as f64).log10()),
            None => Err(CoreError::InvalidTermIndex {
                index,
                size: self.terms.len(),
            }),
        }
    }
}

/// Builds a vocabulary from tokenized documents.
///
/// Terms seen in fewer than `min_df` documents are dropped. When
/// `max_features` is set, the terms with the highest document frequency
/// are kept (ties broken lexicographically). The surviving terms are
/// sorted lexicographically for stable indexing.
pub fn build_vocabulary(
    docs: &[Vec<String>],
    min_df: usize,
    max_features: Option<usize>,
) -> Result<Vocabulary, CoreError> {
    if docs.is_empty() {
        return Err(CoreError::EmptyInput("no documents to index".into()));
    }
    if min_df == 0 {
        return Err(CoreError::InvalidConfig("min_df must be at least 1".into()));
    }
    if max_features == Some(0) {
        return Err(CoreError::InvalidConfig(
            "max_features must be at least 1".into(),
        ));
    }

    let mut doc_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let unique: BTreeSet<&str> = doc.iter().map(String::as_str).collect();
        for term in unique {
            *doc_counts.entry(term).or_insert(0) += 1;
        }
    }

    let mut retained: Vec<(&str, usize)> = doc_counts
        .into_iter()
        .filter(|&(_, df)| df >= min_df)
        .collect();
    if let Some(cap) = max_features {
        if retained.len() > cap {
            // Highest document frequency first; lexicographic order breaks
            // ties (already sorted by term, so a stable sort suffices).
            retained.sort_by(|a, b| b.1.cmp(&a.1));
            retained.truncate(cap);
            retained.sort_by(|a, b| a.0.cmp(b.0));
        }
    }
    if retained.is_empty() {
        return Err(CoreError::EmptyVocabulary);
    }

    let terms: Vec<String> = retained.iter().map(|&(t, _)| t.to_string()).collect();
    let doc_freq: Vec<usize> = retained.iter().map(|&(_, df)| df).collect();
    Vocabulary::from_parts(terms, doc_freq, docs.len())
}

/// Weights a token list into a TF-IDF vector over `vocab`.
///
/// Each in-vocabulary term contributes raw count x idf; out-of-vocabulary
/// tokens are ignored, and zero weights (df == N) stay implicit.
pub fn vectorize(tokens: &[String], vocab: &Vocabulary) -> SparseVector {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for token in tokens {
        if let Some(index) = vocab.index_of(token) {
            *counts.entry(index).or_insert(0) += 1;
        }
    }
    let entries = counts.into_iter().map(|(index, count)| {
        let idf = (vocab.num_docs as f64 / vocab.doc_freq[index] as f64).log10();
        (index, count as f64 * idf)
    });
    SparseVector::new(vocab.len(), entries).expect("in-vocabulary entries are always valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenize_lowercases_and_splits_punctuation() {
        assert_eq!(
            tokenize("Üniversite ÇOK güzel!"),
            toks(&["üniversite", "çok", "güzel"])
        );
    }

    #[test]
    fn tokenize_strips_urls_mentions_and_hashtag_prefix() {
        assert_eq!(tokenize("http://t.co/x @user #kampüs"), toks(&["kampüs"]));
        assert_eq!(tokenize("HTTPS://T.CO/ABC www.site.com @Biri"), Vec::<String>::new());
    }

    #[test]
    fn tokenize_empty_input() {
        assert_eq!(tokenize(""), Vec::<String>::new());
    }

    #[test]
    fn tokenize_drops_single_character_pieces() {
        assert_eq!(tokenize("a bc d ef"), toks(&["bc", "ef"]));
    }

    #[test]
    fn turkish_dotted_and_dotless_i() {
        assert_eq!(fold_lowercase("İSTANBUL"), "istanbul");
        assert_eq!(fold_lowercase("ISPARTA"), "ısparta");
        assert_eq!(tokenize("İYİ IRMAK"), toks(&["iyi", "ırmak"]));
    }

    #[test]
    fn vocabulary_counts_documents_not_occurrences() {
        let docs = vec![toks(&["a", "b"]), toks(&["a"])];
        let vocab = build_vocabulary(&docs, 1, None).unwrap();
        assert_eq!(vocab.terms(), &["a".to_string(), "b".to_string()]);
        assert_eq!(vocab.doc_freq(0), Some(2));
        assert_eq!(vocab.doc_freq(1), Some(1));
        assert_eq!(vocab.num_docs(), 2);
    }

    #[test]
    fn min_df_threshold_drops_rare_terms() {
        let docs = vec![toks(&["a", "b"]), toks(&["a"])];
        let vocab = build_vocabulary(&docs, 2, None).unwrap();
        assert_eq!(vocab.terms(), &["a".to_string()]);
    }

    #[test]
    fn max_features_ties_break_lexicographically() {
        let docs = vec![toks(&["a"]), toks(&["b"])];
        let vocab = build_vocabulary(&docs, 1, Some(1)).unwrap();
        assert_eq!(vocab.terms(), &["a".to_string()]);
    }

    #[test]
    fn empty_vocabulary_is_an_error() {
        let docs = vec![toks(&["a"])];
        assert!(matches!(
            build_vocabulary(&docs, 2, None),
            Err(CoreError::EmptyVocabulary)
        ));
        assert!(build_vocabulary(&[], 1, None).is_err());
    }

    #[test]
    fn idf_fixed_points() {
        // Term in every document: idf 0. N/df = 10 or 100/10: idf exactly 1.
        let vocab = Vocabulary::from_parts(
            vec!["x".into(), "y".into()],
            vec![4, 4],
            4,
        )
        .unwrap();
        assert_eq!(vocab.idf(0).unwrap(), 0.0);

        let vocab = Vocabulary::from_parts(vec!["x".into()], vec![1], 10).unwrap();
        assert!((vocab.idf(0).unwrap() - 1.0).abs() < 1e-15);

        let vocab = Vocabulary::from_parts(vec!["x".into()], vec![10], 100).unwrap();
        assert!((vocab.idf(0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn idf_invalid_index_is_an_error() {
        let vocab = Vocabulary::from_parts(vec!["x".into()], vec![1], 2).unwrap();
        assert!(matches!(
            vocab.idf(1),
            Err(CoreError::InvalidTermIndex { index: 1, size: 1 })
        ));
    }

    #[test]
    fn idf_nonincreasing_in_document_frequency() {
        let n = 50;
        let mut previous = f64::INFINITY;
        for df in 1..=n {
            let vocab = Vocabulary::from_parts(vec!["x".into()], vec![df], n).unwrap();
            let idf = vocab.idf(0).unwrap();
            assert!(idf >= 0.0);
            assert!(idf <= previous);
            previous = idf;
        }
    }

    #[test]
    fn vectorize_weights_term_counts() {
        // vocab: a has idf 1.0 (df 1 of 10), b has idf log10(10/ (10^0.5))...
        // keep it direct: craft df so idf(a)=1.0 and idf(b)=0.5 exactly is
        // impossible with integer df, so check tf scaling against idf values.
        let docs = vec![toks(&["a", "b"]), toks(&["a"])];
        let vocab = build_vocabulary(&docs, 1, None).unwrap();
        let v = vectorize(&toks(&["a", "a", "b"]), &vocab);
        let idf_a = vocab.idf(0).unwrap();
        let idf_b = vocab.idf(1).unwrap();
        assert_eq!(v.get(0), 2.0 * idf_a);
        assert_eq!(v.get(1), idf_b);
        assert_eq!(v.dimension(), 2);
    }

    #[test]
    fn vectorize_ignores_out_of_vocabulary_tokens() {
        let docs = vec![toks(&["a"]), toks(&["b"])];
        let vocab = build_vocabulary(&docs, 1, None).unwrap();
        let v = vectorize(&toks(&["zzz", "qqq"]), &vocab);
        assert!(v.is_empty());
    }

    #[test]
    fn zero_idf_terms_stay_implicit() {
        let docs = vec![toks(&["a", "b"]), toks(&["a"])];
        let vocab = build_vocabulary(&docs, 1, None).unwrap();
        // "a" appears in every document, so its weight is exactly zero and
        // must not be stored.
        let v = vectorize(&toks(&["a", "b"]), &vocab);
        assert_eq!(v.indices(), &[1]);
    }

    #[test]
    fn four_document_hand_corpus() {
        let docs = vec![
            toks(&["elma", "elma", "armut"]),
            toks(&["elma", "kiraz"]),
            toks(&["armut", "kiraz", "kiraz", "muz"]),
            toks(&["elma", "muz", "muz", "muz"]),
        ];
        let vocab = build_vocabulary(&docs, 1, None).unwrap();
        assert_eq!(
            vocab.terms(),
            &["armut".to_string(), "elma".to_string(), "kiraz".to_string(), "muz".to_string()]
        );
        // Hand-computed log10 weights: idf(armut)=idf(kiraz)=idf(muz)=log10 2,
        // idf(elma)=log10(4/3).
        let log2 = 0.3010299956639812;
        let log43 = 0.12493873660829992;
        let expect = |v: &SparseVector, idx: usize, want: f64| {
            assert!(
                (v.get(idx) - want).abs() < 1e-9,
                "index {idx}: {} vs {want}",
                v.get(idx)
            );
        };
        let v0 = vectorize(&docs[0], &vocab);
        expect(&v0, 0, log2);
        expect(&v0, 1, 2.0 * log43);
        let v2 = vectorize(&docs[2], &vocab);
        expect(&v2, 0, log2);
        expect(&v2, 2, 2.0 * log2);
        expect(&v2, 3, log2);
        let v3 = vectorize(&docs[3], &vocab);
        expect(&v3, 1, log43);
        expect(&v3, 3, 3.0 * log2);
    }

    #[test]
    fn corpus_vectors_stay_inside_vocabulary_support() {
        let docs = vec![
            toks(&["kampüs", "ders", "hoca"]),
            toks(&["ders", "sınav"]),
            toks(&["kampüs", "yemekhane"]),
        ];
        let vocab = build_vocabulary(&docs, 1, None).unwrap();
        for doc in &docs {
            let v = vectorize(doc, &vocab);
            assert!(v.indices().iter().all(|&i| i < vocab.len()));
        }
    }

    #[test]
    fn every_default_stopword_vectorizes_to_nothing() {
        let stops = StopwordList::default();
        let docs = vec![toks(&["kampüs", "güzel"]), toks(&["kampüs"])];
        let vocab = build_vocabulary(&docs, 1, None).unwrap();
        for word in DEFAULT_STOPWORDS {
            let tokens = remove_stopwords(&tokenize(word), &stops);
            let v = vectorize(&tokens, &vocab);
            assert!(v.is_empty(), "stopword {word:?} produced a nonzero vector");
        }
    }

    #[test]
    fn identical_corpora_produce_identical_vocabularies() {
        let docs = vec![
            toks(&["b", "a", "c"]),
            toks(&["c", "a"]),
            toks(&["d", "b"]),
        ];
        let v1 = build_vocabulary(&docs, 1, Some(3)).unwrap();
        let v2 = build_vocabulary(&docs, 1, Some(3)).unwrap();
        assert_eq!(v1, v2);
        for doc in &docs {
            assert_eq!(vectorize(doc, &v1), vectorize(doc, &v2));
        }
    }
}

//! Stopword filtering with a built-in Turkish list.

use std::collections::HashSet;
use std::path::Path;

use crate::error::CoreError;
use crate::text::fold_lowercase;

/// The default Turkish stopword list: function words, pronouns, particles,
/// and number words that carry no polarity signal.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "acaba", "altı", "altmış", "ama", "bana", "bazı", "belki", "ben", "benden", "beni", "benim",
    "beş", "bi", "bin", "bir", "biri", "birkaç", "birkez", "birşey", "birşeyi", "biz", "bizden",
    "bizi", "bizim", "bu", "buna", "bunda", "bundan", "bunu", "bunun", "çok", "çünkü", "da",
    "daha", "dahi", "de", "defa", "diye", "doksan", "dokuz", "dört", "elli", "en", "gibi", "hem",
    "hep", "hepsi", "her", "hiç", "için", "iki", "ile", "ise", "katrilyon", "kez", "kırk", "ki",
    "kim", "kimden", "kime", "kimi", "mı", "milyar", "milyon", "mu", "mü", "nasıl", "ne", "neden",
    "nerde", "nerede", "nereye", "niçin", "niye", "on", "ona", "ondan", "onlar", "onlardan",
    "onların", "onlari", "onu", "otuz", "sanki", "sekiz", "seksen", "sen", "senden", "seni",
    "senin", "siz", "sizden", "sizi", "sizin", "şey", "şeyden", "şeyi", "şeyler", "şu", "şuna",
    "şunda", "şundan", "şunu", "trilyon", "tüm", "üç", "ve", "veya", "ya", "yani", "yedi",
    "yetmiş", "yirmi", "yüz",
];

/// A set of words to drop from token streams. Matching is exact string
/// equality after case folding.
#[derive(Debug, Clone)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::from_words(DEFAULT_STOPWORDS.iter().copied())
    }
}

impl StopwordList {
    /// Builds a list from arbitrary words, folding each to lowercase.
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words = words
            .into_iter()
            .map(|w| fold_lowercase(w.as_ref().trim()))
            .filter(|w| !w.is_empty())
            .collect();
        Self { words }
    }

    /// Loads a list from a UTF-8 file, one word per line. Blank lines are
    /// ignored; words are folded to lowercase.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, CoreError> {
        let contents = std::fs::read_to_string(path)?;
        Ok(Self::from_words(contents.lines()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Order-preserving filter dropping exact members of `stops`.
pub fn remove_stopwords(tokens: &[String], stops: &StopwordList) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stops.contains(t))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_list_has_expected_size() {
        // 114 distinct words once the duplicated entry collapses.
        let stops = StopwordList::default();
        assert_eq!(stops.len(), 114);
    }

    #[test]
    fn removes_known_stopwords_in_order() {
        let stops = StopwordList::default();
        let tokens: Vec<String> = ["bu", "üniversite", "çok", "güzel"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(
            remove_stopwords(&tokens, &stops),
            vec!["üniversite".to_string(), "güzel".to_string()]
        );
    }

    #[test]
    fn empty_input_stays_empty() {
        let stops = StopwordList::default();
        assert!(remove_stopwords(&[], &stops).is_empty());
    }

    #[test]
    fn tokens_without_stopwords_pass_unchanged() {
        let stops = StopwordList::default();
        let tokens: Vec<String> = ["kampüs", "güzel"].iter().map(|s| s.to_string()).collect();
        assert_eq!(remove_stopwords(&tokens, &stops), tokens);
    }

    #[test]
    fn filtering_is_idempotent() {
        let stops = StopwordList::default();
        let tokens: Vec<String> = ["ve", "kampüs", "ama", "ders", "mı"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let once = remove_stopwords(&tokens, &stops);
        let twice = remove_stopwords(&once, &stops);
        assert_eq!(once, twice);
    }

    #[test]
    fn custom_lists_fold_case() {
        let stops = StopwordList::from_words(["ÇOK", "  Ve "]);
        assert!(stops.contains("çok"));
        assert!(stops.contains("ve"));
        assert_eq!(stops.len(), 2);
    }
}

//! Text normalization, stopword handling and the bag-of-terms vocabulary.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::BufRead;

use crate::error::{Error, Result};

pub const DEFAULT_VOCAB_SIZE: usize = 10_000;
pub const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords.txt");

/// True for a whitespace-delimited token that starts with an http(s) scheme.
pub fn is_url_token(token: &str) -> bool {
    let head: String = token.chars().take(8).collect::<String>().to_ascii_lowercase();
    head.starts_with("http://") || head.starts_with("https://")
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

/// Lowercased word tokens.
///
/// URL tokens are dropped first; the remainder is split on every character
/// that is not a letter, digit or apostrophe, so `#` and `@` prefixes fall
/// away. Apostrophes at the edges of a token are trimmed.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace().filter(|t| !is_url_token(t)) {
        for piece in chunk.split(|c: char| !is_word_char(c)) {
            let piece = piece.trim_matches('\'');
            if !piece.is_empty() {
                tokens.push(piece.to_lowercase());
            }
        }
    }
    tokens
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopWords(words.into_iter().map(|w| w.as_ref().trim().to_lowercase()).collect())
    }

    pub fn bundled() -> Self {
        Self::load(BUNDLED_STOPWORDS.as_bytes()).expect("bundled stopwords are readable")
    }

    /// One word per line; blank lines and `#` comments are skipped.
    pub fn load<R: BufRead>(reader: R) -> Result<Self> {
        let mut words = HashSet::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::line(idx + 1, e.to_string()))?;
            let word = line.trim();
            if word.is_empty() || word.starts_with('#') {
                continue;
            }
            words.insert(word.to_lowercase());
        }
        Ok(StopWords(words))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The ordered term axis of the classifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabularyModel {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    stopword_count: usize,
}

impl VocabularyModel {
    /// Wraps an already ranked term list. Later duplicates are ignored.
    pub fn from_terms(terms: Vec<String>, stopword_count: usize) -> Self {
        let mut index = HashMap::with_capacity(terms.len());
        let mut unique = Vec::with_capacity(terms.len());
        for term in terms {
            if !index.contains_key(&term) {
                index.insert(term.clone(), unique.len());
                unique.push(term);
            }
        }
        VocabularyModel {
            terms: unique,
            index,
            stopword_count,
        }
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Vocabulary size D.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn stopword_count(&self) -> usize {
        self.stopword_count
    }
}

/// Keeps the `max_terms` most frequent non-stopword terms, counting every
/// occurrence. Equal counts are ordered lexicographically.
pub fn build_vocabulary<S: AsRef<[String]>>(
    sentences: &[S],
    stopwords: &StopWords,
    max_terms: usize,
) -> Result<VocabularyModel> {
    if max_terms == 0 {
        return Err(Error::Config("vocabulary size must be at least 1".into()));
    }
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for sentence in sentences {
        for token in sentence.as_ref() {
            if !stopwords.contains(token) {
                *counts.entry(token.as_str()).or_insert(0) += 1;
            }
        }
    }
    if counts.is_empty() {
        return Err(Error::Data("corpus has no non-stopword terms".into()));
    }
    let mut ranked: Vec<(&str, u64)> = counts.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(max_terms);
    let terms = ranked.into_iter().map(|(t, _)| t.to_owned()).collect();
    Ok(VocabularyModel::from_terms(terms, stopwords.len()))
}

/// Binary presence of vocabulary terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TermPresenceVector {
    present: Vec<usize>,
}

impl TermPresenceVector {
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        TermPresenceVector {
            present: set.into_iter().collect(),
        }
    }

    /// Sorted, distinct indices of present terms.
    pub fn indices(&self) -> &[usize] {
        &self.present
    }

    pub fn contains(&self, index: usize) -> bool {
        self.present.binary_search(&index).is_ok()
    }

    pub fn len(&self) -> usize {
        self.present.len()
    }

    pub fn is_empty(&self) -> bool {
        self.present.is_empty()
    }
}

pub fn vectorize<S: AsRef<str>>(tokens: &[S], vocab: &VocabularyModel) -> TermPresenceVector {
    TermPresenceVector::from_indices(tokens.iter().filter_map(|t| vocab.index_of(t.as_ref())))
}

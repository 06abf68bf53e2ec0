//! Integer-scored word lists (englishness and sentiment).

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const ENGLISHNESS_RANGE: (i32, i32) = (-3, 3);
pub const SENTIMENT_RANGE: (i32, i32) = (-5, 5);

/// Small bundled englishness list, enough for tests and the synthetic corpora.
pub const BUNDLED_ENGLISH: &str = include_str!("../data/english_lexicon.tsv");
/// Small bundled sentiment list in the `word<TAB>valence` format.
pub const BUNDLED_SENTIMENT: &str = include_str!("../data/sentiment_lexicon.tsv");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    name: String,
    min_score: i32,
    max_score: i32,
    entries: BTreeMap<String, i32>,
}

impl Lexicon {
    /// Builds a lexicon from in-memory entries, with the same validation as [`load_lexicon`].
    pub fn from_entries<I, S>(name: impl Into<String>, min_score: i32, max_score: i32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, i32)>,
        S: AsRef<str>,
    {
        let mut lexicon = Lexicon::empty(name, min_score, max_score)?;
        for (idx, (word, score)) in entries.into_iter().enumerate() {
            lexicon.insert(word.as_ref(), score).map_err(|m| Error::line(idx + 1, m))?;
        }
        Ok(lexicon)
    }

    fn empty(name: impl Into<String>, min_score: i32, max_score: i32) -> Result<Self> {
        if min_score > max_score {
            return Err(Error::Config(format!(
                "lexicon score range [{min_score}, {max_score}] is empty"
            )));
        }
        Ok(Lexicon {
            name: name.into(),
            min_score,
            max_score,
            entries: BTreeMap::new(),
        })
    }

    fn insert(&mut self, word: &str, score: i32) -> std::result::Result<(), String> {
        let word = word.trim().to_lowercase();
        if word.is_empty() {
            return Err("empty word".into());
        }
        if word.contains(char::is_whitespace) {
            return Err(format!("multi-word entry {word:?} is not supported"));
        }
        if score < self.min_score || score > self.max_score {
            return Err(format!(
                "score {score} for {word:?} outside [{}, {}]",
                self.min_score, self.max_score
            ));
        }
        if self.entries.contains_key(&word) {
            return Err(format!("duplicate word {word:?}"));
        }
        self.entries.insert(word, score);
        Ok(())
    }

    pub fn bundled_english() -> Self {
        load_lexicon(BUNDLED_ENGLISH.as_bytes(), "english", ENGLISHNESS_RANGE.0, ENGLISHNESS_RANGE.1)
            .expect("bundled english lexicon is valid")
    }

    pub fn bundled_sentiment() -> Self {
        load_lexicon(BUNDLED_SENTIMENT.as_bytes(), "sentiment", SENTIMENT_RANGE.0, SENTIMENT_RANGE.1)
            .expect("bundled sentiment lexicon is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn min_score(&self) -> i32 {
        self.min_score
    }

    pub fn max_score(&self) -> i32 {
        self.max_score
    }

    /// Exact lookup; `word` must already be lowercase.
    pub fn score(&self, word: &str) -> Option<i32> {
        self.entries.get(word).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, i32)> {
        self.entries.iter().map(|(w, s)| (w.as_str(), *s))
    }

    /// The same word list with every score negated.
    pub fn negated(&self) -> Lexicon {
        Lexicon {
            name: format!("{} (negated)", self.name),
            min_score: -self.max_score,
            max_score: -self.min_score,
            entries: self.entries.iter().map(|(w, s)| (w.clone(), -s)).collect(),
        }
    }

    pub fn write_to<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        for (word, score) in &self.entries {
            writeln!(writer, "{word}\t{score}")?;
        }
        Ok(())
    }
}

/// Reads `word<TAB>score` lines; `#` comments and blank lines are ignored.
pub fn load_lexicon<R: BufRead>(reader: R, name: &str, min_score: i32, max_score: i32) -> Result<Lexicon> {
    let mut lexicon = Lexicon::empty(name, min_score, max_score)?;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::line(lineno, e.to_string()))?;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let (word, score) = line
            .rsplit_once('\t')
            .ok_or_else(|| Error::line(lineno, "expected word<TAB>score"))?;
        let score: i32 = score
            .trim()
            .parse()
            .map_err(|_| Error::line(lineno, format!("non-integer score {:?} for {word:?}", score.trim())))?;
        lexicon.insert(word, score).map_err(|m| Error::line(lineno, m))?;
    }
    Ok(lexicon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentiment(input: &str) -> Result<Lexicon> {
        load_lexicon(input.as_bytes(), "test", -5, 5)
    }

    #[test]
    fn loads_scored_entries() {
        let lex = sentiment("# excerpt\nabandon\t-2\n\naboard\t1\n").unwrap();
        assert_eq!(lex.score("abandon"), Some(-2));
        assert_eq!(lex.score("aboard"), Some(1));
        assert_eq!(lex.score("absent"), None);
        assert_eq!(lex.len(), 2);
    }

    #[test]
    fn words_are_lowercased() {
        let lex = sentiment("Happy\t3\n").unwrap();
        assert_eq!(lex.score("happy"), Some(3));
    }

    #[test]
    fn out_of_range_score_names_the_word() {
        let err = sentiment("happy\t7\n").unwrap_err();
        assert!(err.to_string().contains("happy"), "{err}");
    }

    #[test]
    fn rejects_duplicates_and_bad_scores() {
        assert!(sentiment("good\t2\nGood\t3\n").is_err());
        assert!(sentiment("good\ttwo\n").is_err());
        assert!(sentiment("good 2\n").is_err());
        assert!(sentiment("not good\t-2\n").is_err());
        assert!(load_lexicon("a\t1".as_bytes(), "x", 3, -3).is_err());
    }

    #[test]
    fn bundled_lists_load() {
        let english = Lexicon::bundled_english();
        assert!(english.iter().all(|(_, s)| (-3..=3).contains(&s)));
        assert!(english.score("the").unwrap() > 0);
        let sentiment = Lexicon::bundled_sentiment();
        assert_eq!(sentiment.score("abandon"), Some(-2));
        assert_eq!(sentiment.score("aboard"), Some(1));
    }

    #[test]
    fn serialized_output_reloads_identically() {
        let lex = Lexicon::bundled_sentiment();
        let mut buf = Vec::new();
        lex.write_to(&mut buf).unwrap();
        let again = load_lexicon(buf.as_slice(), lex.name(), -5, 5).unwrap();
        assert_eq!(again, lex);
        let data_lines = BUNDLED_SENTIMENT
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .count();
        assert_eq!(lex.len(), data_lines);
    }
}

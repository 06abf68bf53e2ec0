//! Readers for tweet corpora (JSON lines) and category-labeled sentence corpora.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One message record.
///
/// On disk the declared language and author are named `lang` and `user`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    #[serde(rename = "lang", default, skip_serializing_if = "Option::is_none")]
    pub declared_language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_at: Option<String>,
    #[serde(rename = "user", default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
}

impl Tweet {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Tweet {
            id: id.into(),
            text: text.into(),
            declared_language: None,
            created_at: None,
            author: None,
        }
    }

    pub fn with_language(mut self, lang: impl Into<String>) -> Self {
        self.declared_language = Some(lang.into());
        self
    }

    /// A missing language field carries the platform default, English.
    pub fn declares_english(&self) -> bool {
        match &self.declared_language {
            None => true,
            Some(tag) => is_english_tag(tag),
        }
    }
}

fn is_english_tag(tag: &str) -> bool {
    let tag = tag.trim().to_ascii_lowercase();
    tag == "en" || tag == "english" || tag.starts_with("en-") || tag.starts_with("en_")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    News,
    Other,
}

impl Label {
    pub fn is_news(self) -> bool {
        self == Label::News
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::News => Label::Other,
            Label::Other => Label::News,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::News => "news",
            Label::Other => "other",
        })
    }
}

/// Anything that carries a binary news/other label.
pub trait Labeled {
    fn label(&self) -> Label;
}

impl Labeled for Label {
    fn label(&self) -> Label {
        *self
    }
}

impl<T> Labeled for (T, Label) {
    fn label(&self) -> Label {
        self.1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSentence {
    pub tokens: Vec<String>,
    pub label: Label,
    pub source_category: String,
}

impl Labeled for LabeledSentence {
    fn label(&self) -> Label {
        self.label
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total: usize,
    pub per_label: BTreeMap<Label, usize>,
    pub english: usize,
}

impl CorpusStats {
    /// Counts for a reference corpus, which is English throughout.
    pub fn for_labeled<T: Labeled>(items: &[T]) -> Self {
        let mut per_label = BTreeMap::new();
        for item in items {
            *per_label.entry(item.label()).or_insert(0) += 1;
        }
        CorpusStats {
            total: items.len(),
            per_label,
            english: items.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Skip malformed or duplicate records instead of aborting on the first one.
    pub skip_malformed: bool,
}

#[derive(Debug, Default)]
pub struct TweetCorpus {
    pub tweets: Vec<Tweet>,
    /// Per-line errors for records that were skipped.
    pub skipped: Vec<Error>,
}

pub fn load_tweets<R: BufRead>(reader: R, options: LoadOptions) -> Result<TweetCorpus> {
    let mut corpus = TweetCorpus::default();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::line(lineno, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = parse_tweet_line(&line, lineno).and_then(|tweet| {
            if seen.contains(&tweet.id) {
                Err(Error::line(lineno, format!("duplicate tweet id {:?}", tweet.id)))
            } else {
                Ok(tweet)
            }
        });
        match parsed {
            Ok(tweet) => {
                seen.insert(tweet.id.clone());
                corpus.tweets.push(tweet);
            }
            Err(err) if options.skip_malformed => corpus.skipped.push(err),
            Err(err) => return Err(err),
        }
    }
    Ok(corpus)
}

fn parse_tweet_line(line: &str, lineno: usize) -> Result<Tweet> {
    let tweet: Tweet =
        serde_json::from_str(line).map_err(|e| Error::line(lineno, format!("malformed record: {e}")))?;
    if tweet.text.trim().is_empty() {
        return Err(Error::line(lineno, "empty text"));
    }
    if tweet.id.is_empty() {
        return Err(Error::line(lineno, "empty id"));
    }
    Ok(tweet)
}

pub fn write_tweets<W: Write>(mut writer: W, tweets: &[Tweet]) -> std::io::Result<()> {
    for tweet in tweets {
        serde_json::to_writer(&mut writer, tweet)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads `category<TAB>token token ...` lines.
///
/// Sentences whose category is in `excluded_categories` are dropped; the
/// rest are labeled news iff their category equals `news_category`.
pub fn load_labeled_corpus<R: BufRead>(
    reader: R,
    news_category: &str,
    excluded_categories: &BTreeSet<String>,
) -> Result<Vec<LabeledSentence>> {
    if news_category.trim().is_empty() {
        return Err(Error::Config("news category name is empty".into()));
    }
    if excluded_categories.contains(news_category) {
        return Err(Error::Config(format!(
            "news category {news_category:?} is also excluded"
        )));
    }

    let mut sentences = Vec::new();
    let mut saw_news = false;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::line(lineno, e.to_string()))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (category, text) = line
            .split_once('\t')
            .ok_or_else(|| Error::line(lineno, "expected category<TAB>tokens"))?;
        let category = category.trim();
        if category.is_empty() {
            return Err(Error::line(lineno, "empty category name"));
        }
        if category == news_category {
            saw_news = true;
        }
        if excluded_categories.contains(category) {
            continue;
        }
        let tokens: Vec<String> = text.split_whitespace().map(str::to_owned).collect();
        if tokens.is_empty() {
            return Err(Error::line(lineno, "sentence has no tokens"));
        }
        let label = if category == news_category {
            Label::News
        } else {
            Label::Other
        };
        sentences.push(LabeledSentence {
            tokens,
            label,
            source_category: category.to_owned(),
        });
    }

    if !saw_news {
        return Err(Error::Data(format!(
            "news category {news_category:?} does not occur in the corpus"
        )));
    }
    if sentences.is_empty() {
        return Err(Error::Data("no sentences left after category exclusion".into()));
    }
    Ok(sentences)
}

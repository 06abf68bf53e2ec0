//! Retweet detection and per-tweet GLM covariates.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Tweet;
use crate::error::{Error, Result};
use crate::news::NEWS_THRESHOLD;
use crate::sentiment::{negative_flag, NegativePolicy, SentimentScore};
use crate::tokenizer::is_url_token;

/// Covariate names in design-matrix order, after the intercept.
pub const COVARIATES: [&str; 5] = ["hashtag", "mention", "url", "negative", "negative_x_newsness"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionMode {
    /// negative × p(news)
    #[default]
    Product,
    /// negative × [p(news) > 0.5]
    LogicalAnd,
}

impl fmt::Display for InteractionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InteractionMode::Product => "product",
            InteractionMode::LogicalAnd => "and",
        })
    }
}

impl FromStr for InteractionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "product" => Ok(InteractionMode::Product),
            "and" | "logical_and" => Ok(InteractionMode::LogicalAnd),
            other => Err(format!("unknown interaction mode {other:?} (expected product or and)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetweetMark {
    pub is_retweet: bool,
    pub attributed_user: Option<String>,
}

impl RetweetMark {
    fn none() -> Self {
        RetweetMark {
            is_retweet: false,
            attributed_user: None,
        }
    }
}

fn is_handle_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// A `@handle` occurrence: byte offset of the `@` and the handle text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Handle<'a> {
    at: usize,
    name: &'a str,
}

/// Parses a handle starting exactly at byte `at` (which must hold `@`).
fn handle_at(text: &str, at: usize) -> Option<Handle<'_>> {
    let rest = text[at..].strip_prefix('@')?;
    let len = rest.find(|c: char| !is_handle_char(c)).unwrap_or(rest.len());
    (len > 0).then(|| Handle {
        at,
        name: &rest[..len],
    })
}

fn prev_char(text: &str, at: usize) -> Option<char> {
    text[..at].chars().next_back()
}

/// Byte spans of whitespace-delimited URL tokens.
fn url_spans(text: &str) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                if is_url_token(&text[s..i]) {
                    spans.push((s, i));
                }
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    spans
}

fn in_spans(spans: &[(usize, usize)], pos: usize) -> bool {
    spans.iter().any(|&(s, e)| s <= pos && pos < e)
}

/// `@handle` occurrences outside URLs whose `@` does not follow a word character.
fn mentions(text: &str) -> Vec<Handle<'_>> {
    let urls = url_spans(text);
    text.match_indices('@')
        .filter(|(i, _)| !in_spans(&urls, *i))
        .filter(|(i, _)| !prev_char(text, *i).is_some_and(is_word_char))
        .filter_map(|(i, _)| handle_at(text, i))
        .collect()
}

/// First `RT` or `via` marker (whole word, any case) followed by optional
/// whitespace, an optional `:`, more optional whitespace and an `@handle`.
fn attribution(text: &str) -> Option<Handle<'_>> {
    let urls = url_spans(text);
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        let Some(offset) = rest.find(is_word_char) else {
            break;
        };
        let start = pos + offset;
        let len = text[start..]
            .find(|c: char| !is_word_char(c))
            .unwrap_or(text.len() - start);
        let end = start + len;
        let word = &text[start..end];
        pos = end;

        if !(word.eq_ignore_ascii_case("rt") || word.eq_ignore_ascii_case("via")) {
            continue;
        }
        if in_spans(&urls, start) || matches!(prev_char(text, start), Some('@' | '#')) {
            continue;
        }
        let after = text[end..].trim_start();
        let after = after.strip_prefix(':').unwrap_or(after).trim_start();
        let at = text.len() - after.len();
        if let Some(handle) = handle_at(text, at) {
            return Some(handle);
        }
    }
    None
}

pub fn detect_retweet(text: &str) -> RetweetMark {
    match attribution(text) {
        Some(handle) => RetweetMark {
            is_retweet: true,
            attributed_user: Some(handle.name.to_owned()),
        },
        None => RetweetMark::none(),
    }
}

pub fn has_hashtag(text: &str) -> bool {
    let urls = url_spans(text);
    text.match_indices('#').any(|(i, _)| {
        !in_spans(&urls, i)
            && !prev_char(text, i).is_some_and(is_word_char)
            && text[i + 1..].chars().next().is_some_and(is_word_char)
    })
}

pub fn has_url(text: &str) -> bool {
    text.split_whitespace().any(is_url_token)
}

/// True when some `@handle` other than the retweet attribution is present.
pub fn has_mention(text: &str) -> bool {
    let attributed = attribution(text).map(|h| h.at);
    mentions(text).iter().any(|m| Some(m.at) != attributed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub has_hashtag: bool,
    pub has_mention: bool,
    pub has_url: bool,
    pub negative: bool,
    /// negative × newsness; in `[0, 1]`.
    pub negative_newsness: f64,
    /// Response.
    pub is_retweet: bool,
}

impl FeatureVector {
    /// Design-matrix row: intercept then the covariates in [`COVARIATES`] order.
    pub fn row(&self) -> [f64; 6] {
        let b = |x: bool| if x { 1.0 } else { 0.0 };
        [
            1.0,
            b(self.has_hashtag),
            b(self.has_mention),
            b(self.has_url),
            b(self.negative),
            self.negative_newsness,
        ]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeatureConfig {
    pub negative_policy: NegativePolicy,
    pub interaction_mode: InteractionMode,
}

pub fn extract(tweet: &Tweet, score: &SentimentScore, p_news: f64, config: &FeatureConfig) -> Result<FeatureVector> {
    if !(0.0..=1.0).contains(&p_news) {
        return Err(Error::Data(format!(
            "news probability {p_news} for tweet {:?} is outside [0, 1]",
            tweet.id
        )));
    }
    let text = &tweet.text;
    let negative = negative_flag(score, config.negative_policy);
    let newsness = match config.interaction_mode {
        InteractionMode::Product => p_news,
        InteractionMode::LogicalAnd => {
            if p_news > NEWS_THRESHOLD {
                1.0
            } else {
                0.0
            }
        }
    };
    Ok(FeatureVector {
        has_hashtag: has_hashtag(text),
        has_mention: has_mention(text),
        has_url: has_url(text),
        negative,
        negative_newsness: if negative { newsness } else { 0.0 },
        is_retweet: detect_retweet(text).is_retweet,
    })
}

pub const FEATURE_DUMP_HEADER: &str = "id\tf0\thashtag\tmention\turl\tnegative\tinteraction\tretweet";

/// Writes the per-tweet feature table, header first.
pub fn write_feature_dump<'a, W, I>(mut w: W, rows: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a FeatureVector)>,
{
    writeln!(w, "{FEATURE_DUMP_HEADER}")?;
    for (id, f) in rows {
        let b = |x: bool| u8::from(x);
        writeln!(
            w,
            "{id}\t1\t{}\t{}\t{}\t{}\t{}\t{}",
            b(f.has_hashtag),
            b(f.has_mention),
            b(f.has_url),
            b(f.negative),
            f.negative_newsness,
            b(f.is_retweet)
        )?;
    }
    Ok(())
}

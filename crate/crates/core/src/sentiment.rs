//! Lexicon valence and arousal scoring.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lexicon::Lexicon;

/// How the binary negative-sentiment covariate is derived from a score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativePolicy {
    /// Negative when the summed valence is below zero.
    #[default]
    ValenceBelowZero,
    /// Negative when any matched word has a negative score.
    AnyNegativeWord,
}

impl fmt::Display for NegativePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NegativePolicy::ValenceBelowZero => "valence",
            NegativePolicy::AnyNegativeWord => "word",
        })
    }
}

impl FromStr for NegativePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "valence" | "valence_below_zero" => Ok(NegativePolicy::ValenceBelowZero),
            "word" | "any_negative_word" => Ok(NegativePolicy::AnyNegativeWord),
            other => Err(format!("unknown negative policy {other:?} (expected valence or word)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SentimentScore {
    /// Sum of matched word scores.
    pub valence: i64,
    /// Sum of absolute matched word scores.
    pub arousal: i64,
    /// Number of matched occurrences with a negative score.
    pub negative_words: u32,
    /// `valence < 0`.
    pub negative: bool,
}

impl SentimentScore {
    fn from_sums(valence: i64, arousal: i64, negative_words: u32) -> Self {
        SentimentScore {
            valence,
            arousal,
            negative_words,
            negative: valence < 0,
        }
    }

    /// Score of the concatenation of the two scored token sequences.
    pub fn combine(self, other: SentimentScore) -> SentimentScore {
        SentimentScore::from_sums(
            self.valence + other.valence,
            self.arousal + other.arousal,
            self.negative_words + other.negative_words,
        )
    }
}

/// Scores every token occurrence found in the lexicon; other tokens contribute nothing.
pub fn score<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> SentimentScore {
    let (mut valence, mut arousal, mut negative_words) = (0i64, 0i64, 0u32);
    for s in tokens.iter().filter_map(|t| lexicon.score(t.as_ref())) {
        valence += i64::from(s);
        arousal += i64::from(s.abs());
        if s < 0 {
            negative_words += 1;
        }
    }
    SentimentScore::from_sums(valence, arousal, negative_words)
}

pub fn negative_flag(score: &SentimentScore, policy: NegativePolicy) -> bool {
    match policy {
        NegativePolicy::ValenceBelowZero => score.valence < 0,
        NegativePolicy::AnyNegativeWord => score.negative_words > 0,
    }
}

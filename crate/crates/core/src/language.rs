//! Word-list language filter.

use crate::corpus::Tweet;
use crate::lexicon::Lexicon;
use crate::tokenizer::tokenize;

/// Sum of the englishness scores of the words in `text`; unknown words count 0.
pub fn englishness(text: &str, english: &Lexicon) -> i64 {
    tokenize(text)
        .iter()
        .filter_map(|t| english.score(t))
        .map(i64::from)
        .sum()
}

/// A tweet is English when its englishness is strictly positive and, if
/// `require_declared` is set, its declared language is English (or absent).
pub fn is_english(tweet: &Tweet, english: &Lexicon, require_declared: bool) -> bool {
    if require_declared && !tweet.declares_english() {
        return false;
    }
    englishness(&tweet.text, english) > 0
}

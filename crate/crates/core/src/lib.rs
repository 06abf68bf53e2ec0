//! Tweet virality analysis.
//!
//! The pipeline filters English tweets with a scored word list, rates each
//! tweet's newsness with a Bernoulli Naive Bayes classifier trained on a
//! labeled sentence corpus, scores valence and arousal against a sentiment
//! lexicon, extracts retweet covariates, and fits a logit GLM of retweet
//! probability with Wald and drop-one likelihood-ratio tests.

pub mod corpus;
pub mod error;
pub mod features;
pub mod glm;
pub mod language;
pub mod lexicon;
pub mod news;
pub mod pipeline;
pub mod report;
pub mod sentiment;
pub mod stats;
pub mod synth;
pub mod tokenizer;

pub use error::{Error, ErrorKind, Result};

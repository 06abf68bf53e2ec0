//! Bernoulli Naive Bayes news/non-news classifier.
//!
//! Every vocabulary term contributes to the class likelihood: present terms
//! through `p(w_d = 1 | class)` and absent terms through `p(w_d = 0 | class)`.
//! The posterior is evaluated in log space as
//! `1 / (1 + exp(L_other - L_news))`.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Label, LabeledSentence, Labeled};
use crate::error::{Error, Result};
use crate::tokenizer::{build_vocabulary, tokenize, vectorize, StopWords, TermPresenceVector, VocabularyModel};

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.75;
pub const NEWS_THRESHOLD: f64 = 0.5;

const MODEL_MAGIC: &str = "virality-news-model";
const MODEL_VERSION: u32 = 1;

/// Seeded random partition into train and test parts.
///
/// The train part gets `round(n * train_fraction)` items. Both parts must
/// contain at least one item of each label.
pub fn split_train_test<T: Labeled + Clone>(
    items: &[T],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train fraction {train_fraction} must lie strictly between 0 and 1"
        )));
    }
    let n_train = (items.len() as f64 * train_fraction).round() as usize;
    if n_train == 0 || n_train >= items.len() {
        return Err(Error::Data(format!(
            "cannot split {} items with train fraction {train_fraction} into two non-empty parts",
            items.len()
        )));
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let train: Vec<T> = order[..n_train].iter().map(|&i| items[i].clone()).collect();
    let test: Vec<T> = order[n_train..].iter().map(|&i| items[i].clone()).collect();
    for (part, name) in [(&train, "train"), (&test, "test")] {
        for label in [Label::News, Label::Other] {
            if !part.iter().any(|x| x.label() == label) {
                return Err(Error::Data(format!(
                    "{name} part has no {label} examples; try another seed or split fraction"
                )));
            }
        }
    }
    Ok((train, test))
}

/// Log probabilities of one term being present/absent in each class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermLogProbs {
    pub present_news: f64,
    pub absent_news: f64,
    pub present_other: f64,
    pub absent_other: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    log_prior_news: f64,
    log_prior_other: f64,
    log_cond: Vec<TermLogProbs>,
    smoothing_alpha: f64,
    vocab: VocabularyModel,
    // Σ_d log p(w_d = 0 | class), the log-likelihood of an empty vector.
    absent_news: f64,
    absent_other: f64,
}

impl NaiveBayesModel {
    /// Assembles a model from explicit log probabilities.
    pub fn from_parts(
        vocab: VocabularyModel,
        log_prior_news: f64,
        log_prior_other: f64,
        log_cond: Vec<TermLogProbs>,
        smoothing_alpha: f64,
    ) -> Result<Self> {
        if log_cond.len() != vocab.len() {
            return Err(Error::Data(format!(
                "{} conditional entries for a vocabulary of {} terms",
                log_cond.len(),
                vocab.len()
            )));
        }
        let absent_news = log_cond.iter().map(|c| c.absent_news).sum();
        let absent_other = log_cond.iter().map(|c| c.absent_other).sum();
        Ok(NaiveBayesModel {
            log_prior_news,
            log_prior_other,
            log_cond,
            smoothing_alpha,
            vocab,
            absent_news,
            absent_other,
        })
    }

    pub fn vocab(&self) -> &VocabularyModel {
        &self.vocab
    }

    pub fn log_prior_news(&self) -> f64 {
        self.log_prior_news
    }

    pub fn log_prior_other(&self) -> f64 {
        self.log_prior_other
    }

    pub fn log_cond(&self) -> &[TermLogProbs] {
        &self.log_cond
    }

    pub fn smoothing_alpha(&self) -> f64 {
        self.smoothing_alpha
    }

    /// Class log-joint `log p(class) + Σ_d log p(w_d | class)` for news and other.
    pub fn log_joint(&self, vector: &TermPresenceVector) -> (f64, f64) {
        let mut news = self.log_prior_news + self.absent_news;
        let mut other = self.log_prior_other + self.absent_other;
        for &d in vector.indices() {
            let c = &self.log_cond[d];
            news += c.present_news - c.absent_news;
            other += c.present_other - c.absent_other;
        }
        (news, other)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{MODEL_MAGIC}\t{MODEL_VERSION}")?;
        writeln!(w, "alpha\t{:?}", self.smoothing_alpha)?;
        writeln!(w, "stopwords\t{}", self.vocab.stopword_count())?;
        writeln!(w, "prior\t{:?}\t{:?}", self.log_prior_news, self.log_prior_other)?;
        writeln!(w, "terms\t{}", self.vocab.len())?;
        for (term, c) in self.vocab.terms().iter().zip(&self.log_cond) {
            writeln!(
                w,
                "{term}\t{:?}\t{:?}\t{:?}\t{:?}",
                c.present_news, c.absent_news, c.present_other, c.absent_other
            )?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate().map(|(i, l)| {
            l.map(|l| (i + 1, l)).map_err(|e| Error::line(i + 1, e.to_string()))
        });
        let mut next = |what: &str| -> Result<(usize, String)> {
            lines
                .next()
                .unwrap_or_else(|| Err(Error::Data(format!("model file ends before {what}"))))
        };

        let (n, header) = next("header")?;
        let version = header
            .strip_prefix(MODEL_MAGIC)
            .and_then(|rest| rest.strip_prefix('\t'))
            .ok_or_else(|| Error::line(n, "not a news model file"))?;
        if version.trim() != MODEL_VERSION.to_string() {
            return Err(Error::line(n, format!("unsupported model version {version:?}")));
        }

        let (n, line) = next("alpha")?;
        let alpha = keyed_fields(&line, "alpha", 1, n)?[0].parse_f64(n)?;
        let (n, line) = next("stopwords")?;
        let stopword_count = keyed_fields(&line, "stopwords", 1, n)?[0].parse_usize(n)?;
        let (n, line) = next("prior")?;
        let prior = keyed_fields(&line, "prior", 2, n)?;
        let (prior_news, prior_other) = (prior[0].parse_f64(n)?, prior[1].parse_f64(n)?);
        let (n, line) = next("terms")?;
        let count = keyed_fields(&line, "terms", 1, n)?[0].parse_usize(n)?;

        let mut terms = Vec::with_capacity(count);
        let mut cond = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, line) = next("term rows")?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 {
                return Err(Error::line(n, "expected term and four log probabilities"));
            }
            terms.push(fields[0].to_owned());
            let f = |i: usize| Field(fields[i]).parse_f64(n);
            cond.push(TermLogProbs {
                present_news: f(1)?,
                absent_news: f(2)?,
                present_other: f(3)?,
                absent_other: f(4)?,
            });
        }
        let vocab = VocabularyModel::from_terms(terms, stopword_count);
        if vocab.len() != count {
            return Err(Error::Data("model file repeats a term".into()));
        }
        NaiveBayesModel::from_parts(vocab, prior_news, prior_other, cond, alpha)
    }
}

struct Field<'a>(&'a str);

impl Field<'_> {
    fn parse_f64(&self, line: usize) -> Result<f64> {
        self.0
            .parse()
            .map_err(|_| Error::line(line, format!("bad number {:?}", self.0)))
    }

    fn parse_usize(&self, line: usize) -> Result<usize> {
        self.0
            .parse()
            .map_err(|_| Error::line(line, format!("bad count {:?}", self.0)))
    }
}

fn keyed_fields<'a>(line: &'a str, key: &str, n: usize, lineno: usize) -> Result<Vec<Field<'a>>> {
    let mut parts = line.split('\t');
    if parts.next() != Some(key) {
        return Err(Error::line(lineno, format!("expected {key:?} row")));
    }
    let fields: Vec<Field> = parts.map(Field).collect();
    if fields.len() != n {
        return Err(Error::line(lineno, format!("{key:?} row needs {n} values")));
    }
    Ok(fields)
}

/// Fits priors and smoothed per-term presence probabilities,
/// `p(w_d = 1 | c) = (count_{d,c} + alpha) / (n_c + 2 alpha)`.
pub fn train(
    examples: &[(TermPresenceVector, Label)],
    vocab: &VocabularyModel,
    alpha: f64,
) -> Result<NaiveBayesModel> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!("smoothing alpha {alpha} must be finite and non-negative")));
    }
    let d = vocab.len();
    let mut counts_news = vec![0u64; d];
    let mut counts_other = vec![0u64; d];
    let (mut n_news, mut n_other) = (0u64, 0u64);
    for (vector, label) in examples {
        let counts = match label {
            Label::News => {
                n_news += 1;
                &mut counts_news
            }
            Label::Other => {
                n_other += 1;
                &mut counts_other
            }
        };
        for &i in vector.indices() {
            if i >= d {
                return Err(Error::Data(format!("term index {i} outside vocabulary of {d}")));
            }
            counts[i] += 1;
        }
    }
    if n_news == 0 || n_other == 0 {
        return Err(Error::Data("training data must contain both news and other examples".into()));
    }

    let estimate = |count: u64, n: u64, term: &str, label: Label| -> Result<(f64, f64)> {
        if alpha == 0.0 && (count == 0 || count == n) {
            return Err(Error::Data(format!(
                "term {term:?} is {} in every {label} example; unsmoothed estimate is degenerate",
                if count == 0 { "absent" } else { "present" }
            )));
        }
        let denom = n as f64 + 2.0 * alpha;
        let present = (count as f64 + alpha) / denom;
        let absent = ((n - count) as f64 + alpha) / denom;
        Ok((present.ln(), absent.ln()))
    };

    let mut log_cond = Vec::with_capacity(d);
    for (i, term) in vocab.terms().iter().enumerate() {
        let (present_news, absent_news) = estimate(counts_news[i], n_news, term, Label::News)?;
        let (present_other, absent_other) = estimate(counts_other[i], n_other, term, Label::Other)?;
        log_cond.push(TermLogProbs {
            present_news,
            absent_news,
            present_other,
            absent_other,
        });
    }
    let n = (n_news + n_other) as f64;
    NaiveBayesModel::from_parts(
        vocab.clone(),
        (n_news as f64 / n).ln(),
        (n_other as f64 / n).ln(),
        log_cond,
        alpha,
    )
}

/// `p(news | w)`.
pub fn posterior(model: &NaiveBayesModel, vector: &TermPresenceVector) -> f64 {
    let (news, other) = model.log_joint(vector);
    1.0 / (1.0 + (other - news).exp())
}

pub fn is_news(p_news: f64) -> bool {
    p_news > NEWS_THRESHOLD
}

/// Fraction of examples whose thresholded posterior matches the label.
pub fn evaluate(model: &NaiveBayesModel, test: &[(TermPresenceVector, Label)]) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Data("cannot evaluate on an empty test set".into()));
    }
    let correct = test
        .iter()
        .filter(|(v, label)| is_news(posterior(model, v)) == label.is_news())
        .count();
    Ok(correct as f64 / test.len() as f64)
}

/// Fraction of posteriors strictly above 0.5.
pub fn news_rate(posteriors: &[f64]) -> Result<f64> {
    if posteriors.is_empty() {
        return Err(Error::Data("news rate of an empty set is undefined".into()));
    }
    Ok(posteriors.iter().filter(|&&p| is_news(p)).count() as f64 / posteriors.len() as f64)
}

/// Settings for training the classifier from a labeled sentence corpus.
#[derive(Debug, Clone)]
pub struct TrainingConfig {
    pub vocab_size: usize,
    pub alpha: f64,
    pub train_fraction: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            vocab_size: crate::tokenizer::DEFAULT_VOCAB_SIZE,
            alpha: DEFAULT_ALPHA,
            train_fraction: DEFAULT_TRAIN_FRACTION,
        }
    }
}

/// Sentence tokens normalized the same way as tweet text.
pub fn normalized_tokens(sentence: &LabeledSentence) -> Vec<String> {
    tokenize(&sentence.tokens.join(" "))
}

/// Builds the vocabulary from `sentences` and trains on all of them.
pub fn train_on_sentences(
    sentences: &[LabeledSentence],
    stopwords: &StopWords,
    config: &TrainingConfig,
) -> Result<NaiveBayesModel> {
    let tokens: Vec<Vec<String>> = sentences.iter().map(normalized_tokens).collect();
    let vocab = build_vocabulary(&tokens, stopwords, config.vocab_size)?;
    let examples: Vec<_> = tokens
        .iter()
        .zip(sentences)
        .map(|(t, s)| (vectorize(t, &vocab), s.label))
        .collect();
    train(&examples, &vocab, config.alpha)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoldoutRun {
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoldoutSummary {
    pub runs: Vec<HoldoutRun>,
    pub mean: f64,
    /// Sample standard deviation over runs (0 for a single run).
    pub std_dev: f64,
}

/// Repeated seeded holdout: split, build the vocabulary on the train part,
/// train, and score the test part, once per seed.
pub fn holdout_accuracy(
    sentences: &[LabeledSentence],
    stopwords: &StopWords,
    config: &TrainingConfig,
    seeds: &[u64],
) -> Result<HoldoutSummary> {
    if seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    let mut runs = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let (train_part, test_part) = split_train_test(sentences, config.train_fraction, seed)?;
        let model = train_on_sentences(&train_part, stopwords, config)?;
        let test: Vec<_> = test_part
            .iter()
            .map(|s| (vectorize(&normalized_tokens(s), model.vocab()), s.label))
            .collect();
        runs.push(HoldoutRun {
            seed,
            train_size: train_part.len(),
            test_size: test.len(),
            accuracy: evaluate(&model, &test)?,
        });
    }
    let n = runs.len() as f64;
    let mean = runs.iter().map(|r| r.accuracy).sum::<f64>() / n;
    let std_dev = if runs.len() > 1 {
        (runs.iter().map(|r| (r.accuracy - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(HoldoutSummary { runs, mean, std_dev })
}

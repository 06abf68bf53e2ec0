//! End-to-end analysis: language filter, newsness, sentiment, retweet
//! covariates, and the full plus drop-one GLM fits.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{load_labeled_corpus, load_tweets, LoadOptions, Tweet};
use crate::error::{Error, Result};
use crate::features::{extract, FeatureConfig, FeatureVector, InteractionMode, COVARIATES};
use crate::glm::{fit_logistic, likelihood_ratio_test, wald_statistics, DesignMatrix, FitOptions};
use crate::language::is_english;
use crate::lexicon::{load_lexicon, Lexicon, ENGLISHNESS_RANGE, SENTIMENT_RANGE};
use crate::news::{self, holdout_accuracy, news_rate, train_on_sentences, NaiveBayesModel, TrainingConfig};
use crate::report::{ClassifierSummary, CovariateRow, ModelBlock, Report, StageCount};
use crate::sentiment::{score, NegativePolicy, SentimentScore};
use crate::tokenizer::{tokenize, vectorize, StopWords, DEFAULT_VOCAB_SIZE};

pub const SUBSET_ALL: &str = "all";
pub const SUBSET_AROUSED: &str = "arousal>0";

/// Everything that determines an analysis run. Missing lexicon and stopword
/// paths fall back to the bundled samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub corpus_name: String,
    pub corpus: PathBuf,
    pub english_lexicon: Option<PathBuf>,
    pub sentiment_lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    /// Trained classifier artifact; takes precedence over `labeled_corpus`.
    pub news_model: Option<PathBuf>,
    pub labeled_corpus: Option<PathBuf>,
    pub news_category: String,
    pub excluded_categories: Vec<String>,
    pub vocab_size: usize,
    pub split: f64,
    pub alpha: f64,
    pub seed: u64,
    pub negative_policy: NegativePolicy,
    pub interaction_mode: InteractionMode,
    pub language_filter: bool,
    pub require_declared: bool,
    pub arousal_filter: bool,
    pub skip_malformed: bool,
    pub fit: FitOptions,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            corpus_name: "corpus".into(),
            corpus: PathBuf::new(),
            english_lexicon: None,
            sentiment_lexicon: None,
            stopwords: None,
            news_model: None,
            labeled_corpus: None,
            news_category: "news".into(),
            excluded_categories: Vec::new(),
            vocab_size: DEFAULT_VOCAB_SIZE,
            split: news::DEFAULT_TRAIN_FRACTION,
            alpha: news::DEFAULT_ALPHA,
            seed: 0,
            negative_policy: NegativePolicy::default(),
            interaction_mode: InteractionMode::default(),
            language_filter: true,
            require_declared: true,
            arousal_filter: false,
            skip_malformed: false,
            fit: FitOptions::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::Config(format!("split fraction {} must lie in (0, 1)", self.split)));
        }
        if self.vocab_size == 0 {
            return Err(Error::Config("vocabulary size must be at least 1".into()));
        }
        if self.news_model.is_none() && self.labeled_corpus.is_none() {
            return Err(Error::Config("a news model or a labeled corpus is required".into()));
        }
        Ok(())
    }

    pub fn training(&self) -> TrainingConfig {
        TrainingConfig {
            vocab_size: self.vocab_size,
            alpha: self.alpha,
            train_fraction: self.split,
        }
    }

    pub fn features(&self) -> FeatureConfig {
        FeatureConfig {
            negative_policy: self.negative_policy,
            interaction_mode: self.interaction_mode,
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

pub fn read_english_lexicon(path: Option<&Path>) -> Result<Lexicon> {
    match path {
        Some(p) => load_lexicon(open(p)?, "english", ENGLISHNESS_RANGE.0, ENGLISHNESS_RANGE.1),
        None => Ok(Lexicon::bundled_english()),
    }
}

pub fn read_sentiment_lexicon(path: Option<&Path>) -> Result<Lexicon> {
    match path {
        Some(p) => load_lexicon(open(p)?, "sentiment", SENTIMENT_RANGE.0, SENTIMENT_RANGE.1),
        None => Ok(Lexicon::bundled_sentiment()),
    }
}

pub fn read_stopwords(path: Option<&Path>) -> Result<StopWords> {
    match path {
        Some(p) => StopWords::load(open(p)?),
        None => Ok(StopWords::bundled()),
    }
}

pub fn read_tweets(path: &Path, options: LoadOptions) -> Result<crate::corpus::TweetCorpus> {
    load_tweets(open(path)?, options)
}

pub fn read_labeled_corpus(path: &Path, news_category: &str, excluded: &[String]) -> Result<Vec<crate::corpus::LabeledSentence>> {
    let excluded: BTreeSet<String> = excluded.iter().cloned().collect();
    load_labeled_corpus(open(path)?, news_category, &excluded)
}

pub fn read_news_model(path: &Path) -> Result<NaiveBayesModel> {
    NaiveBayesModel::read_from(open(path)?)
}

/// The loaded lexicons and classifier an analysis runs against.
#[derive(Debug, Clone)]
pub struct AnalysisInputs {
    pub english: Lexicon,
    pub sentiment: Lexicon,
    pub model: NaiveBayesModel,
    pub classifier: ClassifierSummary,
}

impl AnalysisInputs {
    pub fn load(config: &AnalysisConfig) -> Result<Self> {
        config.validate()?;
        let english = read_english_lexicon(config.english_lexicon.as_deref())
            .map_err(|e| e.in_stage("english lexicon"))?;
        let sentiment = read_sentiment_lexicon(config.sentiment_lexicon.as_deref())
            .map_err(|e| e.in_stage("sentiment lexicon"))?;
        let (model, holdout) = match (&config.news_model, &config.labeled_corpus) {
            (Some(path), _) => (read_news_model(path).map_err(|e| e.in_stage("news model"))?, None),
            (None, Some(path)) => {
                let stopwords = read_stopwords(config.stopwords.as_deref()).map_err(|e| e.in_stage("stopwords"))?;
                let sentences = read_labeled_corpus(path, &config.news_category, &config.excluded_categories)
                    .map_err(|e| e.in_stage("labeled corpus"))?;
                let training = config.training();
                let holdout = holdout_accuracy(&sentences, &stopwords, &training, &[config.seed])
                    .map_err(|e| e.in_stage("news classifier"))?;
                let model = train_on_sentences(&sentences, &stopwords, &training)
                    .map_err(|e| e.in_stage("news classifier"))?;
                (model, Some(holdout.mean))
            }
            (None, None) => unreachable!("validated above"),
        };
        let classifier = ClassifierSummary::of(&model, holdout);
        Ok(AnalysisInputs {
            english,
            sentiment,
            model,
            classifier,
        })
    }
}

/// Per-tweet results of the text stages.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredTweet {
    pub p_news: f64,
    pub sentiment: SentimentScore,
    pub features: FeatureVector,
}

pub fn newsness(model: &NaiveBayesModel, text: &str) -> f64 {
    news::posterior(model, &vectorize(&tokenize(text), model.vocab()))
}

pub fn score_tweet(tweet: &Tweet, inputs: &AnalysisInputs, features: &FeatureConfig) -> Result<ScoredTweet> {
    let tokens = tokenize(&tweet.text);
    let p_news = news::posterior(&inputs.model, &vectorize(&tokens, inputs.model.vocab()));
    let sentiment = score(&tokens, &inputs.sentiment);
    let features = extract(tweet, &sentiment, p_news, features)?;
    Ok(ScoredTweet {
        p_news,
        sentiment,
        features,
    })
}

/// Loads inputs and the tweet corpus named in `config`, then runs [`analyze_tweets`].
pub fn run_analysis(config: &AnalysisConfig) -> Result<Report> {
    let inputs = AnalysisInputs::load(config)?;
    let loaded = read_tweets(
        &config.corpus,
        LoadOptions {
            skip_malformed: config.skip_malformed,
        },
    )
    .map_err(|e| e.in_stage("tweet corpus"))?;
    let mut report = analyze_tweets(&loaded.tweets, &inputs, config)?;
    report.skipped_records = loaded.skipped.len();
    Ok(report)
}

pub fn analyze_tweets(tweets: &[Tweet], inputs: &AnalysisInputs, config: &AnalysisConfig) -> Result<Report> {
    let mut stages = vec![StageCount::new("loaded", tweets.len())];
    if tweets.is_empty() {
        return Err(Error::Data("tweet corpus is empty".into()));
    }

    let kept: Vec<&Tweet> = if config.language_filter {
        tweets
            .iter()
            .filter(|t| is_english(t, &inputs.english, config.require_declared))
            .collect()
    } else {
        tweets.iter().collect()
    };
    stages.push(StageCount::new("english", kept.len()));
    if kept.is_empty() {
        return Err(Error::Data("no tweets left after the language filter".into()).in_stage("language filter"));
    }

    let feature_config = config.features();
    let scored = kept
        .iter()
        .map(|t| score_tweet(t, inputs, &feature_config))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage("feature extraction"))?;
    let posteriors: Vec<f64> = scored.iter().map(|s| s.p_news).collect();
    let rate_of_news = news_rate(&posteriors)?;

    let mut blocks = vec![fit_block(SUBSET_ALL, &scored, &config.fit).map_err(|e| e.in_stage("model (all)"))?];

    if config.arousal_filter {
        let aroused: Vec<ScoredTweet> = scored.iter().filter(|s| s.sentiment.arousal > 0).cloned().collect();
        stages.push(StageCount::new(SUBSET_AROUSED, aroused.len()));
        if aroused.is_empty() {
            return Err(Error::Data("no tweets with arousal > 0".into()).in_stage("arousal filter"));
        }
        blocks.push(fit_block(SUBSET_AROUSED, &aroused, &config.fit).map_err(|e| e.in_stage("model (arousal>0)"))?);
    }

    Ok(Report {
        corpus: config.corpus_name.clone(),
        stages,
        rate_of_news,
        classifier: inputs.classifier.clone(),
        blocks,
        skipped_records: 0,
        config: config.clone(),
    })
}

/// Fits the full model and every drop-one sub-model for one tweet subset.
///
/// Covariates that are constant or collinear in the subset are left out of
/// the full model and reported with a note instead of statistics.
pub fn fit_block(subset: &str, scored: &[ScoredTweet], options: &FitOptions) -> Result<ModelBlock> {
    let rows: Vec<[f64; 6]> = scored.iter().map(|s| s.features.row()).collect();
    let response: Vec<bool> = scored.iter().map(|s| s.features.is_retweet).collect();
    let n = rows.len();
    let retweets = response.iter().filter(|&&y| y).count();

    let mut rows_out: Vec<CovariateRow> = COVARIATES
        .iter()
        .enumerate()
        .map(|(j, name)| CovariateRow::blank(name, rows.iter().filter(|r| r[j + 1] != 0.0).count()))
        .collect();

    let mut active: Vec<usize> = vec![0];
    for (j, row) in rows_out.iter_mut().enumerate() {
        let first = rows.first().map(|r| r[j + 1]);
        if rows.iter().all(|r| Some(r[j + 1]) == first) {
            row.note = Some(format!("constant covariate (always {})", first.unwrap_or(0.0)));
        } else {
            active.push(j + 1);
        }
    }

    let mut columns = vec!["intercept".to_owned()];
    columns.extend(COVARIATES.iter().map(|c| (*c).to_owned()));
    let full = DesignMatrix::from_rows(columns, &rows, response)?;
    let mut design = full.select_columns(&active)?;
    loop {
        let dependent = design.dependent_columns();
        let Some(&k) = dependent.first() else { break };
        if k == 0 {
            return Err(Error::Data("intercept column is degenerate".into()));
        }
        let j = active[k];
        rows_out[j - 1].note = Some("collinear with other covariates".into());
        active.remove(k);
        design = full.select_columns(&active)?;
    }

    let fit = fit_logistic(&design, options)?;
    if !fit.converged {
        return Err(Error::Numerical(
            fit.warning.clone().unwrap_or_else(|| "full model did not converge".into()),
        ));
    }
    let wald = wald_statistics(&fit)?;

    for (k, &j) in active.iter().enumerate().skip(1) {
        let row = &mut rows_out[j - 1];
        row.beta = Some(fit.beta[k]);
        row.std_err = Some(fit.std_err[k]);
        row.wald = Some(wald[k]);
        let reduced = fit_logistic(&design.drop_column(k)?, options);
        match reduced {
            Ok(sub) if sub.converged => match likelihood_ratio_test(&fit, &sub, 1) {
                Ok(test) => {
                    row.lr_statistic = Some(test.statistic);
                    row.lr_df = Some(test.df);
                    row.lr_p_value = Some(test.p_value);
                    row.reduced_log_lik = Some(sub.log_lik);
                }
                Err(e) => row.note = Some(format!("likelihood-ratio test failed: {e}")),
            },
            Ok(sub) => {
                row.note = Some(format!(
                    "drop-one sub-model did not converge: {}",
                    sub.warning.unwrap_or_default()
                ))
            }
            Err(e) => row.note = Some(format!("drop-one sub-model failed: {e}")),
        }
    }

    Ok(ModelBlock {
        subset: subset.to_owned(),
        n,
        retweets,
        intercept: fit.beta[0],
        intercept_std_err: fit.std_err[0],
        log_lik: fit.log_lik,
        iterations: fit.iterations,
        converged: fit.converged,
        warning: fit.warning,
        covariates: rows_out,
    })
}

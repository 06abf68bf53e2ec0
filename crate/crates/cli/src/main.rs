use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use virality_core::corpus::LoadOptions;
use virality_core::features::{extract, write_feature_dump, FeatureConfig, InteractionMode};
use virality_core::news::{self, holdout_accuracy, news_rate, train_on_sentences, TrainingConfig};
use virality_core::pipeline::{
    self, read_labeled_corpus, read_news_model, read_sentiment_lexicon, read_stopwords,
    read_tweets, AnalysisConfig,
};
use virality_core::report::{emit_report, ReportFormat};
use virality_core::sentiment::{negative_flag, score, NegativePolicy};
use virality_core::synth::{register_corpus, synth_generate, synth_tweets, write_labeled_corpus, TweetSynthConfig};
use virality_core::tokenizer::{tokenize, DEFAULT_VOCAB_SIZE};
use virality_core::{corpus, glm, Error, ErrorKind};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Tweet virality analysis: news classification, sentiment and retweet GLMs.
#[derive(Debug, Parser)]
#[command(name = "virality", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train the news classifier on a labeled sentence corpus and report holdout accuracy.
    TrainNews(TrainNewsArgs),
    /// Print p(news) for every tweet.
    Classify(ClassifyArgs),
    /// Print valence, arousal and the negative flag for every tweet.
    Sentiment(SentimentArgs),
    /// Print the GLM covariates and retweet response for every tweet.
    Features(FeaturesArgs),
    /// Run the full pipeline and print a report.
    Analyze(AnalyzeArgs),
    /// Generate synthetic data with known structure.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct LabeledCorpusArgs {
    /// Category treated as news.
    #[arg(long, default_value = "news")]
    news_category: String,
    /// Categories dropped before training (repeatable).
    #[arg(long = "exclude")]
    exclude: Vec<String>,
    /// Stopword list, one word per line (bundled list when omitted).
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_VOCAB_SIZE)]
    vocab_size: usize,
    /// Additive smoothing constant.
    #[arg(long, default_value_t = news::DEFAULT_ALPHA)]
    alpha: f64,
    /// Training fraction of each holdout split.
    #[arg(long, default_value_t = news::DEFAULT_TRAIN_FRACTION)]
    split: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrainNewsArgs {
    /// Labeled corpus, `category<TAB>tokens` per line.
    corpus: PathBuf,
    #[command(flatten)]
    labeled: LabeledCorpusArgs,
    /// Number of seeded holdout splits (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    repeats: u64,
    /// Where to write the model trained on the whole corpus.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TweetInput {
    /// Tweet corpus, one JSON record per line.
    tweets: PathBuf,
    /// Skip malformed or duplicate records instead of aborting.
    #[arg(long)]
    skip_malformed: bool,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    input: TweetInput,
    /// Trained news model.
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct SentimentArgs {
    #[command(flatten)]
    input: TweetInput,
    #[arg(long)]
    sentiment_lexicon: Option<PathBuf>,
    #[arg(long, default_value = "valence")]
    negative_policy: NegativePolicy,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    #[command(flatten)]
    input: TweetInput,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    sentiment_lexicon: Option<PathBuf>,
    #[arg(long, default_value = "valence")]
    negative_policy: NegativePolicy,
    #[arg(long, default_value = "product")]
    interaction_mode: InteractionMode,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: TweetInput,
    /// Name shown in the report.
    #[arg(long)]
    name: Option<String>,
    /// Trained news model; alternatively train from --labeled-corpus.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, conflicts_with = "model")]
    labeled_corpus: Option<PathBuf>,
    #[command(flatten)]
    labeled: LabeledCorpusArgs,
    #[arg(long)]
    english_lexicon: Option<PathBuf>,
    #[arg(long)]
    sentiment_lexicon: Option<PathBuf>,
    #[arg(long, default_value = "valence")]
    negative_policy: NegativePolicy,
    #[arg(long, default_value = "product")]
    interaction_mode: InteractionMode,
    /// Require the declared language to be English (or absent).
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    require_declared_lang: bool,
    /// Skip the englishness filter entirely.
    #[arg(long)]
    no_language_filter: bool,
    /// Also fit the subset of tweets with arousal > 0.
    #[arg(long)]
    arousal_filter: bool,
    #[arg(long, default_value_t = glm::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = glm::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// tsv or json.
    #[arg(long, default_value = "tsv")]
    format: ReportFormat,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(subcommand)]
    kind: SynthKind,
}

#[derive(Debug, Subcommand)]
enum SynthKind {
    /// Binary covariates with a logit-model response.
    Table {
        /// Intercept followed by one coefficient per covariate, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        beta: Vec<f64>,
        /// Presence probability per covariate (default 0.5 each).
        #[arg(long, value_delimiter = ',')]
        marginals: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// News-register vs chat-register labeled sentences.
    Corpus {
        #[arg(long, default_value_t = 1000)]
        news: usize,
        #[arg(long, default_value_t = 4000)]
        other: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Tweets whose retweets follow a known logit model.
    Tweets {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Linear-predictor boost for negative news-register tweets.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        boost: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Core(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_tweets(input: &TweetInput) -> Result<Vec<corpus::Tweet>, Failure> {
    let loaded = read_tweets(
        &input.tweets,
        LoadOptions {
            skip_malformed: input.skip_malformed,
        },
    )?;
    for err in &loaded.skipped {
        eprintln!("skipped: {err}");
    }
    Ok(loaded.tweets)
}

fn train_news(args: &TrainNewsArgs) -> Result<(), Failure> {
    let l = &args.labeled;
    if args.repeats == 0 {
        return Err(Error::Config("--repeats must be at least 1".into()).into());
    }
    let sentences = read_labeled_corpus(&args.corpus, &l.news_category, &l.exclude)?;
    let stopwords = read_stopwords(l.stopwords.as_deref())?;
    let config = TrainingConfig {
        vocab_size: l.vocab_size,
        alpha: l.alpha,
        train_fraction: l.split,
    };
    let stats = corpus::CorpusStats::for_labeled(&sentences);
    let seeds: Vec<u64> = (0..args.repeats).map(|i| l.seed + i).collect();
    let summary = holdout_accuracy(&sentences, &stopwords, &config, &seeds)?;

    let mut out = io::stdout().lock();
    writeln!(out, "sentences\t{}", stats.total)?;
    for (label, count) in &stats.per_label {
        writeln!(out, "{label}\t{count}")?;
    }
    writeln!(out, "stopwords\t{}", stopwords.len())?;
    for run in &summary.runs {
        writeln!(
            out,
            "seed\t{}\ttrain\t{}\ttest\t{}\taccuracy\t{}",
            run.seed, run.train_size, run.test_size, run.accuracy
        )?;
    }
    writeln!(out, "accuracy_mean\t{}", summary.mean)?;
    writeln!(out, "accuracy_std\t{}", summary.std_dev)?;

    if let Some(path) = &args.output {
        let model = train_on_sentences(&sentences, &stopwords, &config)?;
        let mut w = output(Some(path))?;
        model.write_to(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn classify(args: &ClassifyArgs) -> Result<(), Failure> {
    let model = read_news_model(&args.model)?;
    let tweets = load_tweets(&args.input)?;
    let mut out = output(None)?;
    writeln!(out, "id\tp_news\tnews")?;
    let mut posteriors = Vec::with_capacity(tweets.len());
    for t in &tweets {
        let p = pipeline::newsness(&model, &t.text);
        posteriors.push(p);
        writeln!(out, "{}\t{p}\t{}", t.id, u8::from(news::is_news(p)))?;
    }
    out.flush()?;
    eprintln!("rate_of_news\t{}", news_rate(&posteriors)?);
    Ok(())
}

fn sentiment(args: &SentimentArgs) -> Result<(), Failure> {
    let lexicon = read_sentiment_lexicon(args.sentiment_lexicon.as_deref())?;
    let tweets = load_tweets(&args.input)?;
    let mut out = output(None)?;
    writeln!(out, "id\tvalence\tarousal\tnegative")?;
    for t in &tweets {
        let s = score(&tokenize(&t.text), &lexicon);
        let negative = negative_flag(&s, args.negative_policy);
        writeln!(out, "{}\t{}\t{}\t{}", t.id, s.valence, s.arousal, u8::from(negative))?;
    }
    out.flush()?;
    Ok(())
}

fn features(args: &FeaturesArgs) -> Result<(), Failure> {
    let model = read_news_model(&args.model)?;
    let lexicon = read_sentiment_lexicon(args.sentiment_lexicon.as_deref())?;
    let tweets = load_tweets(&args.input)?;
    let config = FeatureConfig {
        negative_policy: args.negative_policy,
        interaction_mode: args.interaction_mode,
    };
    let mut rows = Vec::with_capacity(tweets.len());
    for t in &tweets {
        let s = score(&tokenize(&t.text), &lexicon);
        rows.push(extract(t, &s, pipeline::newsness(&model, &t.text), &config)?);
    }
    let mut out = output(None)?;
    write_feature_dump(&mut out, tweets.iter().map(|t| t.id.as_str()).zip(&rows))?;
    out.flush()?;
    Ok(())
}

fn analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let l = &args.labeled;
    let config = AnalysisConfig {
        corpus_name: args.name.clone().unwrap_or_else(|| {
            args.input
                .tweets
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "corpus".into())
        }),
        corpus: args.input.tweets.clone(),
        english_lexicon: args.english_lexicon.clone(),
        sentiment_lexicon: args.sentiment_lexicon.clone(),
        stopwords: l.stopwords.clone(),
        news_model: args.model.clone(),
        labeled_corpus: args.labeled_corpus.clone(),
        news_category: l.news_category.clone(),
        excluded_categories: l.exclude.clone(),
        vocab_size: l.vocab_size,
        split: l.split,
        alpha: l.alpha,
        seed: l.seed,
        negative_policy: args.negative_policy,
        interaction_mode: args.interaction_mode,
        language_filter: !args.no_language_filter,
        require_declared: args.require_declared_lang,
        arousal_filter: args.arousal_filter,
        skip_malformed: args.input.skip_malformed,
        fit: glm::FitOptions {
            tol: args.tol,
            max_iter: args.max_iter,
        },
    };
    let report = pipeline::run_analysis(&config)?;
    let mut out = output(args.output.as_deref())?;
    out.write_all(emit_report(&report, args.format).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<(), Failure> {
    match &args.kind {
        SynthKind::Table {
            beta,
            marginals,
            n,
            seed,
            output: path,
        } => {
            let marginals = if marginals.is_empty() {
                vec![0.5; beta.len().saturating_sub(1)]
            } else {
                marginals.clone()
            };
            let table = synth_generate(beta, *n, *seed, &marginals)?;
            let mut out = output(path.as_deref())?;
            table.write_tsv(&mut out)?;
            out.flush()?;
        }
        SynthKind::Corpus {
            news,
            other,
            seed,
            output: path,
        } => {
            let sentences = register_corpus(*news, *other, *seed);
            let mut out = output(path.as_deref())?;
            write_labeled_corpus(&mut out, &sentences)?;
            out.flush()?;
        }
        SynthKind::Tweets {
            n,
            seed,
            boost,
            output: path,
        } => {
            let config = TweetSynthConfig {
                n: *n,
                seed: *seed,
                news_negative_boost: *boost,
                ..TweetSynthConfig::default()
            };
            let (tweets, _) = synth_tweets(&config)?;
            let mut out = output(path.as_deref())?;
            corpus::write_tweets(&mut out, &tweets)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::TrainNews(args) => train_news(args),
        Command::Classify(args) => classify(args),
        Command::Sentiment(args) => sentiment(args),
        Command::Features(args) => features(args),
        Command::Analyze(args) => analyze(args),
        Command::Synth(args) => synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DATA)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Config => EXIT_USAGE,
                ErrorKind::Data => EXIT_DATA,
                ErrorKind::Numerical => EXIT_NUMERICAL,
            })
        }
    }
}

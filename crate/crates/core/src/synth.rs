//! Seeded synthetic data: GLM feature tables with known coefficients, a
//! two-register (news vs chat) labeled corpus, and tweet corpora whose
//! retweets follow a known logit model.

use std::io::Write;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Label, LabeledSentence, Tweet};
use crate::error::{Error, Result};
use crate::glm::{inverse_logit, DesignMatrix};

/// Binary covariates with the response drawn from the logit model.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthTable {
    pub columns: Vec<String>,
    /// Rows including the leading intercept 1.
    pub rows: Vec<Vec<f64>>,
    pub response: Vec<bool>,
}

impl SynthTable {
    pub fn design(&self) -> Result<DesignMatrix> {
        DesignMatrix::from_rows(self.columns.clone(), &self.rows, self.response.clone())
    }

    pub fn retweet_rate(&self) -> f64 {
        self.response.iter().filter(|&&y| y).count() as f64 / self.response.len() as f64
    }

    /// Same layout as the feature dump: id, f0, covariates, retweet.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "id\t{}\tretweet", self.columns.join("\t"))?;
        for (i, (row, y)) in self.rows.iter().zip(&self.response).enumerate() {
            write!(w, "{i}")?;
            for x in row {
                write!(w, "\t{x}")?;
            }
            writeln!(w, "\t{}", u8::from(*y))?;
        }
        Ok(())
    }
}

/// Draws `n` rows with covariate `j` present with probability
/// `feature_marginals[j]` and `y ~ Bernoulli(inverse_logit(x·beta))`.
///
/// `beta[0]` is the intercept, so `beta.len() == feature_marginals.len() + 1`.
pub fn synth_generate(beta: &[f64], n: usize, seed: u64, feature_marginals: &[f64]) -> Result<SynthTable> {
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    if beta.len() != feature_marginals.len() + 1 {
        return Err(Error::Config(format!(
            "{} coefficients for {} covariates (expected intercept + one per covariate)",
            beta.len(),
            feature_marginals.len()
        )));
    }
    if let Some(m) = feature_marginals.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(Error::Config(format!("marginal {m} is not a probability")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut response = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = Vec::with_capacity(beta.len());
        row.push(1.0);
        for &m in feature_marginals {
            row.push(if rng.random_bool(m) { 1.0 } else { 0.0 });
        }
        let eta: f64 = row.iter().zip(beta).map(|(x, b)| x * b).sum();
        response.push(rng.random::<f64>() < inverse_logit(eta));
        rows.push(row);
    }
    let mut columns = vec!["intercept".to_owned()];
    columns.extend((1..beta.len()).map(|j| format!("x{j}")));
    Ok(SynthTable {
        columns,
        rows,
        response,
    })
}

const NEWS_WORDS: &[&str] = &[
    "obama", "deal", "summit", "climate", "minister", "government", "officials", "talks", "agreement",
    "president", "reported", "percent", "economy", "leaders", "nations", "conference", "delegates",
    "emissions", "policy", "senate", "budget", "market", "prices", "investors", "police", "court",
    "election", "announced", "spokesman", "agency", "treaty", "carbon", "tax", "bill", "congress",
    "parliament", "billion", "million", "statement", "report", "administration", "secretary", "capital",
    "negotiators", "draft", "ministers", "official", "reuters", "copenhagen", "chancellor",
];

const CHAT_WORDS: &[&str] = &[
    "lol", "haha", "omg", "tonight", "gonna", "wanna", "coffee", "weekend", "bed", "pizza", "movie",
    "friends", "mom", "party", "song", "dinner", "lunch", "sleep", "morning", "guys", "ya", "u", "im",
    "dude", "bro", "game", "phone", "watching", "hair", "shoes", "music", "episode", "snack", "nap",
    "cat", "dog", "birthday", "bestie", "selfie", "hungry", "tweeps", "gotta", "kinda", "yall", "sis",
    "brb", "cute", "jk", "lmao", "shower",
];

const SHARED_WORDS: &[&str] = &[
    "today", "new", "time", "people", "day", "think", "know", "going", "see", "make", "want", "year",
    "week", "city", "home", "world", "night", "work", "thing", "way", "first", "last", "back", "still",
];

const FUNCTION_WORDS: &[&str] = &[
    "the", "and", "of", "to", "is", "for", "with", "this", "that", "was", "have", "about", "what",
];

const NEGATIVE_WORDS: &[&str] = &[
    "bad", "crisis", "fails", "terrible", "angry", "sad", "disaster", "hate", "worst", "problem", "war",
    "fear", "collapse", "awful", "protest", "failure", "worried", "abandoned",
];

const POSITIVE_WORDS: &[&str] = &[
    "good", "love", "great", "happy", "win", "best", "hope", "awesome", "nice", "success", "fun",
    "thanks", "excited", "beautiful",
];

const FOREIGN_WORDS: &[&str] = &["que", "não", "para", "uma", "muito", "eu", "com", "mas", "por"];

const HASHTAGS: &[&str] = &["#fb", "#ff", "#tweet", "#now", "#live", "#followfriday"];

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool.choose(rng).expect("word pools are non-empty")
}

fn register_words(rng: &mut ChaCha8Rng, label: Label, count: usize, words: &mut Vec<String>) {
    let pool = match label {
        Label::News => NEWS_WORDS,
        Label::Other => CHAT_WORDS,
    };
    for _ in 0..count {
        let word = if rng.random_bool(0.7) {
            pick(rng, pool)
        } else {
            pick(rng, SHARED_WORDS)
        };
        words.push(word.to_owned());
    }
}

/// Labeled sentences in a news-like and a chat-like register, shuffled.
///
/// Category names are `news` and `chat`.
pub fn register_corpus(n_news: usize, n_other: usize, seed: u64) -> Vec<LabeledSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<Label> = std::iter::repeat_n(Label::News, n_news)
        .chain(std::iter::repeat_n(Label::Other, n_other))
        .collect();
    rand::seq::SliceRandom::shuffle(labels.as_mut_slice(), &mut rng);
    labels
        .into_iter()
        .map(|label| {
            let mut tokens = Vec::new();
            let len = rng.random_range(5..=11);
            register_words(&mut rng, label, len, &mut tokens);
            for _ in 0..rng.random_range(1..=3) {
                let at = rng.random_range(0..=tokens.len());
                tokens.insert(at, pick(&mut rng, FUNCTION_WORDS).to_owned());
            }
            if rng.random_bool(0.3) {
                let pool = if rng.random_bool(0.5) { NEGATIVE_WORDS } else { POSITIVE_WORDS };
                let at = rng.random_range(0..=tokens.len());
                tokens.insert(at, pick(&mut rng, pool).to_owned());
            }
            LabeledSentence {
                tokens,
                label,
                source_category: match label {
                    Label::News => "news".to_owned(),
                    Label::Other => "chat".to_owned(),
                },
            }
        })
        .collect()
}

/// Writes sentences in the `category<TAB>tokens` corpus format.
pub fn write_labeled_corpus<W: Write>(mut w: W, sentences: &[LabeledSentence]) -> std::io::Result<()> {
    for s in sentences {
        writeln!(w, "{}\t{}", s.source_category, s.tokens.join(" "))?;
    }
    Ok(())
}

/// Parameters of the synthetic tweet stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TweetSynthConfig {
    pub n: usize,
    pub seed: u64,
    pub news_share: f64,
    pub negative_share: f64,
    pub positive_share: f64,
    pub hashtag_share: f64,
    pub mention_share: f64,
    pub url_share: f64,
    /// Share of non-English tweets (declared `pt`, foreign words only).
    pub foreign_share: f64,
    /// Logit coefficients for intercept, hashtag, mention, url, negative.
    pub beta: [f64; 5],
    /// Added to the linear predictor of negative tweets written in the news register.
    pub news_negative_boost: f64,
}

impl Default for TweetSynthConfig {
    fn default() -> Self {
        TweetSynthConfig {
            n: 1_000,
            seed: 0,
            news_share: 0.3,
            negative_share: 0.3,
            positive_share: 0.3,
            hashtag_share: 0.4,
            mention_share: 0.3,
            url_share: 0.3,
            foreign_share: 0.05,
            beta: [-1.5, 0.4, 0.2, 0.6, -0.2],
            news_negative_boost: 0.0,
        }
    }
}

/// Ground truth behind one synthetic tweet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TweetTruth {
    pub register: Label,
    pub english: bool,
    pub hashtag: bool,
    pub mention: bool,
    pub url: bool,
    pub negative: bool,
    pub retweet: bool,
}

pub fn synth_tweets(config: &TweetSynthConfig) -> Result<(Vec<Tweet>, Vec<TweetTruth>)> {
    let shares = [
        config.news_share,
        config.negative_share,
        config.positive_share,
        config.hashtag_share,
        config.mention_share,
        config.url_share,
        config.foreign_share,
    ];
    if shares.iter().any(|s| !(0.0..=1.0).contains(s)) {
        return Err(Error::Config("synthetic shares must be probabilities".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tweets = Vec::with_capacity(config.n);
    let mut truths = Vec::with_capacity(config.n);
    for i in 0..config.n {
        let id = format!("t{i}");
        if rng.random_bool(config.foreign_share) {
            let len = rng.random_range(4..=9);
            let words: Vec<&str> = (0..len).map(|_| pick(&mut rng, FOREIGN_WORDS)).collect();
            let retweet = rng.random_bool(0.2);
            let mut text = words.join(" ");
            if retweet {
                text = format!("RT @user{}: {text}", rng.random_range(0..100));
            }
            tweets.push(Tweet::new(id, text).with_language("pt"));
            truths.push(TweetTruth {
                register: Label::Other,
                english: false,
                hashtag: false,
                mention: false,
                url: false,
                negative: false,
                retweet,
            });
            continue;
        }

        let register = if rng.random_bool(config.news_share) {
            Label::News
        } else {
            Label::Other
        };
        let mut words = Vec::new();
        let len = rng.random_range(4..=9);
        register_words(&mut rng, register, len, &mut words);
        for _ in 0..rng.random_range(1..=2) {
            let at = rng.random_range(0..=words.len());
            words.insert(at, pick(&mut rng, FUNCTION_WORDS).to_owned());
        }
        let negative = rng.random_bool(config.negative_share);
        let sentiment_words = if negative {
            (NEGATIVE_WORDS, rng.random_range(1..=2))
        } else if rng.random_bool(config.positive_share) {
            (POSITIVE_WORDS, 1)
        } else {
            (POSITIVE_WORDS, 0)
        };
        for _ in 0..sentiment_words.1 {
            let at = rng.random_range(0..=words.len());
            words.insert(at, pick(&mut rng, sentiment_words.0).to_owned());
        }
        let hashtag = rng.random_bool(config.hashtag_share);
        let mention = rng.random_bool(config.mention_share);
        let url = rng.random_bool(config.url_share);
        if hashtag {
            words.push(pick(&mut rng, HASHTAGS).to_owned());
        }
        if mention {
            let at = rng.random_range(0..=words.len());
            words.insert(at, format!("@friend{}", rng.random_range(0..100)));
        }
        if url {
            words.push(format!("http://t.co/{:06x}", rng.random_range(0..0xffffffu32)));
        }

        let b = |x: bool| if x { 1.0 } else { 0.0 };
        let boost = if register == Label::News && negative {
            config.news_negative_boost
        } else {
            0.0
        };
        let eta = config.beta[0]
            + config.beta[1] * b(hashtag)
            + config.beta[2] * b(mention)
            + config.beta[3] * b(url)
            + config.beta[4] * b(negative)
            + boost;
        let retweet = rng.random::<f64>() < inverse_logit(eta);
        let mut text = words.join(" ");
        if retweet {
            text = format!("RT @user{}: {text}", rng.random_range(0..100));
        }
        let tweet = Tweet::new(id, text);
        tweets.push(if rng.random_bool(0.9) { tweet.with_language("en") } else { tweet });
        truths.push(TweetTruth {
            register,
            english: true,
            hashtag,
            mention,
            url,
            negative,
            retweet,
        });
    }
    Ok((tweets, truths))
}

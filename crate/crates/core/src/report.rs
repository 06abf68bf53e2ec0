//! Analysis reports and their TSV / JSON renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::news::NaiveBayesModel;
use crate::pipeline::AnalysisConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCount {
    pub stage: String,
    pub n: usize,
}

impl StageCount {
    pub fn new(stage: &str, n: usize) -> Self {
        StageCount {
            stage: stage.to_owned(),
            n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSummary {
    pub vocab_size: usize,
    pub stopword_count: usize,
    pub alpha: f64,
    pub prior_news: f64,
    /// Holdout accuracy when the classifier was trained as part of the run.
    pub holdout_accuracy: Option<f64>,
}

impl ClassifierSummary {
    pub fn of(model: &NaiveBayesModel, holdout_accuracy: Option<f64>) -> Self {
        ClassifierSummary {
            vocab_size: model.vocab().len(),
            stopword_count: model.vocab().stopword_count(),
            alpha: model.smoothing_alpha(),
            prior_news: model.log_prior_news().exp(),
            holdout_accuracy,
        }
    }
}

/// Statistics for one covariate; cells stay empty when the covariate could
/// not be estimated, with the reason in `note`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateRow {
    pub name: String,
    /// Rows where the covariate is non-zero.
    pub present: usize,
    pub beta: Option<f64>,
    pub std_err: Option<f64>,
    /// Wald statistic, the "t" column.
    pub wald: Option<f64>,
    pub lr_statistic: Option<f64>,
    pub lr_df: Option<u32>,
    pub lr_p_value: Option<f64>,
    pub reduced_log_lik: Option<f64>,
    pub note: Option<String>,
}

impl CovariateRow {
    pub fn blank(name: &str, present: usize) -> Self {
        CovariateRow {
            name: name.to_owned(),
            present,
            beta: None,
            std_err: None,
            wald: None,
            lr_statistic: None,
            lr_df: None,
            lr_p_value: None,
            reduced_log_lik: None,
            note: None,
        }
    }
}

/// Full-model fit and drop-one tests on one tweet subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBlock {
    pub subset: String,
    pub n: usize,
    pub retweets: usize,
    pub intercept: f64,
    pub intercept_std_err: f64,
    pub log_lik: f64,
    pub iterations: usize,
    pub converged: bool,
    pub warning: Option<String>,
    pub covariates: Vec<CovariateRow>,
}

impl ModelBlock {
    pub fn covariate(&self, name: &str) -> Option<&CovariateRow> {
        self.covariates.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub corpus: String,
    /// Tweet counts after each filter stage, in pipeline order.
    pub stages: Vec<StageCount>,
    pub rate_of_news: f64,
    pub classifier: ClassifierSummary,
    pub blocks: Vec<ModelBlock>,
    pub skipped_records: usize,
    pub config: AnalysisConfig,
}

impl Report {
    pub fn block(&self, subset: &str) -> Option<&ModelBlock> {
        self.blocks.iter().find(|b| b.subset == subset)
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::Data(format!("malformed report: {e}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Tsv,
    /// Pretty-printed JSON with the full fit detail and config echo.
    Structured,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(ReportFormat::Tsv),
            "json" | "structured" => Ok(ReportFormat::Structured),
            other => Err(format!("unknown report format {other:?} (expected tsv or json)")),
        }
    }
}

pub const TSV_HEADER: &str =
    "corpus\tsubset\tN\trate_of_news\tcovariate\tpresent\tbeta\tstd_err\tt\tlr_statistic\tlr_df\tlr_p_value\tnote";

fn cell<T: ToString>(value: Option<T>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn clean(text: &str) -> String {
    text.replace(['\t', '\n', '\r'], " ")
}

/// One row per (subset, covariate), header first.
pub fn render_tsv(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(TSV_HEADER);
    out.push('\n');
    for block in &report.blocks {
        for row in &block.covariates {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                clean(&report.corpus),
                block.subset,
                block.n,
                report.rate_of_news,
                row.name,
                row.present,
                cell(row.beta),
                cell(row.std_err),
                cell(row.wald),
                cell(row.lr_statistic),
                cell(row.lr_df),
                cell(row.lr_p_value),
                row.note.as_deref().map(clean).unwrap_or_default(),
            );
        }
    }
    out
}

pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Tsv => render_tsv(report),
        ReportFormat::Structured => {
            let mut json = serde_json::to_string_pretty(report).expect("reports serialize");
            json.push('\n');
            json
        }
    }
}

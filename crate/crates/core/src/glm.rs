//! Binomial GLM with logit link: `p(y = 1 | x) = 1 / (1 + exp(-x·β))`.
//!
//! Coefficients are fitted by Newton-Raphson / IRLS starting from β = 0. All
//! sums over observations use [`ExactSum`], so a fit does not depend on the
//! order of the rows.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{chi_square_sf, ExactSum};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 50;
/// Information matrices worse conditioned than this are treated as singular.
pub const MAX_CONDITION: f64 = 1e12;
/// Slack allowed for a negative likelihood-ratio statistic.
pub const LR_NEGATIVE_SLACK: f64 = 1e-8;

pub fn inverse_logit(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^eta)` without overflow.
fn softplus(eta: f64) -> f64 {
    eta.max(0.0) + (-eta.abs()).exp().ln_1p()
}

/// Bernoulli log-likelihood of one observation with linear predictor `eta`.
pub fn log_likelihood_term(eta: f64, y: bool) -> f64 {
    if y {
        eta - softplus(eta)
    } else {
        -softplus(eta)
    }
}

/// Covariate rows (first column the intercept) and binary responses.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    columns: Vec<String>,
    data: Vec<f64>,
    response: Vec<bool>,
}

impl DesignMatrix {
    pub fn from_rows<R: AsRef<[f64]>>(columns: Vec<String>, rows: &[R], response: Vec<bool>) -> Result<Self> {
        let width = columns.len();
        if width == 0 {
            return Err(Error::Data("design needs at least the intercept column".into()));
        }
        if rows.len() != response.len() {
            return Err(Error::Data(format!(
                "{} rows but {} responses",
                rows.len(),
                response.len()
            )));
        }
        let mut data = Vec::with_capacity(rows.len() * width);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != width {
                return Err(Error::Data(format!("row {i} has {} values, expected {width}", row.len())));
            }
            if row[0] != 1.0 {
                return Err(Error::Data(format!("row {i}: intercept column must be 1")));
            }
            if let Some(x) = row.iter().find(|x| !x.is_finite()) {
                return Err(Error::Data(format!("row {i}: non-finite covariate {x}")));
            }
            data.extend_from_slice(row);
        }
        Ok(DesignMatrix {
            columns,
            data,
            response,
        })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn n_rows(&self) -> usize {
        self.response.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.n_cols();
        &self.data[i * w..(i + 1) * w]
    }

    pub fn response(&self) -> &[bool] {
        &self.response
    }

    /// The design restricted to the given columns; index 0 must be kept.
    pub fn select_columns(&self, keep: &[usize]) -> Result<DesignMatrix> {
        if keep.first() != Some(&0) {
            return Err(Error::Data("the intercept column must be kept first".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&j| j >= self.n_cols()) {
            return Err(Error::Data(format!("column index {bad} out of range")));
        }
        let mut data = Vec::with_capacity(self.n_rows() * keep.len());
        for i in 0..self.n_rows() {
            let row = self.row(i);
            data.extend(keep.iter().map(|&j| row[j]));
        }
        Ok(DesignMatrix {
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
            data,
            response: self.response.clone(),
        })
    }

    /// The design without column `j` (which may not be the intercept).
    pub fn drop_column(&self, j: usize) -> Result<DesignMatrix> {
        if j == 0 {
            return Err(Error::Data("cannot drop the intercept".into()));
        }
        let keep: Vec<usize> = (0..self.n_cols()).filter(|&k| k != j).collect();
        self.select_columns(&keep)
    }

    /// Columns that are (numerically) linear combinations of earlier ones.
    pub fn dependent_columns(&self) -> Vec<usize> {
        let (n, p) = (self.n_rows(), self.n_cols());
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut dependent = Vec::new();
        for j in 0..p {
            let mut v: Vec<f64> = (0..n).map(|i| self.data[i * p + j]).collect();
            let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            // two passes of modified Gram-Schmidt for stability
            for _ in 0..2 {
                for q in &basis {
                    let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(q).for_each(|(x, qi)| *x -= dot * qi);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm0 == 0.0 || norm <= 1e-9 * norm0 {
                dependent.push(j);
            } else {
                v.iter_mut().for_each(|x| *x /= norm);
                basis.push(v);
            }
        }
        dependent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Convergence threshold on the largest absolute coefficient update.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlmFit {
    pub columns: Vec<String>,
    pub beta: Vec<f64>,
    pub std_err: Vec<f64>,
    /// Row-major inverse Fisher information at `beta`.
    pub cov: Vec<Vec<f64>>,
    pub log_lik: f64,
    pub n_obs: usize,
    pub iterations: usize,
    pub converged: bool,
    pub warning: Option<String>,
}

impl GlmFit {
    pub fn n_params(&self) -> usize {
        self.beta.len()
    }
}

/// Sufficient quantities of one Newton step at a given β.
struct Step {
    gradient: DVector<f64>,
    information: DMatrix<f64>,
    log_lik: f64,
    extreme_fitted: bool,
}

fn evaluate(design: &DesignMatrix, beta: &[f64]) -> Step {
    let p = design.n_cols();
    let mut grad: Vec<ExactSum> = vec![ExactSum::new(); p];
    let mut info: Vec<ExactSum> = vec![ExactSum::new(); p * (p + 1) / 2];
    let mut ll = ExactSum::new();
    let mut extreme_fitted = false;
    for (i, &y) in design.response().iter().enumerate() {
        let x = design.row(i);
        let eta: f64 = x.iter().zip(beta).map(|(a, b)| a * b).sum();
        let mu = inverse_logit(eta);
        let w = mu * (1.0 - mu);
        if w < 1e-12 {
            extreme_fitted = true;
        }
        let resid = f64::from(u8::from(y)) - mu;
        ll.add(log_likelihood_term(eta, y));
        let mut k = 0;
        for a in 0..p {
            grad[a].add(resid * x[a]);
            let wa = w * x[a];
            for xb in &x[..=a] {
                info[k].add(wa * xb);
                k += 1;
            }
        }
    }
    let gradient = DVector::from_iterator(p, grad.iter().map(ExactSum::value));
    let mut information = DMatrix::zeros(p, p);
    let mut k = 0;
    for a in 0..p {
        for b in 0..=a {
            let v = info[k].value();
            information[(a, b)] = v;
            information[(b, a)] = v;
            k += 1;
        }
    }
    Step {
        gradient,
        information,
        log_lik: ll.value(),
        extreme_fitted,
    }
}

/// Inverse of a symmetric positive definite matrix, refused when its
/// 1-norm condition number exceeds [`MAX_CONDITION`].
fn checked_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let inverse = m.clone().cholesky()?.inverse();
    let norm1 = |a: &DMatrix<f64>| {
        a.column_iter()
            .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let cond = norm1(m) * norm1(&inverse);
    (cond.is_finite() && cond <= MAX_CONDITION).then_some(inverse)
}

/// Maximum-likelihood fit of the logit GLM.
///
/// Non-convergence (typically complete or quasi-complete separation) is not
/// an error: the fit comes back with `converged = false` and a warning.
pub fn fit_logistic(design: &DesignMatrix, options: &FitOptions) -> Result<GlmFit> {
    let (n, p) = (design.n_rows(), design.n_cols());
    if options.tol.is_nan() || options.tol <= 0.0 || options.max_iter == 0 {
        return Err(Error::Config("tolerance must be positive and max_iter at least 1".into()));
    }
    if n <= p {
        return Err(Error::Data(format!("{n} observations cannot identify {p} coefficients")));
    }
    let positives = design.response().iter().filter(|&&y| y).count();
    if positives == 0 || positives == n {
        return Err(Error::Data(format!(
            "response is constant ({} of {n} positive)",
            positives
        )));
    }
    let dependent = design.dependent_columns();
    if !dependent.is_empty() {
        return Err(Error::RankDeficient {
            columns: dependent.iter().map(|&j| design.columns()[j].clone()).collect(),
        });
    }

    let mut beta = vec![0.0; p];
    let mut converged = false;
    let mut iterations = 0;
    let mut warning = None;
    while iterations < options.max_iter {
        let step = evaluate(design, &beta);
        let Some(solve) = checked_inverse(&step.information) else {
            warning = Some("information matrix became singular; likely complete separation".to_owned());
            break;
        };
        let delta = solve * &step.gradient;
        iterations += 1;
        let mut max_change: f64 = 0.0;
        for (b, d) in beta.iter_mut().zip(delta.iter()) {
            *b += d;
            max_change = max_change.max(d.abs());
        }
        if !max_change.is_finite() {
            warning = Some("coefficient update diverged; likely complete separation".to_owned());
            break;
        }
        if max_change < options.tol {
            converged = true;
            break;
        }
    }

    let last = evaluate(design, &beta);
    if !converged && warning.is_none() {
        warning = Some(format!(
            "no convergence after {iterations} iterations; possible complete or quasi-complete separation"
        ));
    } else if converged && last.extreme_fitted {
        warning = Some("some fitted probabilities are numerically 0 or 1".to_owned());
    }
    let cov = match checked_inverse(&last.information) {
        Some(inv) => (0..p).map(|a| (0..p).map(|b| inv[(a, b)]).collect()).collect(),
        None => {
            converged = false;
            warning.get_or_insert_with(|| "information matrix is singular at the estimate".to_owned());
            vec![vec![f64::NAN; p]; p]
        }
    };
    let std_err = (0..p).map(|j| f64::sqrt(cov[j][j])).collect();
    Ok(GlmFit {
        columns: design.columns().to_vec(),
        beta,
        std_err,
        cov,
        log_lik: last.log_lik,
        n_obs: n,
        iterations,
        converged,
        warning,
    })
}

/// `Σ_n (y_n - p_n) x_{n,j}` per coefficient; zero at the MLE.
pub fn score_residuals(design: &DesignMatrix, beta: &[f64]) -> Vec<f64> {
    evaluate(design, beta).gradient.iter().copied().collect()
}

/// Log-likelihood of `design` at an arbitrary coefficient vector.
pub fn log_likelihood(design: &DesignMatrix, beta: &[f64]) -> f64 {
    evaluate(design, beta).log_lik
}

/// Coefficient over standard error for every coefficient.
pub fn wald_statistics(fit: &GlmFit) -> Result<Vec<f64>> {
    if !fit.converged {
        return Err(Error::Numerical("Wald statistics need a converged fit".into()));
    }
    Ok(fit
        .beta
        .iter()
        .zip(&fit.std_err)
        .map(|(b, se)| if *b == 0.0 { 0.0 } else { b / se })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LrTest {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

/// `2 (ℓ_full − ℓ_reduced)` referred to a χ² distribution with `df` degrees of freedom.
pub fn likelihood_ratio_test(full: &GlmFit, reduced: &GlmFit, df: u32) -> Result<LrTest> {
    if df == 0 {
        return Err(Error::Config("likelihood-ratio test needs df >= 1".into()));
    }
    let statistic = 2.0 * (full.log_lik - reduced.log_lik);
    if !statistic.is_finite() || statistic < -LR_NEGATIVE_SLACK {
        return Err(Error::Numerical(format!(
            "likelihood-ratio statistic {statistic} is negative; models are not nested or a fit failed"
        )));
    }
    let statistic = statistic.max(0.0);
    Ok(LrTest {
        statistic,
        df,
        p_value: chi_square_sf(statistic, f64::from(df)),
    })
}

/// Evaluates the fitted model for one covariate vector (intercept included).
pub fn predict(fit: &GlmFit, features: &[f64]) -> Result<f64> {
    if features.len() != fit.beta.len() {
        return Err(Error::Data(format!(
            "{} features for {} coefficients",
            features.len(),
            fit.beta.len()
        )));
    }
    let eta: f64 = features.iter().zip(&fit.beta).map(|(x, b)| x * b).sum();
    Ok(inverse_logit(eta))
}

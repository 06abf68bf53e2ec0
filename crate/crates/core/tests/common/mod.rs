//! Independent oracles shared by the integration suites.
//!
//! Nothing here calls into the library's numerics: the logit oracle is a
//! derivative-free maximizer over a naive log-likelihood, and the Naive
//! Bayes oracle multiplies raw probabilities.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Plain per-row log-likelihood of a logit model, summed left to right.
pub fn naive_log_lik(rows: &[Vec<f64>], y: &[bool], beta: &[f64]) -> f64 {
    let mut total = 0.0;
    for (row, &yi) in rows.iter().zip(y) {
        let eta: f64 = row.iter().zip(beta).map(|(x, b)| x * b).sum();
        // log p = -log(1 + e^-eta), log(1-p) = -log(1 + e^eta)
        let s = if yi { -eta } else { eta };
        total -= if s > 0.0 { s + (-s).exp().ln_1p() } else { s.exp().ln_1p() };
    }
    total
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if hi - lo < 1e-12 {
            break;
        }
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        }
    }
    (lo + hi) / 2.0
}

/// Brute-force logit MLE: a coarse grid over [-4, 4]^p picks the start,
/// then cyclic coordinate ascent with golden-section line searches.
pub fn brute_force_logit(rows: &[Vec<f64>], y: &[bool]) -> (Vec<f64>, f64) {
    let p = rows[0].len();
    let grid: Vec<f64> = (-4..=4).map(f64::from).collect();
    let mut best = vec![0.0; p];
    let mut best_ll = naive_log_lik(rows, y, &best);
    let mut point = vec![0usize; p];
    loop {
        let beta: Vec<f64> = point.iter().map(|&i| grid[i]).collect();
        let ll = naive_log_lik(rows, y, &beta);
        if ll > best_ll {
            best_ll = ll;
            best = beta;
        }
        let mut k = 0;
        while k < p {
            point[k] += 1;
            if point[k] < grid.len() {
                break;
            }
            point[k] = 0;
            k += 1;
        }
        if k == p {
            break;
        }
    }

    // Hooke-Jeeves style: a coordinate sweep, then a line search along the
    // sweep's net displacement.
    let mut beta = best;
    let mut width = vec![2.0; p];
    let mut ll = naive_log_lik(rows, y, &beta);
    let mut stalled = 0;
    for _ in 0..20_000 {
        let before = beta.clone();
        let mut max_move: f64 = 0.0;
        for j in 0..p {
            let line = |v: f64| {
                let mut b = beta.clone();
                b[j] = v;
                naive_log_lik(rows, y, &b)
            };
            let mut w = width[j];
            let next = loop {
                let x = golden_max(line, beta[j] - w, beta[j] + w);
                if (x - beta[j]).abs() < 0.9 * w {
                    break x;
                }
                w *= 2.0;
            };
            let moved = (next - beta[j]).abs();
            if line(next) >= line(beta[j]) {
                beta[j] = next;
            }
            width[j] = (4.0 * moved).clamp(1e-6, 2.0);
            max_move = max_move.max(moved);
        }
        if max_move < 1e-10 {
            break;
        }
        let dir: Vec<f64> = beta.iter().zip(&before).map(|(a, b)| a - b).collect();
        let along = |t: f64| {
            let b: Vec<f64> = beta.iter().zip(&dir).map(|(x, d)| x + t * d).collect();
            naive_log_lik(rows, y, &b)
        };
        let mut reach = 4.0;
        let t = loop {
            let t = golden_max(along, 0.0, reach);
            if t < 0.9 * reach || reach > 1e6 {
                break t;
            }
            reach *= 4.0;
        };
        if along(t) > along(0.0) {
            for (x, d) in beta.iter_mut().zip(&dir) {
                *x += t * d;
            }
        }
        // Golden section cannot resolve the flat top much below 1e-8 in
        // beta, so stop once sweeps no longer raise the likelihood.
        let now = naive_log_lik(rows, y, &beta);
        stalled = if now - ll < 1e-13 { stalled + 1 } else { 0 };
        ll = ll.max(now);
        if stalled >= 3 {
            break;
        }
    }
    let ll = naive_log_lik(rows, y, &beta);
    (beta, ll)
}

pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// A small seeded logit dataset: intercept plus 1..=4 covariates, a mix of
/// binary and Gaussian columns, n in 50..=200.
pub struct SmallDataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub y: Vec<bool>,
}

pub fn small_dataset(seed: u64) -> SmallDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(50..=200);
    let f = rng.random_range(1..=4);
    let binary: Vec<Option<f64>> = (0..f)
        .map(|_| rng.random_bool(0.6).then(|| rng.random_range(0.2..0.8)))
        .collect();
    let beta: Vec<f64> = (0..=f).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = vec![1.0];
        for share in &binary {
            row.push(match share {
                Some(s) => f64::from(u8::from(rng.random_bool(*s))),
                None => standard_normal(&mut rng),
            });
        }
        let eta: f64 = row.iter().zip(&beta).map(|(x, b)| x * b).sum();
        y.push(rng.random::<f64>() < 1.0 / (1.0 + (-eta).exp()));
        rows.push(row);
    }
    let mut columns = vec!["(intercept)".to_owned()];
    columns.extend((1..=f).map(|j| format!("x{j}")));
    SmallDataset { columns, rows, y }
}

/// Posterior of news by direct evaluation of the Bernoulli product, from
/// raw class counts.
pub fn direct_posterior(
    present: &[bool],
    counts_news: &[u64],
    counts_other: &[u64],
    n_news: u64,
    n_other: u64,
    alpha: f64,
) -> f64 {
    let total = (n_news + n_other) as f64;
    let mut joint_news = n_news as f64 / total;
    let mut joint_other = n_other as f64 / total;
    for (d, &on) in present.iter().enumerate() {
        let pn = (counts_news[d] as f64 + alpha) / (n_news as f64 + 2.0 * alpha);
        let po = (counts_other[d] as f64 + alpha) / (n_other as f64 + 2.0 * alpha);
        joint_news *= if on { pn } else { 1.0 - pn };
        joint_other *= if on { po } else { 1.0 - po };
    }
    joint_news / (joint_news + joint_other)
}

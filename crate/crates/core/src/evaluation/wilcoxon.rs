//! Wilcoxon signed-rank test for paired samples.
//!
//! Zero differences are dropped and tied magnitudes share their average rank.
//! Up to [`EXACT_MAX_N`] non-zero pairs the p-value comes from the exact null
//! distribution of the positive rank sum; above that a normal approximation
//! with tie correction is used.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

pub const EXACT_MAX_N: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WilcoxonMethod {
    Exact,
    Normal,
    /// Every difference was zero.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    /// Sum of ranks of positive differences `x - y`.
    pub w_plus: f64,
    /// Pairs with a non-zero difference.
    pub n: usize,
    /// Two-sided.
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

/// Average ranks of `|d|` (1-based) for non-zero differences, in input order.
pub fn signed_ranks(diffs: &[f64]) -> Vec<(f64, bool)> {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&a, &b| diffs[a].abs().total_cmp(&diffs[b].abs()));
    let mut ranks = vec![0.0; diffs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && diffs[order[j]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
        .into_iter()
        .zip(diffs.iter().map(|&d| d > 0.0))
        .collect()
}

/// Exact two-sided p-value of `w_plus` given the (possibly tied) ranks.
///
/// Ranks are multiples of one half, so doubled ranks are integers and the
/// null distribution of the doubled rank sum is a subset-sum count.
pub fn exact_p_value(ranks: &[f64], w_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut dist = vec![0.0f64; total + 1];
    dist[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            let p = dist[s];
            if p != 0.0 {
                dist[s + r] += 0.5 * p;
                dist[s] = 0.5 * p;
            }
        }
        reach += r;
    }
    let observed = (2.0 * w_plus).round() as usize;
    let lower: f64 = dist[..=observed.min(total)].iter().sum();
    let upper: f64 = dist[observed.min(total)..].iter().sum();
    (2.0 * lower.min(upper)).min(1.0)
}

/// Normal-approximation two-sided p-value with tie-corrected variance.
pub fn normal_p_value(ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if variance <= 0.0 {
        return 1.0;
    }
    let z = (w_plus - mean) / variance.sqrt();
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::Empty("Wilcoxon test needs at least one pair"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "Wilcoxon samples must be finite".into(),
        ));
    }
    let diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult {
            statistic: 0.0,
            w_plus: 0.0,
            n: 0,
            p_value: 1.0,
            method: WilcoxonMethod::Degenerate,
        });
    }
    let signed = signed_ranks(&diffs);
    let ranks: Vec<f64> = signed.iter().map(|&(r, _)| r).collect();
    let w_plus: f64 = signed.iter().filter(|(_, pos)| *pos).map(|(r, _)| r).sum();
    let w_minus = n as f64 * (n as f64 + 1.0) / 2.0 - w_plus;
    let (p_value, method) = if n <= EXACT_MAX_N {
        (exact_p_value(&ranks, w_plus), WilcoxonMethod::Exact)
    } else {
        (normal_p_value(&ranks, w_plus), WilcoxonMethod::Normal)
    };
    Ok(WilcoxonResult {
        statistic: w_plus.min(w_minus),
        w_plus,
        n,
        p_value,
        method,
    })
}

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::CRITERIA;
use crate::planner::PlannedPath;
use crate::utility::WeightVector;

/// Mean per-criterion improvement of optimized over actual paths.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImprovementMeans {
    pub mu: [f64; CRITERIA],
    pub count: usize,
}

/// Criterion-wise improvement `f(optimized) - f(actual)` with `f = [-D, L, R]`:
/// `[D_actual - D_opt, L_opt - L_actual, R_opt - R_actual]`.
pub fn improvement(optimized: &PlannedPath, actual: &PlannedPath) -> [f64; CRITERIA] {
    let opt = optimized.totals.payoff();
    let act = actual.totals.payoff();
    std::array::from_fn(|i| opt[i] - act[i])
}

pub fn improvement_means(
    optimized: &[PlannedPath],
    actual: &[PlannedPath],
) -> Result<ImprovementMeans> {
    if optimized.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            actual: optimized.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::Empty("no paths to compare"));
    }
    let mut sums = [0.0; CRITERIA];
    for (index, (opt, act)) in optimized.iter().zip(actual).enumerate() {
        check_origin(index, opt, act)?;
        let diff = improvement(opt, act);
        for (s, d) in sums.iter_mut().zip(diff) {
            *s += d;
        }
    }
    let count = actual.len();
    Ok(ImprovementMeans {
        mu: sums.map(|s| s / count as f64),
        count,
    })
}

fn check_origin(index: usize, optimized: &PlannedPath, actual: &PlannedPath) -> Result<()> {
    if optimized.origin != actual.origin {
        return Err(Error::OriginMismatch {
            index,
            optimized: optimized.origin,
            actual: actual.origin,
        });
    }
    Ok(())
}

/// Product of improvement means, negated unless every mean is strictly
/// positive: `min_i sgn(mu_i) * prod_i |mu_i|` with `sgn(0) = -1`.
pub fn pim(mu: &[f64]) -> f64 {
    let magnitude: f64 = mu.iter().map(|m| m.abs()).product();
    if mu.iter().all(|&m| m > 0.0) {
        magnitude
    } else {
        -magnitude
    }
}

/// PIM of a single optimized/actual pair, without averaging.
pub fn path_pim(optimized: &PlannedPath, actual: &PlannedPath) -> Result<f64> {
    check_origin(0, optimized, actual)?;
    Ok(pim(&improvement(optimized, actual)))
}

/// Weight vector with the largest PIM; ties go to the lexicographically
/// smallest vector.
pub fn select_lambda_star(scores: &[(WeightVector, f64)]) -> Result<WeightVector> {
    let key = |p: f64| if p.is_nan() { f64::NEG_INFINITY } else { p };
    let mut best: Option<&(WeightVector, f64)> = None;
    for candidate in scores {
        best = match best {
            None => Some(candidate),
            Some(current) => {
                let (a, b) = (key(candidate.1), key(current.1));
                if a > b || (a == b && candidate.0.lexicographic_cmp(&current.0).is_lt()) {
                    Some(candidate)
                } else {
                    Some(current)
                }
            }
        };
    }
    best.map(|(w, _)| w.clone())
        .ok_or(Error::Empty("no weight vectors to select from"))
}

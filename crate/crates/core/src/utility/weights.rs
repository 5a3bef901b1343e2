use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-9;

/// A point on the probability simplex: nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(components, SUM_TOLERANCE)
    }

    /// Like [`WeightVector::new`] with a caller-chosen tolerance on the sum.
    pub fn with_tolerance(components: Vec<f64>, tolerance: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidWeights("no components".into()));
        }
        if let Some(bad) = components.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidWeights(format!(
                "component {bad} is negative or not finite"
            )));
        }
        let sum: f64 = components.iter().sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(Error::InvalidWeights(format!(
                "components sum to {sum}, expected 1"
            )));
        }
        Ok(Self(components))
    }

    pub fn one_hot(len: usize, index: usize) -> Self {
        assert!(
            index < len,
            "one-hot index {index} out of range for {len} criteria"
        );
        let mut w = vec![0.0; len];
        w[index] = 1.0;
        Self(w)
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0);
        Self(vec![1.0 / len as f64; len])
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lexicographic_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                unequal => return unequal,
            }
        }
        self.0.len().cmp(&other.0.len())
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(value: WeightVector) -> Self {
        value.0
    }
}

/// One candidate of the lattice. `steps[i] / h` is component `i`; the last
/// step is `h` minus the others and may be negative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridEntry {
    pub steps: Vec<i64>,
    pub weights: Vec<f64>,
    pub feasible: bool,
}

impl GridEntry {
    pub fn weight_vector(&self) -> Option<WeightVector> {
        self.feasible.then(|| WeightVector(self.weights.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightGrid {
    pub criteria: usize,
    pub divisions: usize,
    pub entries: Vec<GridEntry>,
}

impl WeightGrid {
    /// Enumerates all `(h+1)^(m-1)` lattice candidates in lexicographic order.
    pub fn new(criteria: usize, divisions: usize) -> Result<Self> {
        if criteria < 1 {
            return Err(Error::InvalidParameter(
                "criteria count must be >= 1".into(),
            ));
        }
        if divisions < 1 {
            return Err(Error::InvalidParameter(
                "grid divisions H must be >= 1".into(),
            ));
        }
        let h = divisions as i64;
        let free = criteria - 1;
        let raw = (divisions + 1)
            .checked_pow(free as u32)
            .ok_or_else(|| Error::InvalidParameter("weight grid too large".into()))?;

        let mut entries = Vec::with_capacity(raw);
        let mut digits = vec![0i64; free];
        for _ in 0..raw {
            let last = h - digits.iter().sum::<i64>();
            let mut steps = digits.clone();
            steps.push(last);
            let weights = steps.iter().map(|&k| k as f64 / h as f64).collect();
            entries.push(GridEntry {
                feasible: last >= 0,
                steps,
                weights,
            });
            for pos in (0..free).rev() {
                if digits[pos] < h {
                    digits[pos] += 1;
                    break;
                }
                digits[pos] = 0;
            }
        }
        Ok(Self {
            criteria,
            divisions,
            entries,
        })
    }

    pub fn raw_count(&self) -> usize {
        self.entries.len()
    }

    pub fn feasible(&self) -> impl Iterator<Item = &GridEntry> {
        self.entries.iter().filter(|e| e.feasible)
    }

    pub fn feasible_count(&self) -> usize {
        self.feasible().count()
    }

    pub fn feasible_vectors(&self) -> Vec<WeightVector> {
        self.feasible()
            .filter_map(GridEntry::weight_vector)
            .collect()
    }
}

pub fn make_weight_grid(criteria: usize, divisions: usize) -> Result<WeightGrid> {
    WeightGrid::new(criteria, divisions)
}

/// Weighted-sum scalarization `sum_i lambda_i * f_i`.
pub fn scalarize(payoff: &[f64], lambda: &WeightVector) -> Result<f64> {
    if payoff.len() != lambda.len() {
        return Err(Error::DimensionMismatch {
            expected: lambda.len(),
            actual: payoff.len(),
        });
    }
    let mut total = 0.0;
    for (w, f) in lambda.components().iter().zip(payoff) {
        total += w * f;
    }
    Ok(total)
}

use serde::{Deserialize, Serialize};

use super::WeightVector;
use crate::error::{Error, Result};
use crate::graph::{JobId, TransitionGraph};

pub const DEFAULT_GAMMA: f64 = 0.7;
pub const DEFAULT_T_MAX: usize = 50;

/// How a sweep reads the utilities it is replacing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateMode {
    /// Jacobi: every update in a sweep reads the previous iterate.
    #[default]
    Sync,
    /// Gauss-Seidel: updates are written in place in edge order.
    Async,
}

impl std::str::FromStr for UpdateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sync" => Ok(UpdateMode::Sync),
            "async" => Ok(UpdateMode::Async),
            other => Err(Error::InvalidParameter(format!(
                "unknown update mode {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UpdateMode::Sync => "sync",
            UpdateMode::Async => "async",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationConfig {
    pub gamma: f64,
    pub max_iter: usize,
    pub mode: UpdateMode,
    /// Stop early once the sweep's sup-norm change drops below this.
    pub stop_tol: Option<f64>,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            max_iter: DEFAULT_T_MAX,
            mode: UpdateMode::Sync,
            stop_tol: None,
        }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be in (0,1], got {}",
                self.gamma
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("T_max must be >= 1".into()));
        }
        Ok(())
    }
}

/// Learned utilities `U(s,d)`, indexed like [`TransitionGraph::edges`].
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityTable {
    pub lambda: Option<WeightVector>,
    pub gamma: f64,
    pub mode: UpdateMode,
    values: Vec<f64>,
    /// Sup-norm change of each sweep.
    pub trace: Vec<f64>,
}

impl UtilityTable {
    pub fn from_values(
        values: Vec<f64>,
        gamma: f64,
        mode: UpdateMode,
        lambda: Option<WeightVector>,
    ) -> Self {
        Self {
            lambda,
            gamma,
            mode,
            values,
            trace: Vec::new(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn utility(&self, edge: usize) -> f64 {
        self.values[edge]
    }

    /// `V(s) = max_d U(s,d)`, zero at sinks.
    pub fn node_value(&self, graph: &TransitionGraph, source: JobId) -> f64 {
        node_value(graph, &self.values, source)
    }

    /// Out-edge of `source` with the largest utility; ties go to the
    /// smallest target id.
    pub fn best_edge(&self, graph: &TransitionGraph, source: JobId) -> Option<usize> {
        let mut best: Option<usize> = None;
        for e in graph.out_edges(source) {
            if best.is_none_or(|b| self.values[e] > self.values[b]) {
                best = Some(e);
            }
        }
        best
    }
}

fn node_value(graph: &TransitionGraph, values: &[f64], source: JobId) -> f64 {
    let mut range = graph.out_edges(source);
    match range.next() {
        None => 0.0,
        Some(first) => range.fold(values[first], |acc, e| acc.max(values[e])),
    }
}

/// Value iteration from an all-zero table.
pub fn value_iteration(
    graph: &TransitionGraph,
    payoff: &[f64],
    config: &IterationConfig,
) -> Result<UtilityTable> {
    value_iteration_from(graph, payoff, config, vec![0.0; graph.edge_count()])
}

/// Repeats `U(s,d) <- r(s,d) + gamma * max_d' U(d,d')` over every edge.
pub fn value_iteration_from(
    graph: &TransitionGraph,
    payoff: &[f64],
    config: &IterationConfig,
    initial: Vec<f64>,
) -> Result<UtilityTable> {
    config.validate()?;
    let edges = graph.edge_count();
    if payoff.len() != edges {
        return Err(Error::DimensionMismatch {
            expected: edges,
            actual: payoff.len(),
        });
    }
    if initial.len() != edges {
        return Err(Error::DimensionMismatch {
            expected: edges,
            actual: initial.len(),
        });
    }
    if let Some((edge, &value)) = payoff.iter().enumerate().find(|(_, r)| !r.is_finite()) {
        return Err(Error::NonFinitePayoff { edge, value });
    }
    if initial.iter().any(|u| !u.is_finite()) {
        return Err(Error::InvalidParameter(
            "initial utilities must be finite".into(),
        ));
    }

    let gamma = config.gamma;
    let mut values = initial;
    let mut trace = Vec::with_capacity(config.max_iter);
    let mut node_values = vec![0.0; graph.job_count()];

    for _ in 0..config.max_iter {
        let mut delta = 0.0f64;
        match config.mode {
            UpdateMode::Sync => {
                for (s, v) in node_values.iter_mut().enumerate() {
                    *v = node_value(graph, &values, s);
                }
                for (e, edge) in graph.edges().iter().enumerate() {
                    let updated = payoff[e] + gamma * node_values[edge.target];
                    delta = delta.max((updated - values[e]).abs());
                    values[e] = updated;
                }
            }
            UpdateMode::Async => {
                for (e, edge) in graph.edges().iter().enumerate() {
                    let updated = payoff[e] + gamma * node_value(graph, &values, edge.target);
                    delta = delta.max((updated - values[e]).abs());
                    values[e] = updated;
                }
            }
        }
        trace.push(delta);
        if config.stop_tol.is_some_and(|tol| delta < tol) {
            break;
        }
    }

    Ok(UtilityTable {
        lambda: None,
        gamma,
        mode: config.mode,
        values,
        trace,
    })
}

//! Utility learning: value iteration on scalarized payoffs and the
//! decomposition over a weight grid.

mod io;
mod iteration;
mod weights;

use rayon::prelude::*;

use crate::error::Result;
use crate::graph::{Criterion, TransitionGraph};

pub use io::{
    load_learned, read_utility_csv, save_learned, write_utility_csv, GridManifest, ManifestEntry,
    TraceSummary, MANIFEST_FILE,
};
pub use iteration::{
    value_iteration, value_iteration_from, IterationConfig, UpdateMode, UtilityTable,
    DEFAULT_GAMMA, DEFAULT_T_MAX,
};
pub use weights::{make_weight_grid, scalarize, GridEntry, WeightGrid, WeightVector};

pub const DEFAULT_GRID_DIVISIONS: usize = 10;

/// Per-edge payoff of a single criterion (`-D`, `L` or `R`).
pub fn criterion_payoff(graph: &TransitionGraph, criterion: Criterion) -> Result<Vec<f64>> {
    graph.ensure_criteria()?;
    Ok((0..graph.edge_count())
        .map(|e| graph.payoff_at(e)[criterion.index()])
        .collect())
}

/// Per-edge `sum_i lambda_i f_i(s,d)`.
pub fn scalarized_payoff(graph: &TransitionGraph, lambda: &WeightVector) -> Result<Vec<f64>> {
    graph.ensure_criteria()?;
    (0..graph.edge_count())
        .map(|e| scalarize(&graph.payoff_at(e), lambda))
        .collect()
}

/// Learns one utility table per feasible grid vector. Subproblems run in
/// parallel and are returned in grid order.
pub fn muld_learn(
    graph: &TransitionGraph,
    grid: &WeightGrid,
    config: &IterationConfig,
) -> Result<Vec<UtilityTable>> {
    graph.ensure_criteria()?;
    config.validate()?;
    let lambdas = grid.feasible_vectors();
    lambdas
        .into_par_iter()
        .map(|lambda| {
            let payoff = scalarized_payoff(graph, &lambda)?;
            let mut table = value_iteration(graph, &payoff, config)?;
            table.lambda = Some(lambda);
            Ok(table)
        })
        .collect()
}

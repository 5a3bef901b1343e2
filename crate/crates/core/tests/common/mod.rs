//! Independent reference implementations used as test oracles, plus fixture
//! builders. Shared with the service crate's acceptance target.
#![allow(dead_code)]

use careerpath_core::graph::{
    Edge, EdgeStats, NodeStats, TransitionGraph, DEFAULT_ALPHA, DEFAULT_PAGERANK_MAX_ITER,
    DEFAULT_PAGERANK_TOL,
};
use careerpath_core::trajectory::{
    clean, generate_synthetic, CareerTrajectory, CompanySize, GeneratorConfig, JobKey,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn job(i: usize) -> JobKey {
    JobKey::new("Testing", CompanySize::Small, &format!("role {i:03}")).unwrap()
}

/// Graph from `(source, target, hop_count, D, L, R)` arcs with zeroed node stats.
pub fn graph_from_arcs(n: usize, arcs: &[(usize, usize, usize, f64, f64, f64)]) -> TransitionGraph {
    let jobs = (0..n).map(job).collect();
    let nodes = vec![NodeStats::default(); n];
    let edges = arcs
        .iter()
        .map(|&(source, target, hop_count, d, l, r)| Edge {
            source,
            target,
            stats: EdgeStats {
                hop_count,
                duration_cost: d,
                level_gain: l,
                desirability_gain: r,
            },
        })
        .collect();
    TransitionGraph::from_parts(jobs, nodes, edges).unwrap()
}

/// Random DAG on `n` nodes (edges only go from lower to higher id) with random
/// positive hop counts and criteria.
pub fn random_dag(rng: &mut ChaCha8Rng, n: usize, density: f64) -> TransitionGraph {
    let mut arcs = Vec::new();
    for s in 0..n {
        for d in s + 1..n {
            if rng.random_bool(density) {
                arcs.push((
                    s,
                    d,
                    rng.random_range(1..20),
                    rng.random_range(0.0..60.0),
                    rng.random_range(-30.0..30.0),
                    rng.random_range(-2.0..2.0),
                ));
            }
        }
    }
    graph_from_arcs(n, &arcs)
}

/// Random digraph, cycles allowed, no self loops.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> TransitionGraph {
    let mut arcs = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if s != d && rng.random_bool(density) {
                arcs.push((
                    s,
                    d,
                    rng.random_range(1..20),
                    rng.random_range(0.0..60.0),
                    rng.random_range(-30.0..30.0),
                    rng.random_range(-2.0..2.0),
                ));
            }
        }
    }
    graph_from_arcs(n, &arcs)
}

/// Best discounted payoff over every path from `origin` that ends at a sink,
/// by exhaustive depth-first enumeration. `None` when `origin` is a sink.
pub fn brute_force_best(
    graph: &TransitionGraph,
    payoff: &[f64],
    gamma: f64,
    origin: usize,
) -> Option<f64> {
    fn go(graph: &TransitionGraph, payoff: &[f64], gamma: f64, node: usize) -> Option<f64> {
        let mut best: Option<f64> = None;
        for e in graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.source == node)
            .map(|(i, _)| i)
        {
            let tail = go(graph, payoff, gamma, graph.edges()[e].target).unwrap_or(0.0);
            let total = payoff[e] + gamma * tail;
            best = Some(best.map_or(total, |b: f64| b.max(total)));
        }
        best
    }
    go(graph, payoff, gamma, origin)
}

/// PageRank by dense power iteration on the Google matrix, run to a fixed
/// point: `P <- alpha/n + (1-alpha) * (W^T P + sink_mass/n)`.
pub fn dense_pagerank(n: usize, weighted_arcs: &[(usize, usize, f64)], alpha: f64) -> Vec<f64> {
    let mut m = vec![vec![0.0; n]; n]; // m[to][from]
    let mut out = vec![0.0; n];
    for &(s, _, w) in weighted_arcs {
        out[s] += w;
    }
    for &(s, d, w) in weighted_arcs {
        m[d][s] += w / out[s];
    }
    for (s, total) in out.iter().enumerate() {
        if *total == 0.0 {
            for row in m.iter_mut() {
                row[s] = 1.0 / n as f64;
            }
        }
    }
    let mut p = vec![1.0 / n as f64; n];
    for _ in 0..100_000 {
        let next: Vec<f64> = (0..n)
            .map(|i| alpha / n as f64 + (1.0 - alpha) * (0..n).map(|j| m[i][j] * p[j]).sum::<f64>())
            .collect();
        let change: f64 = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        p = next;
        if change < 1e-15 {
            break;
        }
    }
    p
}

/// Average ranks of `|d|` computed pairwise in O(n^2).
pub fn naive_ranks(diffs: &[f64]) -> Vec<f64> {
    diffs
        .iter()
        .map(|a| {
            let less = diffs.iter().filter(|b| b.abs() < a.abs()).count() as f64;
            let equal = diffs.iter().filter(|b| b.abs() == a.abs()).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Two-sided signed-rank p-value by enumerating all `2^n` sign assignments.
pub fn wilcoxon_enumeration(x: &[f64], y: &[f64]) -> f64 {
    let diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return 1.0;
    }
    let ranks = naive_ranks(&diffs);
    let observed: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let n = diffs.len();
    let total = 1u64 << n;
    let (mut low, mut high) = (0u64, 0u64);
    for mask in 0..total {
        let w: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ranks[i])
            .sum();
        if w <= observed + 1e-9 {
            low += 1;
        }
        if w >= observed - 1e-9 {
            high += 1;
        }
    }
    (2.0 * low.min(high) as f64 / total as f64).min(1.0)
}

/// The default seed-42 corpus, cleaned at synthetic support 2, and its graph.
pub fn seed42() -> (Vec<CareerTrajectory>, TransitionGraph) {
    let corpus = generate_synthetic(&GeneratorConfig::default(), 42).unwrap();
    let cleaned = clean(&corpus.trajectories, 2, true);
    let (graph, _) = TransitionGraph::from_trajectories(
        &cleaned,
        DEFAULT_ALPHA,
        DEFAULT_PAGERANK_TOL,
        DEFAULT_PAGERANK_MAX_ITER,
    )
    .unwrap();
    (cleaned, graph)
}

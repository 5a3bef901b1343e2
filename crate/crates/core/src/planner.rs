//! Path extraction from learned utilities, plus the greedy and
//! equally-weighted planners used as baselines.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{JobId, TransitionGraph, CRITERIA};
use crate::trajectory::CareerTrajectory;
use crate::utility::UtilityTable;

pub const DEFAULT_MAX_LEN: usize = 10;
pub const EQUAL_WEIGHT_LEVEL: f64 = 1.0;
pub const EQUAL_WEIGHT_DURATION: f64 = 1.0;
pub const EQUAL_WEIGHT_DESIRABILITY: f64 = 500.0;

/// Every planning method, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    GreedyMostCommon,
    GreedyShortestDuration,
    GreedyLevelGain,
    GreedyDesirabilityGain,
    UtilityDuration,
    UtilityLevel,
    UtilityDesirability,
    EquallyWeighted,
    Muld,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::GreedyMostCommon,
        Method::GreedyShortestDuration,
        Method::GreedyLevelGain,
        Method::GreedyDesirabilityGain,
        Method::UtilityDuration,
        Method::UtilityLevel,
        Method::UtilityDesirability,
        Method::EquallyWeighted,
        Method::Muld,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::GreedyMostCommon => "greedy_most_common",
            Method::GreedyShortestDuration => "greedy_shortest_duration",
            Method::GreedyLevelGain => "greedy_level_gain",
            Method::GreedyDesirabilityGain => "greedy_desirability_gain",
            Method::UtilityDuration => "utility_duration",
            Method::UtilityLevel => "utility_level",
            Method::UtilityDesirability => "utility_desirability",
            Method::EquallyWeighted => "equally_weighted",
            Method::Muld => "muld",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Method::GreedyMostCommon => "Greedy most common",
            Method::GreedyShortestDuration => "Greedy shortest duration",
            Method::GreedyLevelGain => "Greedy level gain",
            Method::GreedyDesirabilityGain => "Greedy desirability gain",
            Method::UtilityDuration => "Single-criterion utility (-D)",
            Method::UtilityLevel => "Single-criterion utility (L)",
            Method::UtilityDesirability => "Single-criterion utility (R)",
            Method::EquallyWeighted => "Equally weighted utility",
            Method::Muld => "Multicriteria utility (MUL/D)",
        }
    }

    pub fn greedy_criterion(self) -> Option<GreedyCriterion> {
        match self {
            Method::GreedyMostCommon => Some(GreedyCriterion::MostCommon),
            Method::GreedyShortestDuration => Some(GreedyCriterion::ShortestDuration),
            Method::GreedyLevelGain => Some(GreedyCriterion::LevelGain),
            Method::GreedyDesirabilityGain => Some(GreedyCriterion::DesirabilityGain),
            _ => None,
        }
    }

    pub fn is_greedy(self) -> bool {
        self.greedy_criterion().is_some()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        if matches!(wanted.as_str(), "mul/d" | "mul_d" | "multicriteria") {
            return Ok(Method::Muld);
        }
        Method::ALL
            .into_iter()
            .find(|m| m.label() == wanted)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreedyCriterion {
    /// Largest hop count.
    MostCommon,
    /// Smallest duration cost.
    ShortestDuration,
    LevelGain,
    DesirabilityGain,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CriteriaTotals {
    #[serde(rename = "D")]
    pub duration: f64,
    #[serde(rename = "L")]
    pub level: f64,
    #[serde(rename = "R")]
    pub desirability: f64,
}

impl CriteriaTotals {
    /// Totals as payoff criteria `[-D, L, R]`.
    pub fn payoff(&self) -> [f64; CRITERIA] {
        [-self.duration, self.level, self.desirability]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hop {
    pub from: JobId,
    pub to: JobId,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlannedPath {
    pub origin: JobId,
    pub hops: Vec<Hop>,
    pub totals: CriteriaTotals,
    pub method: String,
}

impl PlannedPath {
    /// Assembles a path from consecutive edge indices, summing edge stats.
    pub fn from_edges(
        graph: &TransitionGraph,
        origin: JobId,
        edges: &[usize],
        method: &str,
    ) -> Self {
        let mut totals = CriteriaTotals::default();
        let mut hops = Vec::with_capacity(edges.len());
        for &e in edges {
            let edge = graph.edge(e);
            totals.duration += edge.stats.duration_cost;
            totals.level += edge.stats.level_gain;
            totals.desirability += edge.stats.desirability_gain;
            hops.push(Hop {
                from: edge.source,
                to: edge.target,
                edge: e,
            });
        }
        Self {
            origin,
            hops,
            totals,
            method: method.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    /// Origin followed by every hop destination.
    pub fn nodes(&self) -> Vec<JobId> {
        std::iter::once(self.origin)
            .chain(self.hops.iter().map(|h| h.to))
            .collect()
    }

    /// `sum_t gamma^t r(d_t, d_{t+1})` for a per-edge payoff.
    pub fn discounted_payoff(&self, payoff: &[f64], gamma: f64) -> f64 {
        let mut total = 0.0;
        let mut discount = 1.0;
        for hop in &self.hops {
            total += discount * payoff[hop.edge];
            discount *= gamma;
        }
        total
    }

    pub fn to_json(&self, graph: &TransitionGraph) -> PathJson {
        PathJson {
            origin: JobRef::of(graph, self.origin),
            method: self.method.clone(),
            hops: self
                .hops
                .iter()
                .map(|h| {
                    let stats = &graph.edge(h.edge).stats;
                    HopJson {
                        from: JobRef::of(graph, h.from),
                        to: JobRef::of(graph, h.to),
                        duration: stats.duration_cost,
                        level: stats.level_gain,
                        desirability: stats.desirability_gain,
                    }
                })
                .collect(),
            totals: self.totals,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobRef {
    pub id: JobId,
    pub industry: String,
    pub company_size: String,
    pub title: String,
}

impl JobRef {
    pub fn of(graph: &TransitionGraph, id: JobId) -> Self {
        let job = graph.job(id).expect("job id from this graph");
        Self {
            id,
            industry: job.industry().to_string(),
            company_size: job.company_size().label().to_string(),
            title: job.title().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopJson {
    pub from: JobRef,
    pub to: JobRef,
    #[serde(rename = "D")]
    pub duration: f64,
    #[serde(rename = "L")]
    pub level: f64,
    #[serde(rename = "R")]
    pub desirability: f64,
}

/// Wire form of a [`PlannedPath`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathJson {
    pub origin: JobRef,
    pub method: String,
    pub hops: Vec<HopJson>,
    pub totals: CriteriaTotals,
}

/// Follows the best-scoring out-edge from `origin` until reaching a sink,
/// `max_len` hops, or a node already on the path. Ties go to the smallest
/// target id.
pub fn walk(
    graph: &TransitionGraph,
    origin: JobId,
    max_len: usize,
    method: &str,
    score: impl Fn(usize) -> f64,
) -> Result<PlannedPath> {
    if origin >= graph.job_count() {
        return Err(Error::UnknownJob(origin));
    }
    let mut visited = HashSet::from([origin]);
    let mut current = origin;
    let mut edges = Vec::new();
    while edges.len() < max_len {
        let mut best: Option<(usize, f64)> = None;
        for e in graph.out_edges(current) {
            let s = score(e);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((e, s));
            }
        }
        let Some((e, _)) = best else { break };
        let next = graph.edge(e).target;
        if !visited.insert(next) {
            break;
        }
        edges.push(e);
        current = next;
    }
    Ok(PlannedPath::from_edges(graph, origin, &edges, method))
}

pub fn utility_path(
    graph: &TransitionGraph,
    table: &UtilityTable,
    origin: JobId,
    max_len: usize,
    method: &str,
) -> Result<PlannedPath> {
    if table.values().len() != graph.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.edge_count(),
            actual: table.values().len(),
        });
    }
    walk(graph, origin, max_len, method, |e| table.utility(e))
}

pub fn greedy_path(
    graph: &TransitionGraph,
    origin: JobId,
    criterion: GreedyCriterion,
    max_len: usize,
) -> Result<PlannedPath> {
    let label = match criterion {
        GreedyCriterion::MostCommon => Method::GreedyMostCommon,
        GreedyCriterion::ShortestDuration => Method::GreedyShortestDuration,
        GreedyCriterion::LevelGain => Method::GreedyLevelGain,
        GreedyCriterion::DesirabilityGain => Method::GreedyDesirabilityGain,
    }
    .label();
    walk(graph, origin, max_len, label, |e| {
        let stats = &graph.edge(e).stats;
        match criterion {
            GreedyCriterion::MostCommon => stats.hop_count as f64,
            GreedyCriterion::ShortestDuration => -stats.duration_cost,
            GreedyCriterion::LevelGain => stats.level_gain,
            GreedyCriterion::DesirabilityGain => stats.desirability_gain,
        }
    })
}

/// Per-edge `w_level * L - w_duration * D + w_desirability * R`.
pub fn equally_weighted_payoff(
    graph: &TransitionGraph,
    w_level: f64,
    w_duration: f64,
    w_desirability: f64,
) -> Result<Vec<f64>> {
    graph.ensure_criteria()?;
    Ok(graph
        .edges()
        .iter()
        .map(|e| {
            w_level * e.stats.level_gain - w_duration * e.stats.duration_cost
                + w_desirability * e.stats.desirability_gain
        })
        .collect())
}

/// The observed hop sequence of a trajectory, scored with the graph's
/// aggregated edge stats.
pub fn actual_path(graph: &TransitionGraph, trajectory: &CareerTrajectory) -> Result<PlannedPath> {
    let merged = trajectory.merged_stints();
    let ids = merged
        .iter()
        .map(|s| {
            graph
                .job_id(&s.job)
                .ok_or_else(|| Error::InvalidJob(format!("job {} not in graph", s.job)))
        })
        .collect::<Result<Vec<_>>>()?;
    let origin = *ids
        .first()
        .ok_or(Error::Empty("trajectory has no stints"))?;
    let edges = ids
        .windows(2)
        .map(|w| {
            graph.edge_index(w[0], w[1]).ok_or(Error::MissingEdge {
                from: w[0],
                to: w[1],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PlannedPath::from_edges(graph, origin, &edges, "actual"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, EdgeStats, NodeStats};
    use crate::trajectory::{CompanySize, JobKey};
    use crate::utility::{value_iteration, IterationConfig};

    /// Edges given as (source, target, hop_count, D, L, R).
    fn graph(n: usize, arcs: &[(usize, usize, usize, f64, f64, f64)]) -> TransitionGraph {
        let jobs = (0..n)
            .map(|i| JobKey::new("toy", CompanySize::Small, &format!("j{i:03}")).unwrap())
            .collect();
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
        TransitionGraph::from_parts(jobs, vec![NodeStats::default(); n], edges).unwrap()
    }

    fn cfg(gamma: f64) -> IterationConfig {
        IterationConfig {
            gamma,
            max_iter: 100,
            ..IterationConfig::default()
        }
    }

    #[test]
    fn chain_follows_single_choice() {
        let g = graph(3, &[(0, 1, 1, 0.0, 0.0, 0.0), (1, 2, 1, 0.0, 0.0, 0.0)]);
        let t = value_iteration(&g, &[1.0, 2.0], &cfg(0.5)).unwrap();
        let p = utility_path(&g, &t, 0, 10, "muld").unwrap();
        assert_eq!(p.nodes(), vec![0, 1, 2]);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn cycle_guard_stops_revisit() {
        let g = graph(2, &[(0, 1, 1, 0.0, 0.0, 0.0), (1, 0, 1, 0.0, 0.0, 0.0)]);
        let t = value_iteration(&g, &[1.0, 1.0], &cfg(0.5)).unwrap();
        let p = utility_path(&g, &t, 0, 10, "muld").unwrap();
        assert_eq!(p.nodes(), vec![0, 1]);
    }

    #[test]
    fn max_len_caps_path() {
        let arcs: Vec<_> = (0..5).map(|i| (i, i + 1, 1, 1.0, 1.0, 0.0)).collect();
        let g = graph(6, &arcs);
        let p = greedy_path(&g, 0, GreedyCriterion::LevelGain, 3).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.totals.duration, 3.0);
    }

    #[test]
    fn greedy_argmax_choices() {
        let g = graph(3, &[(0, 1, 3, 6.0, 1.0, 0.5), (0, 2, 7, 24.0, 2.0, -0.5)]);
        let common = greedy_path(&g, 0, GreedyCriterion::MostCommon, 5).unwrap();
        assert_eq!(common.nodes(), vec![0, 2]);
        let short = greedy_path(&g, 0, GreedyCriterion::ShortestDuration, 5).unwrap();
        assert_eq!(short.nodes(), vec![0, 1]);
        let level = greedy_path(&g, 0, GreedyCriterion::LevelGain, 5).unwrap();
        assert_eq!(level.nodes(), vec![0, 2]);
        let desirable = greedy_path(&g, 0, GreedyCriterion::DesirabilityGain, 5).unwrap();
        assert_eq!(desirable.nodes(), vec![0, 1]);
        assert_eq!(desirable.method, "greedy_desirability_gain");
    }

    #[test]
    fn unknown_origin() {
        let g = graph(2, &[(0, 1, 1, 0.0, 0.0, 0.0)]);
        assert!(matches!(
            greedy_path(&g, 9, GreedyCriterion::MostCommon, 5),
            Err(Error::UnknownJob(9))
        ));
    }

    #[test]
    fn equally_weighted_defaults() {
        let g = graph(2, &[(0, 1, 1, 18.0, 30.0, 0.6)]);
        let r = equally_weighted_payoff(
            &g,
            EQUAL_WEIGHT_LEVEL,
            EQUAL_WEIGHT_DURATION,
            EQUAL_WEIGHT_DESIRABILITY,
        )
        .unwrap();
        assert!((r[0] - 312.0).abs() < 1e-9);
        let r = equally_weighted_payoff(&g, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(r[0], 12.0);
        let r = equally_weighted_payoff(&g, 0.0, 0.0, 0.0).unwrap();
        let t = value_iteration(&g, &r, &cfg(0.7)).unwrap();
        assert!(t.values().iter().all(|&u| u == 0.0));
    }

    #[test]
    fn method_labels_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
        }
        assert_eq!("MUL/D".parse::<Method>().unwrap(), Method::Muld);
        assert!("random".parse::<Method>().is_err());
    }

    #[test]
    fn path_json_shape() {
        let g = graph(2, &[(0, 1, 1, 18.0, 30.0, 0.5)]);
        let p = greedy_path(&g, 0, GreedyCriterion::MostCommon, 5).unwrap();
        let v = serde_json::to_value(p.to_json(&g)).unwrap();
        assert_eq!(v["method"], "greedy_most_common");
        assert_eq!(v["origin"]["id"], 0);
        assert_eq!(v["hops"][0]["to"]["title"], "j001");
        assert_eq!(v["hops"][0]["D"], 18.0);
        assert_eq!(v["totals"]["L"], 30.0);
        assert_eq!(v["totals"]["R"], 0.5);
    }
}

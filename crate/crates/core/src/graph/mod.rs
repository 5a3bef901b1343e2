//! Job-transition graph and the per-edge payoff criteria.
//!
//! Nodes are the distinct [`JobKey`]s of a corpus, numbered in sorted key
//! order. Edges are the observed consecutive pairs of distinct jobs, stored
//! sorted by `(source, target)` so the out-edges of a node form a contiguous
//! run ordered by target id.

mod io;
mod pagerank;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::trajectory::{CareerTrajectory, JobKey};

pub use io::{read_graph, write_edges_csv, write_histogram_csv, write_nodes_csv};
pub use pagerank::{weighted_pagerank, PageRankReport};

pub type JobId = usize;

/// Number of payoff criteria: duration, level, desirability.
pub const CRITERIA: usize = 3;

pub const DEFAULT_ALPHA: f64 = 0.15;
pub const DEFAULT_PAGERANK_TOL: f64 = 1e-10;
pub const DEFAULT_PAGERANK_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Duration,
    Level,
    Desirability,
}

impl Criterion {
    pub const ALL: [Criterion; CRITERIA] = [
        Criterion::Duration,
        Criterion::Level,
        Criterion::Desirability,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Column label used in reports and path JSON.
    pub fn symbol(self) -> &'static str {
        match self {
            Criterion::Duration => "D",
            Criterion::Level => "L",
            Criterion::Desirability => "R",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EdgeStats {
    /// Distinct persons observed making this hop.
    pub hop_count: usize,
    /// Mean months spent in the source job before the hop.
    pub duration_cost: f64,
    /// Target level minus source level, in months.
    pub level_gain: f64,
    /// `ln(P_target) - ln(P_source)`.
    pub desirability_gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub source: JobId,
    pub target: JobId,
    pub stats: EdgeStats,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct NodeStats {
    /// Mean months from graduation to the end of a stint in this job.
    pub level: f64,
    pub pagerank: f64,
    pub out_degree: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Filled {
    duration: bool,
    level: bool,
    pagerank: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionGraph {
    jobs: Vec<JobKey>,
    ids: HashMap<JobKey, JobId>,
    edges: Vec<Edge>,
    out_start: Vec<usize>,
    nodes: Vec<NodeStats>,
    filled: Filled,
}

impl TransitionGraph {
    /// Builds nodes, edges and hop counts. Consecutive stints in the same job
    /// are merged first, so the graph has no self-loops.
    pub fn build(trajectories: &[CareerTrajectory]) -> Self {
        let mut jobs: Vec<JobKey> = trajectories
            .iter()
            .flat_map(|t| t.stints().iter().map(|s| s.job.clone()))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        jobs.sort();
        let ids: HashMap<JobKey, JobId> = jobs
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();

        let mut hoppers: BTreeMap<(JobId, JobId), HashSet<&str>> = BTreeMap::new();
        for t in trajectories {
            let merged = t.merged_stints();
            for pair in merged.windows(2) {
                let key = (ids[&pair[0].job], ids[&pair[1].job]);
                hoppers.entry(key).or_default().insert(t.person_id.as_str());
            }
        }
        let edges = hoppers
            .into_iter()
            .map(|((source, target), people)| Edge {
                source,
                target,
                stats: EdgeStats {
                    hop_count: people.len(),
                    ..EdgeStats::default()
                },
            })
            .collect();
        Self::assemble(jobs, ids, edges, None)
    }

    fn assemble(
        jobs: Vec<JobKey>,
        ids: HashMap<JobKey, JobId>,
        mut edges: Vec<Edge>,
        nodes: Option<Vec<NodeStats>>,
    ) -> Self {
        edges.sort_by_key(|e| (e.source, e.target));
        let n = jobs.len();
        let mut out_start = vec![0usize; n + 1];
        for e in &edges {
            out_start[e.source + 1] += 1;
        }
        for i in 0..n {
            out_start[i + 1] += out_start[i];
        }
        let mut nodes = nodes.unwrap_or_else(|| vec![NodeStats::default(); n]);
        for (s, node) in nodes.iter_mut().enumerate() {
            node.out_degree = out_start[s + 1] - out_start[s];
        }
        Self {
            jobs,
            ids,
            edges,
            out_start,
            nodes,
            filled: Filled::default(),
        }
    }

    /// Reassembles a fully computed graph, e.g. from exported CSVs.
    pub fn from_parts(jobs: Vec<JobKey>, nodes: Vec<NodeStats>, edges: Vec<Edge>) -> Result<Self> {
        if nodes.len() != jobs.len() {
            return Err(Error::DimensionMismatch {
                expected: jobs.len(),
                actual: nodes.len(),
            });
        }
        let mut ids = HashMap::with_capacity(jobs.len());
        for (i, job) in jobs.iter().enumerate() {
            if ids.insert(job.clone(), i).is_some() {
                return Err(Error::InvalidJob(format!("duplicate job {job}")));
            }
        }
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.source >= jobs.len() {
                return Err(Error::UnknownJob(e.source));
            }
            if e.target >= jobs.len() {
                return Err(Error::UnknownJob(e.target));
            }
            if e.source == e.target {
                return Err(Error::InvalidParameter(format!(
                    "self-loop on job {}",
                    e.source
                )));
            }
            if e.stats.hop_count == 0 {
                return Err(Error::InvalidParameter(format!(
                    "edge {}->{} has zero hop count",
                    e.source, e.target
                )));
            }
            if !seen.insert((e.source, e.target)) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate edge {}->{}",
                    e.source, e.target
                )));
            }
        }
        let mut graph = Self::assemble(jobs, ids, edges, Some(nodes));
        graph.filled = Filled {
            duration: true,
            level: true,
            pagerank: true,
        };
        Ok(graph)
    }

    /// Builds the graph and computes every criterion.
    pub fn from_trajectories(
        trajectories: &[CareerTrajectory],
        alpha: f64,
        tol: f64,
        max_iter: usize,
    ) -> Result<(Self, PageRankReport)> {
        let mut graph = Self::build(trajectories);
        graph.compute_duration_cost(trajectories)?;
        graph.compute_job_levels(trajectories)?;
        let report = graph.compute_pagerank(alpha, tol, max_iter)?;
        Ok((graph, report))
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jobs.is_empty()
    }

    pub fn jobs(&self) -> &[JobKey] {
        &self.jobs
    }

    pub fn job(&self, id: JobId) -> Option<&JobKey> {
        self.jobs.get(id)
    }

    pub fn job_id(&self, key: &JobKey) -> Option<JobId> {
        self.ids.get(key).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    pub fn nodes(&self) -> &[NodeStats] {
        &self.nodes
    }

    pub fn node(&self, id: JobId) -> Option<&NodeStats> {
        self.nodes.get(id)
    }

    /// Edge indices leaving `source`, ordered by target id.
    pub fn out_edges(&self, source: JobId) -> Range<usize> {
        self.out_start[source]..self.out_start[source + 1]
    }

    pub fn edge_index(&self, source: JobId, target: JobId) -> Option<usize> {
        if source >= self.jobs.len() {
            return None;
        }
        let range = self.out_edges(source);
        let start = range.start;
        self.edges[range]
            .binary_search_by_key(&target, |e| e.target)
            .ok()
            .map(|i| start + i)
    }

    pub fn criteria_ready(&self) -> bool {
        self.filled.duration && self.filled.level && self.filled.pagerank
    }

    pub(crate) fn ensure_criteria(&self) -> Result<()> {
        if !self.filled.duration {
            return Err(Error::CriteriaMissing("duration cost"));
        }
        if !self.filled.level {
            return Err(Error::CriteriaMissing("level gain"));
        }
        if !self.filled.pagerank {
            return Err(Error::CriteriaMissing("desirability gain"));
        }
        Ok(())
    }

    fn lookup_pair(&self, from: &JobKey, to: &JobKey) -> Result<usize> {
        let s = self
            .job_id(from)
            .ok_or_else(|| Error::InvalidJob(format!("job {from} not in graph")))?;
        let d = self
            .job_id(to)
            .ok_or_else(|| Error::InvalidJob(format!("job {to} not in graph")))?;
        self.edge_index(s, d)
            .ok_or(Error::MissingEdge { from: s, to: d })
    }

    /// Mean source-stint duration over the persons making each hop. A person
    /// who repeats the same hop contributes only their first occurrence.
    pub fn compute_duration_cost(&mut self, trajectories: &[CareerTrajectory]) -> Result<()> {
        let mut sums = vec![0i64; self.edges.len()];
        let mut counts = vec![0usize; self.edges.len()];
        let mut seen: HashSet<(&str, usize)> = HashSet::new();
        for t in trajectories {
            let merged = t.merged_stints();
            for pair in merged.windows(2) {
                let e = self.lookup_pair(&pair[0].job, &pair[1].job)?;
                if seen.insert((t.person_id.as_str(), e)) {
                    sums[e] += pair[0].duration_months();
                    counts[e] += 1;
                }
            }
        }
        for (e, edge) in self.edges.iter_mut().enumerate() {
            if counts[e] != edge.stats.hop_count {
                return Err(Error::InvalidParameter(format!(
                    "edge {}->{} has {} contributors but hop count {}",
                    edge.source, edge.target, counts[e], edge.stats.hop_count
                )));
            }
            edge.stats.duration_cost = sums[e] as f64 / counts[e] as f64;
        }
        self.filled.duration = true;
        Ok(())
    }

    /// Job levels as mean work experience at the end of each stint, and
    /// level gains `L_d - L_s` on every edge. Every stint contributes.
    pub fn compute_job_levels(&mut self, trajectories: &[CareerTrajectory]) -> Result<()> {
        let n = self.jobs.len();
        let mut sums = vec![0i64; n];
        let mut counts = vec![0usize; n];
        for t in trajectories {
            let grad = t
                .graduation
                .ok_or_else(|| Error::MissingGraduation(t.person_id.clone()))?;
            for stint in t.merged_stints() {
                let id = self
                    .job_id(&stint.job)
                    .ok_or_else(|| Error::InvalidJob(format!("job {} not in graph", stint.job)))?;
                sums[id] += stint.end.months_since(grad);
                counts[id] += 1;
            }
        }
        for (id, node) in self.nodes.iter_mut().enumerate() {
            if counts[id] == 0 {
                return Err(Error::InvalidParameter(format!(
                    "job {id} has no stints in the supplied trajectories"
                )));
            }
            node.level = sums[id] as f64 / counts[id] as f64;
        }
        for edge in &mut self.edges {
            edge.stats.level_gain = self.nodes[edge.target].level - self.nodes[edge.source].level;
        }
        self.filled.level = true;
        Ok(())
    }

    /// Hop-count weighted PageRank and the desirability gains derived from it.
    pub fn compute_pagerank(
        &mut self,
        alpha: f64,
        tol: f64,
        max_iter: usize,
    ) -> Result<PageRankReport> {
        if self.is_empty() {
            return Err(Error::Empty("graph has no jobs"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in (0,1), got {alpha}"
            )));
        }
        let adjacency: Vec<Vec<(usize, f64)>> = (0..self.jobs.len())
            .map(|s| {
                self.edges[self.out_edges(s)]
                    .iter()
                    .map(|e| (e.target, e.stats.hop_count as f64))
                    .collect()
            })
            .collect();
        let (rank, report) = weighted_pagerank(&adjacency, alpha, tol, max_iter);
        for (node, p) in self.nodes.iter_mut().zip(&rank) {
            node.pagerank = *p;
        }
        for edge in &mut self.edges {
            edge.stats.desirability_gain = rank[edge.target].ln() - rank[edge.source].ln();
        }
        self.filled.pagerank = true;
        Ok(report)
    }

    /// `[-D, L, R]` for the edge at `index`.
    pub fn payoff_at(&self, index: usize) -> [f64; CRITERIA] {
        let s = &self.edges[index].stats;
        [-s.duration_cost, s.level_gain, s.desirability_gain]
    }

    pub fn payoff_vector(&self, source: JobId, target: JobId) -> Result<[f64; CRITERIA]> {
        self.ensure_criteria()?;
        let e = self.edge_index(source, target).ok_or(Error::MissingEdge {
            from: source,
            to: target,
        })?;
        Ok(self.payoff_at(e))
    }

    /// Job count per out-degree, including the zero bucket.
    pub fn out_degree_distribution(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for node in &self.nodes {
            *hist.entry(node.out_degree).or_insert(0) += 1;
        }
        hist
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{CompanySize, DateStamp, WorkStint};

    fn job(t: &str) -> JobKey {
        JobKey::new("it", CompanySize::Small, t).unwrap()
    }

    fn m(months: i64) -> DateStamp {
        DateStamp::new(2000, 1).unwrap().add_months(months)
    }

    /// Stints given as (title, start, end) month offsets; graduation at 0.
    fn person(id: &str, stints: &[(&str, i64, i64)]) -> CareerTrajectory {
        CareerTrajectory::new(
            id,
            Some(m(0)),
            stints
                .iter()
                .map(|&(t, s, e)| WorkStint::new(job(t), m(s), m(e)).unwrap())
                .collect(),
        )
    }

    fn ids(g: &TransitionGraph, titles: &[&str]) -> Vec<JobId> {
        titles.iter().map(|t| g.job_id(&job(t)).unwrap()).collect()
    }

    #[test]
    fn chain_edges() {
        let g = TransitionGraph::build(&[person("p", &[("a", 0, 1), ("b", 1, 2), ("c", 2, 3)])]);
        let v = ids(&g, &["a", "b", "c"]);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge(g.edge_index(v[0], v[1]).unwrap()).stats.hop_count, 1);
        assert_eq!(g.edge(g.edge_index(v[1], v[2]).unwrap()).stats.hop_count, 1);
        assert_eq!(
            g.out_degree_distribution(),
            BTreeMap::from([(0, 1), (1, 2)])
        );
    }

    #[test]
    fn hop_count_counts_persons() {
        let g = TransitionGraph::build(&[
            person("p1", &[("a", 0, 1), ("b", 1, 2)]),
            person("p2", &[("a", 0, 1), ("b", 1, 2)]),
            // p3 repeats a->b twice; counted once.
            person("p3", &[("a", 0, 1), ("b", 1, 2), ("a", 2, 3), ("b", 3, 4)]),
        ]);
        let v = ids(&g, &["a", "b"]);
        assert_eq!(g.edge(g.edge_index(v[0], v[1]).unwrap()).stats.hop_count, 3);
    }

    #[test]
    fn self_transitions_merge() {
        let trajs = [person("p", &[("a", 0, 12), ("a", 12, 30), ("b", 30, 40)])];
        let mut g = TransitionGraph::build(&trajs);
        assert_eq!(g.edge_count(), 1);
        g.compute_duration_cost(&trajs).unwrap();
        assert_eq!(g.edges()[0].stats.duration_cost, 30.0);
        assert!(g.edges().iter().all(|e| e.source != e.target));
    }

    #[test]
    fn duration_is_mean_of_source_stints() {
        let trajs = [
            person("p1", &[("a", 0, 12), ("b", 12, 20)]),
            person("p2", &[("a", 0, 24), ("b", 24, 30)]),
        ];
        let mut g = TransitionGraph::build(&trajs);
        g.compute_duration_cost(&trajs).unwrap();
        assert_eq!(g.edges()[0].stats.duration_cost, 18.0);

        let zero = [person("p", &[("a", 5, 5), ("b", 5, 9)])];
        let mut g = TransitionGraph::build(&zero);
        g.compute_duration_cost(&zero).unwrap();
        assert_eq!(g.edges()[0].stats.duration_cost, 0.0);
    }

    #[test]
    fn levels_and_gains() {
        // Experiences: s -> {24, 36}, d -> {60}.
        let trajs = [
            person("p1", &[("s", 0, 24), ("d", 24, 60)]),
            person("p2", &[("s", 10, 36), ("x", 40, 50)]),
        ];
        let mut g = TransitionGraph::build(&trajs);
        g.compute_job_levels(&trajs).unwrap();
        let v = ids(&g, &["s", "d"]);
        assert_eq!(g.node(v[0]).unwrap().level, 30.0);
        assert_eq!(g.node(v[1]).unwrap().level, 60.0);
        assert_eq!(
            g.edge(g.edge_index(v[0], v[1]).unwrap()).stats.level_gain,
            30.0
        );
    }

    #[test]
    fn reverse_edges_are_antisymmetric() {
        let trajs = [
            person("p1", &[("x", 0, 10), ("y", 10, 25)]),
            person("p2", &[("y", 0, 7), ("x", 7, 40)]),
        ];
        let (g, _) = TransitionGraph::from_trajectories(&trajs, 0.15, 1e-12, 500).unwrap();
        let v = ids(&g, &["x", "y"]);
        let xy = &g.edge(g.edge_index(v[0], v[1]).unwrap()).stats;
        let yx = &g.edge(g.edge_index(v[1], v[0]).unwrap()).stats;
        assert_eq!(xy.level_gain, -yx.level_gain);
        assert_eq!(xy.desirability_gain, -yx.desirability_gain);
    }

    #[test]
    fn missing_graduation_is_an_error() {
        let t = CareerTrajectory::new(
            "p",
            None,
            vec![
                WorkStint::new(job("a"), m(0), m(1)).unwrap(),
                WorkStint::new(job("b"), m(1), m(2)).unwrap(),
            ],
        );
        let mut g = TransitionGraph::build(std::slice::from_ref(&t));
        assert!(matches!(
            g.compute_job_levels(&[t]),
            Err(Error::MissingGraduation(_))
        ));
    }

    #[test]
    fn payoff_vector_assembly() {
        let trajs = [
            person("p1", &[("a", 0, 12), ("b", 12, 60)]),
            person("p2", &[("a", 0, 24), ("b", 24, 50)]),
        ];
        let mut g = TransitionGraph::build(&trajs);
        let v = ids(&g, &["a", "b"]);
        assert!(matches!(
            g.payoff_vector(v[0], v[1]),
            Err(Error::CriteriaMissing(_))
        ));
        g.compute_duration_cost(&trajs).unwrap();
        g.compute_job_levels(&trajs).unwrap();
        g.compute_pagerank(0.15, 1e-12, 500).unwrap();
        let f = g.payoff_vector(v[0], v[1]).unwrap();
        assert_eq!(f[0], -18.0);
        assert_eq!(f[1], 55.0 - 18.0);
        let p = g.nodes();
        assert!((f[2] - (p[v[1]].pagerank / p[v[0]].pagerank).ln()).abs() < 1e-12);
        assert!(matches!(
            g.payoff_vector(v[1], v[0]),
            Err(Error::MissingEdge { .. })
        ));
    }

    #[test]
    fn empty_graph() {
        let mut g = TransitionGraph::build(&[]);
        assert!(g.is_empty());
        assert!(g.out_degree_distribution().is_empty());
        assert!(matches!(
            g.compute_pagerank(0.15, 1e-10, 10),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn alpha_must_be_a_probability() {
        let trajs = [person("p", &[("a", 0, 1), ("b", 1, 2)])];
        let mut g = TransitionGraph::build(&trajs);
        assert!(g.compute_pagerank(0.0, 1e-10, 10).is_err());
        assert!(g.compute_pagerank(1.0, 1e-10, 10).is_err());
    }
}

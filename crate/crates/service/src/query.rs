//! Loaded artifacts and the queries shared by the CLI and the HTTP API.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use careerpath_core::evaluation::{baseline_payoff, BenchmarkReport};
use careerpath_core::graph::{Criterion, JobId, TransitionGraph, CRITERIA};
use careerpath_core::planner::{
    greedy_path, utility_path, Method, PathJson, EQUAL_WEIGHT_DESIRABILITY, EQUAL_WEIGHT_DURATION,
    EQUAL_WEIGHT_LEVEL,
};
use careerpath_core::utility::{
    load_learned, value_iteration, GridManifest, IterationConfig, UtilityTable, WeightVector,
};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::artifacts::{load_graph, load_report, load_selection, require, SelectionRecord};
use crate::config::PipelineConfig;
use crate::error::ServiceError;

pub const API_SCHEMA_VERSION: u32 = 1;
/// Allowed slack on `sum(lambda) = 1`.
pub const LAMBDA_SUM_TOL: f64 = 1e-6;
/// L1 distance under which a requested vector counts as the grid point.
const ON_GRID_TOL: f64 = 1e-6;
/// Nearest-point distances closer than this are ties.
const TIE_TOL: f64 = 1e-12;
pub const DEFAULT_JOB_LIMIT: usize = 20;
pub const MAX_JOB_LIMIT: usize = 500;

#[derive(Debug, Error, PartialEq)]
pub enum QueryError {
    #[error("unknown job id {0}")]
    UnknownJob(JobId),

    #[error("invalid lambda: {0}")]
    InvalidLambda(String),

    #[error("lambda {0:?} is not a grid point; set snap to use the nearest one")]
    OffGrid(Vec<f64>),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("{0}")]
    NotFound(String),
}

impl QueryError {
    pub fn status(&self) -> u16 {
        match self {
            QueryError::UnknownJob(_) | QueryError::NotFound(_) => 404,
            QueryError::InvalidLambda(_) | QueryError::InvalidRequest(_) => 400,
            QueryError::OffGrid(_) => 409,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            QueryError::UnknownJob(_) => "unknown_job",
            QueryError::InvalidLambda(_) => "invalid_lambda",
            QueryError::OffGrid(_) => "lambda_not_on_grid",
            QueryError::InvalidRequest(_) => "invalid_request",
            QueryError::NotFound(_) => "not_found",
        }
    }
}

/// `"auto"` for lambda*, or an explicit weight vector over (D, L, R).
#[derive(Clone, Debug, Default, PartialEq)]
pub enum LambdaSpec {
    #[default]
    Auto,
    Weights(Vec<f64>),
}

impl FromStr for LambdaSpec {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, QueryError> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(LambdaSpec::Auto);
        }
        s.split(',')
            .map(|part| {
                part.trim().parse::<f64>().map_err(|_| {
                    QueryError::InvalidLambda(format!(
                        "{s:?} is neither \"auto\" nor a list of numbers"
                    ))
                })
            })
            .collect::<Result<_, _>>()
            .map(LambdaSpec::Weights)
    }
}

impl fmt::Display for LambdaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaSpec::Auto => f.write_str("auto"),
            LambdaSpec::Weights(w) => {
                let parts: Vec<String> = w.iter().map(f64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl Serialize for LambdaSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            LambdaSpec::Auto => serializer.serialize_str("auto"),
            LambdaSpec::Weights(w) => w.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for LambdaSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Weights(Vec<f64>),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(t) if t.eq_ignore_ascii_case("auto") => Ok(LambdaSpec::Auto),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "lambda must be \"auto\" or an array, got {t:?}"
            ))),
            Raw::Weights(w) => Ok(LambdaSpec::Weights(w)),
        }
    }
}

fn default_method() -> Method {
    Method::Muld
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanRequest {
    pub origin_job_id: JobId,
    #[serde(default)]
    pub lambda: LambdaSpec,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default)]
    pub max_len: Option<usize>,
    #[serde(default)]
    pub snap: bool,
}

impl PlanRequest {
    pub fn new(origin_job_id: JobId) -> Self {
        Self {
            origin_job_id,
            lambda: LambdaSpec::Auto,
            method: Method::Muld,
            max_len: None,
            snap: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanResponse {
    pub schema_version: u32,
    pub method: Method,
    /// Grid vector actually used; absent for methods without weights.
    pub lambda: Option<Vec<f64>>,
    /// True when the requested vector was moved to the nearest grid point.
    pub snapped: bool,
    pub max_len: usize,
    pub path: PathJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobSummary {
    pub id: JobId,
    pub industry: String,
    pub company_size: String,
    pub title: String,
    pub level: f64,
    pub pagerank: f64,
    pub out_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobsResponse {
    pub schema_version: u32,
    pub total: usize,
    pub jobs: Vec<JobSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    /// Position among feasible grid points.
    pub index: usize,
    /// Position in the raw grid.
    pub grid_index: usize,
    pub lambda: Vec<f64>,
    pub mu: [f64; CRITERIA],
    pub pim: f64,
    pub selected: bool,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightsResponse {
    pub schema_version: u32,
    pub criteria: Vec<String>,
    pub divisions: usize,
    pub gamma: f64,
    pub t_max: usize,
    pub raw_count: usize,
    pub feasible_count: usize,
    pub lambda_star: Vec<f64>,
    pub star_index: usize,
    pub entries: Vec<WeightEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborEdge {
    pub target: JobSummary,
    pub hop_count: usize,
    #[serde(rename = "D")]
    pub duration: f64,
    #[serde(rename = "L")]
    pub level: f64,
    #[serde(rename = "R")]
    pub desirability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborsResponse {
    pub schema_version: u32,
    pub job: JobSummary,
    pub edges: Vec<NeighborEdge>,
}

/// Everything a query needs, loaded once.
pub struct Engine {
    graph: TransitionGraph,
    manifest: GridManifest,
    lambdas: Vec<WeightVector>,
    tables: Vec<UtilityTable>,
    selection: SelectionRecord,
    baselines: BTreeMap<Method, UtilityTable>,
    report: Option<BenchmarkReport>,
    max_len: usize,
}

impl Engine {
    /// Graph, learned tables and selection from the configured directories;
    /// the benchmark report is optional.
    pub fn load(config: &PipelineConfig) -> Result<Self, ServiceError> {
        let graph = load_graph(config)?;
        require(
            &config
                .tables_dir
                .join(careerpath_core::utility::MANIFEST_FILE),
        )?;
        let (manifest, tables) = load_learned(&config.tables_dir, &graph)?;
        let selection = load_selection(config)?;
        let report = if config.report.exists() {
            Some(load_report(&config.report)?)
        } else {
            None
        };
        Self::new(graph, manifest, tables, selection, report, config.max_len)
    }

    pub fn new(
        graph: TransitionGraph,
        manifest: GridManifest,
        tables: Vec<UtilityTable>,
        selection: SelectionRecord,
        report: Option<BenchmarkReport>,
        max_len: usize,
    ) -> Result<Self, ServiceError> {
        let lambdas = manifest.feasible_vectors()?;
        let stale = || {
            ServiceError::Config("selection does not match the learned grid; rerun select".into())
        };
        if selection.selection.scores.len() != lambdas.len() || tables.len() != lambdas.len() {
            return Err(stale());
        }
        for (score, lambda) in selection.selection.scores.iter().zip(&lambdas) {
            let requested = WeightVector::new(score.lambda.clone()).map_err(|_| stale())?;
            if requested.l1_distance(lambda) > ON_GRID_TOL {
                return Err(stale());
            }
        }
        let iteration = IterationConfig {
            gamma: manifest.gamma,
            max_iter: manifest.t_max,
            mode: manifest.mode,
            stop_tol: None,
        };
        let equal = [
            EQUAL_WEIGHT_LEVEL,
            EQUAL_WEIGHT_DURATION,
            EQUAL_WEIGHT_DESIRABILITY,
        ];
        let mut baselines = BTreeMap::new();
        for method in Method::ALL {
            if let Some(payoff) = baseline_payoff(&graph, method, equal)? {
                baselines.insert(method, value_iteration(&graph, &payoff, &iteration)?);
            }
        }
        Ok(Self {
            graph,
            manifest,
            lambdas,
            tables,
            selection,
            baselines,
            report,
            max_len,
        })
    }

    pub fn graph(&self) -> &TransitionGraph {
        &self.graph
    }

    pub fn report(&self) -> Option<&BenchmarkReport> {
        self.report.as_ref()
    }

    pub fn lambdas(&self) -> &[WeightVector] {
        &self.lambdas
    }

    pub fn star_index(&self) -> usize {
        self.selection.selection.star_index
    }

    /// Index of the grid point to use and whether it was snapped.
    pub fn resolve_lambda(
        &self,
        spec: &LambdaSpec,
        snap: bool,
    ) -> Result<(usize, bool), QueryError> {
        let requested = match spec {
            LambdaSpec::Auto => return Ok((self.star_index(), false)),
            LambdaSpec::Weights(w) => w,
        };
        if requested.len() != CRITERIA {
            return Err(QueryError::InvalidLambda(format!(
                "expected {CRITERIA} weights, got {}",
                requested.len()
            )));
        }
        if requested.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(QueryError::InvalidLambda(
                "weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = requested.iter().sum();
        if (sum - 1.0).abs() > LAMBDA_SUM_TOL {
            return Err(QueryError::InvalidLambda(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        let distance = |g: &WeightVector| {
            g.components()
                .iter()
                .zip(requested)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
        };
        // Ties go to the lexicographically smallest grid point.
        let mut nearest = 0;
        for (i, g) in self.lambdas.iter().enumerate() {
            let (d, best) = (distance(g), distance(&self.lambdas[nearest]));
            if d < best - TIE_TOL
                || (d <= best + TIE_TOL && g.lexicographic_cmp(&self.lambdas[nearest]).is_lt())
            {
                nearest = i;
            }
        }
        if distance(&self.lambdas[nearest]) <= ON_GRID_TOL {
            Ok((nearest, false))
        } else if snap {
            Ok((nearest, true))
        } else {
            Err(QueryError::OffGrid(requested.clone()))
        }
    }

    pub fn plan(&self, request: &PlanRequest) -> Result<PlanResponse, QueryError> {
        let origin = request.origin_job_id;
        if origin >= self.graph.job_count() {
            return Err(QueryError::UnknownJob(origin));
        }
        let max_len = request.max_len.unwrap_or(self.max_len);
        if max_len == 0 {
            return Err(QueryError::InvalidRequest(
                "max_len must be positive".into(),
            ));
        }
        let method = request.method;
        let planned = if method == Method::Muld {
            let (index, snapped) = self.resolve_lambda(&request.lambda, request.snap)?;
            let path = utility_path(
                &self.graph,
                &self.tables[index],
                origin,
                max_len,
                method.label(),
            );
            (
                path,
                Some(self.lambdas[index].components().to_vec()),
                snapped,
            )
        } else if let Some(criterion) = method.greedy_criterion() {
            (
                greedy_path(&self.graph, origin, criterion, max_len),
                None,
                false,
            )
        } else {
            let table = &self.baselines[&method];
            (
                utility_path(&self.graph, table, origin, max_len, method.label()),
                None,
                false,
            )
        };
        let (path, lambda, snapped) = planned;
        let path = path.map_err(|e| QueryError::InvalidRequest(e.to_string()))?;
        Ok(PlanResponse {
            schema_version: API_SCHEMA_VERSION,
            method,
            lambda,
            snapped,
            max_len,
            path: path.to_json(&self.graph),
        })
    }

    pub fn job_summary(&self, id: JobId) -> Result<JobSummary, QueryError> {
        let job = self.graph.job(id).ok_or(QueryError::UnknownJob(id))?;
        let node = self.graph.node(id).ok_or(QueryError::UnknownJob(id))?;
        Ok(JobSummary {
            id,
            industry: job.industry().to_string(),
            company_size: job.company_size().label().to_string(),
            title: job.title().to_string(),
            level: node.level,
            pagerank: node.pagerank,
            out_degree: node.out_degree,
        })
    }

    /// Jobs whose title, industry or size contains every whitespace-separated
    /// term of `q` (case-insensitive), by descending PageRank. An empty query
    /// matches nothing.
    pub fn search_jobs(&self, q: &str, limit: Option<usize>) -> JobsResponse {
        let terms: Vec<String> = q.split_whitespace().map(str::to_lowercase).collect();
        let limit = limit.unwrap_or(DEFAULT_JOB_LIMIT).min(MAX_JOB_LIMIT);
        let mut hits: Vec<JobSummary> = if terms.is_empty() {
            Vec::new()
        } else {
            (0..self.graph.job_count())
                .filter_map(|id| self.job_summary(id).ok())
                .filter(|j| {
                    let hay =
                        format!("{} {} {}", j.title, j.industry, j.company_size).to_lowercase();
                    terms.iter().all(|t| hay.contains(t.as_str()))
                })
                .collect()
        };
        hits.sort_by(|a, b| b.pagerank.total_cmp(&a.pagerank).then(a.id.cmp(&b.id)));
        let total = hits.len();
        hits.truncate(limit);
        JobsResponse {
            schema_version: API_SCHEMA_VERSION,
            total,
            jobs: hits,
        }
    }

    pub fn weights(&self) -> WeightsResponse {
        let feasible = self.manifest.entries.iter().filter(|e| e.feasible);
        let entries = feasible
            .zip(&self.selection.selection.scores)
            .enumerate()
            .map(|(i, (entry, score))| WeightEntry {
                index: i,
                grid_index: entry.index,
                lambda: self.lambdas[i].components().to_vec(),
                mu: score.mu,
                pim: score.pim,
                selected: i == self.star_index(),
                iterations: entry.trace.as_ref().map_or(0, |t| t.iterations),
            })
            .collect();
        WeightsResponse {
            schema_version: API_SCHEMA_VERSION,
            criteria: Criterion::ALL
                .iter()
                .map(|c| c.symbol().to_string())
                .collect(),
            divisions: self.manifest.divisions,
            gamma: self.manifest.gamma,
            t_max: self.manifest.t_max,
            raw_count: self.manifest.raw_count,
            feasible_count: self.manifest.feasible_count,
            lambda_star: self.lambdas[self.star_index()].components().to_vec(),
            star_index: self.star_index(),
            entries,
        }
    }

    pub fn neighbors(&self, id: JobId) -> Result<NeighborsResponse, QueryError> {
        let job = self.job_summary(id)?;
        let edges = self
            .graph
            .out_edges(id)
            .map(|e| {
                let edge = self.graph.edge(e);
                Ok(NeighborEdge {
                    target: self.job_summary(edge.target)?,
                    hop_count: edge.stats.hop_count,
                    duration: edge.stats.duration_cost,
                    level: edge.stats.level_gain,
                    desirability: edge.stats.desirability_gain,
                })
            })
            .collect::<Result<_, QueryError>>()?;
        Ok(NeighborsResponse {
            schema_version: API_SCHEMA_VERSION,
            job,
            edges,
        })
    }
}

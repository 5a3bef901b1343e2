//! End-to-end comparison of MUL/D against the baseline planners.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pim::{improvement, pim, select_lambda_star};
use super::wilcoxon::{wilcoxon_signed_rank, WilcoxonMethod};
use crate::error::{Error, Result};
use crate::graph::{Criterion, JobId, TransitionGraph, CRITERIA};
use crate::planner::{
    actual_path, equally_weighted_payoff, greedy_path, utility_path, Method, PlannedPath,
    DEFAULT_MAX_LEN, EQUAL_WEIGHT_DESIRABILITY, EQUAL_WEIGHT_DURATION, EQUAL_WEIGHT_LEVEL,
};
use crate::trajectory::CareerTrajectory;
use crate::utility::{
    criterion_payoff, make_weight_grid, muld_learn, value_iteration, IterationConfig, UpdateMode,
    UtilityTable, WeightVector, DEFAULT_GRID_DIVISIONS,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SIGNIFICANCE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchmarkConfig {
    pub iteration: IterationConfig,
    pub divisions: usize,
    pub max_len: usize,
    pub significance: f64,
    /// Weights for (L, D, R) in the equally weighted baseline.
    pub equal_weights: [f64; 3],
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            iteration: IterationConfig::default(),
            divisions: DEFAULT_GRID_DIVISIONS,
            max_len: DEFAULT_MAX_LEN,
            significance: DEFAULT_SIGNIFICANCE,
            equal_weights: [
                EQUAL_WEIGHT_LEVEL,
                EQUAL_WEIGHT_DURATION,
                EQUAL_WEIGHT_DESIRABILITY,
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSettings {
    pub gamma: f64,
    pub t_max: usize,
    pub mode: UpdateMode,
    pub divisions: usize,
    pub max_len: usize,
    pub significance: f64,
    pub equal_weights: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaScore {
    pub lambda: Vec<f64>,
    pub mu: [f64; CRITERIA],
    pub pim: f64,
    pub selected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionTest {
    pub criterion: String,
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub p_value: f64,
    pub test: String,
    /// `+` if the method beats MUL/D on this criterion, `-` if it loses,
    /// absent when the difference is not significant.
    pub marker: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodRow {
    pub method: Method,
    pub name: String,
    pub pim: f64,
    /// Mean over paths of the single-path PIM.
    pub mean_path_pim: f64,
    /// `[mean D_actual - D_opt, mean L_opt - L_actual, mean R_opt - R_actual]`.
    pub mu: [f64; CRITERIA],
    pub mean_hops: f64,
    /// Comparison with MUL/D; absent on the MUL/D row.
    pub tests: Option<Vec<CriterionTest>>,
}

/// Per-path `PIM_P(MUL/D) - PIM_P(baseline)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaSeries {
    pub method: Method,
    pub mean: f64,
    pub median: f64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    /// Sup-norm change per sweep for the selected weight vector.
    pub lambda_star: Vec<f64>,
    /// Largest change over the whole grid at each sweep.
    pub grid_max: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub schema_version: u32,
    pub settings: BenchmarkSettings,
    pub evaluated_paths: usize,
    /// Trajectories without a usable hop sequence on the graph.
    pub skipped_paths: usize,
    pub lambda_star: Vec<f64>,
    pub grid: Vec<LambdaScore>,
    pub convergence: Convergence,
    pub rows: Vec<MethodRow>,
    pub deltas: Vec<DeltaSeries>,
}

impl BenchmarkReport {
    pub fn row(&self, method: Method) -> Option<&MethodRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    /// Fixed-width table: Method | PIM | mean dD | p | mean dL | p | mean dR | p | marker.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<34} {:>12} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}  marker",
            "Method", "PIM", "mean dD", "p", "mean dL", "p", "mean dR", "p"
        );
        for row in &self.rows {
            let mut line = format!("{:<34} {:>12.4}", row.name, row.pim);
            for (i, mu) in row.mu.iter().enumerate() {
                let p = match &row.tests {
                    Some(tests) => format!("{:.3e}", tests[i].p_value),
                    None => "-".to_string(),
                };
                let _ = write!(line, " {mu:>10.4} {p:>10}");
            }
            let marker = match &row.tests {
                Some(tests) => tests
                    .iter()
                    .filter_map(|t| t.marker.as_ref().map(|m| format!("{}{}", t.criterion, m)))
                    .collect::<Vec<_>>()
                    .join(" "),
                None => "reference".to_string(),
            };
            let _ = writeln!(out, "{line}  {marker}");
        }
        let lambda: Vec<String> = self.lambda_star.iter().map(|w| format!("{w:.1}")).collect();
        let _ = writeln!(
            out,
            "\nlambda* = ({}), paths = {}, skipped = {}",
            lambda.join(", "),
            self.evaluated_paths,
            self.skipped_paths
        );
        for d in &self.deltas {
            let _ = writeln!(
                out,
                "path PIM delta vs {:<26} mean {:>12.4}  median {:>12.4}",
                d.method.label(),
                d.mean,
                d.median
            );
        }
        out
    }
}

/// `method,path_index,delta` rows for box plots of the per-path deltas.
pub fn write_plot_data_csv(report: &BenchmarkReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut writer = csv::Writer::from_path(path).map_err(err)?;
    writer
        .write_record(["method", "path_index", "delta"])
        .map_err(err)?;
    for series in &report.deltas {
        for (i, v) in series.values.iter().enumerate() {
            writer
                .write_record([series.method.label(), &i.to_string(), &v.to_string()])
                .map_err(err)?;
        }
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Parses method labels, rejecting unknown ones.
pub fn parse_methods<S: AsRef<str>>(labels: &[S]) -> Result<Vec<Method>> {
    labels.iter().map(|l| l.as_ref().parse()).collect()
}

/// Observed paths usable for evaluation, plus how many were skipped.
pub fn evaluation_set(
    graph: &TransitionGraph,
    trajectories: &[CareerTrajectory],
) -> (Vec<PlannedPath>, usize) {
    let mut paths = Vec::with_capacity(trajectories.len());
    let mut skipped = 0;
    for t in trajectories {
        match actual_path(graph, t) {
            Ok(p) if !p.is_empty() => paths.push(p),
            _ => skipped += 1,
        }
    }
    (paths, skipped)
}

/// Distinct origins of `paths`, ascending.
fn origins(paths: &[PlannedPath]) -> Vec<JobId> {
    paths
        .iter()
        .map(|p| p.origin)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Plans once per distinct origin and expands back to one path per actual path.
fn plan_all(
    graph: &TransitionGraph,
    actual: &[PlannedPath],
    origins: &[JobId],
    plan: impl Fn(JobId) -> Result<PlannedPath> + Sync,
) -> Result<Vec<PlannedPath>> {
    let planned: Vec<PlannedPath> = origins
        .par_iter()
        .map(|&o| plan(o))
        .collect::<Result<_>>()?;
    let mut by_origin = vec![None; graph.job_count()];
    for (o, p) in origins.iter().zip(planned) {
        by_origin[*o] = Some(p);
    }
    Ok(actual
        .iter()
        .map(|a| by_origin[a.origin].clone().expect("origin planned"))
        .collect())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Per-path improvement vectors and their means.
fn improvements(
    optimized: &[PlannedPath],
    actual: &[PlannedPath],
) -> (Vec<[f64; CRITERIA]>, [f64; CRITERIA]) {
    let diffs: Vec<[f64; CRITERIA]> = optimized
        .iter()
        .zip(actual)
        .map(|(o, a)| improvement(o, a))
        .collect();
    let mut sums = [0.0; CRITERIA];
    for d in &diffs {
        for (s, v) in sums.iter_mut().zip(d) {
            *s += v;
        }
    }
    let mu = sums.map(|s| s / diffs.len() as f64);
    (diffs, mu)
}

/// Per-edge payoff of a single-objective utility baseline; `None` for the
/// greedy planners and MUL/D.
pub fn baseline_payoff(
    graph: &TransitionGraph,
    method: Method,
    equal_weights: [f64; 3],
) -> Result<Option<Vec<f64>>> {
    Ok(Some(match method {
        Method::UtilityDuration => criterion_payoff(graph, Criterion::Duration)?,
        Method::UtilityLevel => criterion_payoff(graph, Criterion::Level)?,
        Method::UtilityDesirability => criterion_payoff(graph, Criterion::Desirability)?,
        Method::EquallyWeighted => {
            let [wl, wd, wr] = equal_weights;
            equally_weighted_payoff(graph, wl, wd, wr)?
        }
        _ => return Ok(None),
    }))
}

fn baseline_paths(
    graph: &TransitionGraph,
    method: Method,
    actual: &[PlannedPath],
    origins: &[JobId],
    config: &BenchmarkConfig,
) -> Result<Vec<PlannedPath>> {
    let max_len = config.max_len;
    if let Some(criterion) = method.greedy_criterion() {
        return plan_all(graph, actual, origins, |o| {
            greedy_path(graph, o, criterion, max_len)
        });
    }
    let payoff = baseline_payoff(graph, method, config.equal_weights)?
        .ok_or_else(|| Error::InvalidParameter(format!("{method} has no utility payoff")))?;
    let table = value_iteration(graph, &payoff, &config.iteration)?;
    plan_all(graph, actual, origins, |o| {
        utility_path(graph, &table, o, max_len, method.label())
    })
}

/// PIM of every learned table against the actual paths, and the winner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSelection {
    pub lambda_star: Vec<f64>,
    /// Position of lambda* among `scores`.
    pub star_index: usize,
    pub scores: Vec<LambdaScore>,
}

/// Scores each table (which must carry its weight vector) by the PIM of its
/// planned paths over `actual`, and selects lambda*.
pub fn score_grid(
    graph: &TransitionGraph,
    actual: &[PlannedPath],
    tables: &[UtilityTable],
    max_len: usize,
) -> Result<GridSelection> {
    if actual.is_empty() {
        return Err(Error::Empty("no actual paths to score against"));
    }
    let origins = origins(actual);
    let mut scored = Vec::with_capacity(tables.len());
    for table in tables {
        let lambda = table
            .lambda
            .clone()
            .ok_or_else(|| Error::InvalidParameter("utility table has no weight vector".into()))?;
        let paths = plan_all(graph, actual, &origins, |o| {
            utility_path(graph, table, o, max_len, Method::Muld.label())
        })?;
        let (_, mu) = improvements(&paths, actual);
        scored.push((lambda, mu));
    }
    let pims: Vec<(WeightVector, f64)> =
        scored.iter().map(|(w, mu)| (w.clone(), pim(mu))).collect();
    let star = select_lambda_star(&pims)?;
    let star_index = pims
        .iter()
        .position(|(w, _)| *w == star)
        .expect("lambda* is on the grid");
    let scores = scored
        .iter()
        .zip(&pims)
        .enumerate()
        .map(|(i, ((w, mu), (_, p)))| LambdaScore {
            lambda: w.components().to_vec(),
            mu: *mu,
            pim: *p,
            selected: i == star_index,
        })
        .collect();
    Ok(GridSelection {
        lambda_star: star.components().to_vec(),
        star_index,
        scores,
    })
}

/// Runs MUL/D over the full grid, picks lambda* by PIM, and compares it
/// against each requested baseline. MUL/D is always included.
pub fn benchmark(
    graph: &TransitionGraph,
    trajectories: &[CareerTrajectory],
    methods: &[Method],
    config: &BenchmarkConfig,
) -> Result<BenchmarkReport> {
    graph.ensure_criteria()?;
    config.iteration.validate()?;
    let (actual, skipped) = evaluation_set(graph, trajectories);
    if actual.is_empty() {
        return Err(Error::Empty("no trajectory has a hop on the graph"));
    }
    let origins = origins(&actual);

    let grid = make_weight_grid(CRITERIA, config.divisions)?;
    let tables = muld_learn(graph, &grid, &config.iteration)?;
    let selection = score_grid(graph, &actual, &tables, config.max_len)?;
    let star_index = selection.star_index;
    let star_table: &UtilityTable = &tables[star_index];
    let sweeps = tables.iter().map(|t| t.trace.len()).max().unwrap_or(0);
    let grid_max = (0..sweeps)
        .map(|k| {
            tables
                .iter()
                .filter_map(|t| t.trace.get(k))
                .fold(0.0f64, |a, &b| a.max(b))
        })
        .collect();

    let muld_paths = plan_all(graph, &actual, &origins, |o| {
        utility_path(graph, star_table, o, config.max_len, Method::Muld.label())
    })?;
    let (muld_diffs, muld_mu) = improvements(&muld_paths, &actual);
    let muld_path_pims: Vec<f64> = muld_diffs.iter().map(|d| pim(d)).collect();

    let requested: BTreeSet<Method> = methods.iter().copied().chain([Method::Muld]).collect();
    let mut rows = Vec::with_capacity(requested.len());
    let mut deltas = Vec::new();
    for method in Method::ALL.into_iter().filter(|m| requested.contains(m)) {
        let paths = if method == Method::Muld {
            muld_paths.clone()
        } else {
            baseline_paths(graph, method, &actual, &origins, config)?
        };
        let (diffs, mu) = improvements(&paths, &actual);
        let path_pims: Vec<f64> = diffs.iter().map(|d| pim(d)).collect();
        let mean_hops = paths.iter().map(|p| p.len() as f64).sum::<f64>() / paths.len() as f64;
        let tests = if method == Method::Muld {
            None
        } else {
            let mut tests = Vec::with_capacity(CRITERIA);
            for c in Criterion::ALL {
                let i = c.index();
                let x: Vec<f64> = diffs.iter().map(|d| d[i]).collect();
                let y: Vec<f64> = muld_diffs.iter().map(|d| d[i]).collect();
                let w = wilcoxon_signed_rank(&x, &y)?;
                let marker = (w.p_value < config.significance && mu[i] != muld_mu[i])
                    .then(|| if mu[i] > muld_mu[i] { "+" } else { "-" }.to_string());
                tests.push(CriterionTest {
                    criterion: c.symbol().to_string(),
                    statistic: w.statistic,
                    p_value: w.p_value,
                    test: match w.method {
                        WilcoxonMethod::Exact => "exact",
                        WilcoxonMethod::Normal => "normal",
                        WilcoxonMethod::Degenerate => "degenerate",
                    }
                    .to_string(),
                    marker,
                });
            }
            let values: Vec<f64> = muld_path_pims
                .iter()
                .zip(&path_pims)
                .map(|(m, b)| m - b)
                .collect();
            deltas.push(DeltaSeries {
                method,
                mean: mean(&values),
                median: median(&values),
                values,
            });
            Some(tests)
        };
        rows.push(MethodRow {
            method,
            name: method.display_name().to_string(),
            pim: pim(&mu),
            mean_path_pim: mean(&path_pims),
            mu,
            mean_hops,
            tests,
        });
    }

    Ok(BenchmarkReport {
        schema_version: REPORT_SCHEMA_VERSION,
        settings: BenchmarkSettings {
            gamma: config.iteration.gamma,
            t_max: config.iteration.max_iter,
            mode: config.iteration.mode,
            divisions: config.divisions,
            max_len: config.max_len,
            significance: config.significance,
            equal_weights: config.equal_weights,
        },
        evaluated_paths: actual.len(),
        skipped_paths: skipped,
        lambda_star: selection.lambda_star,
        grid: selection.scores,
        convergence: Convergence {
            lambda_star: star_table.trace.clone(),
            grid_max,
        },
        rows,
        deltas,
    })
}

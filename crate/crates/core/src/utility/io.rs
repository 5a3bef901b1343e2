//! Utility table exports and the grid manifest.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IterationConfig, UpdateMode, UtilityTable, WeightGrid, WeightVector};
use crate::error::{Error, Result};
use crate::graph::TransitionGraph;

pub const MANIFEST_FILE: &str = "grid.json";
const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct UtilityRow {
    s_id: usize,
    d_id: usize,
    utility: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub iterations: usize,
    pub first_delta: f64,
    pub last_delta: f64,
    pub deltas: Vec<f64>,
}

impl TraceSummary {
    fn of(trace: &[f64]) -> Self {
        Self {
            iterations: trace.len(),
            first_delta: trace.first().copied().unwrap_or(0.0),
            last_delta: trace.last().copied().unwrap_or(0.0),
            deltas: trace.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Position in the raw (unfiltered) grid.
    pub index: usize,
    pub lambda: Vec<f64>,
    pub steps: Vec<i64>,
    pub feasible: bool,
    /// Utility CSV relative to the manifest, for feasible entries.
    pub table: Option<String>,
    pub trace: Option<TraceSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridManifest {
    pub schema_version: u32,
    pub criteria: usize,
    pub divisions: usize,
    pub gamma: f64,
    pub t_max: usize,
    pub mode: UpdateMode,
    pub raw_count: usize,
    pub feasible_count: usize,
    pub entries: Vec<ManifestEntry>,
}

impl GridManifest {
    /// Feasible weight vectors in grid order, rebuilt from the integer steps.
    pub fn feasible_vectors(&self) -> Result<Vec<WeightVector>> {
        self.entries
            .iter()
            .filter(|e| e.feasible)
            .map(|e| {
                let total: i64 = e.steps.iter().sum();
                WeightVector::new(e.steps.iter().map(|&k| k as f64 / total as f64).collect())
            })
            .collect()
    }
}

/// `s_id,d_id,utility`, one row per graph edge.
pub fn write_utility_csv(
    graph: &TransitionGraph,
    table: &UtilityTable,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut writer = csv::Writer::from_path(path).map_err(err)?;
    for (e, edge) in graph.edges().iter().enumerate() {
        writer
            .serialize(UtilityRow {
                s_id: edge.source,
                d_id: edge.target,
                utility: table.utility(e),
            })
            .map_err(err)?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Reads utilities back, checking the rows line up with the graph's edges.
pub fn read_utility_csv(graph: &TransitionGraph, path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let err = |message: String| Error::Csv {
        path: path.to_path_buf(),
        message,
    };
    if !path.exists() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        ));
    }
    let mut reader = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
    let mut values = Vec::with_capacity(graph.edge_count());
    for (e, row) in reader.deserialize::<UtilityRow>().enumerate() {
        let row = row.map_err(|e| err(e.to_string()))?;
        let edge = graph.edges().get(e).ok_or_else(|| {
            err(format!(
                "more rows than the graph's {} edges",
                graph.edge_count()
            ))
        })?;
        if (edge.source, edge.target) != (row.s_id, row.d_id) {
            return Err(err(format!(
                "row {e} is edge {}->{}, graph has {}->{}",
                row.s_id, row.d_id, edge.source, edge.target
            )));
        }
        values.push(row.utility);
    }
    if values.len() != graph.edge_count() {
        return Err(err(format!(
            "{} rows for {} edges",
            values.len(),
            graph.edge_count()
        )));
    }
    Ok(values)
}

/// Writes one utility CSV per feasible grid vector plus [`MANIFEST_FILE`].
/// `tables` must be in feasible grid order, as returned by `muld_learn`.
pub fn save_learned(
    dir: impl AsRef<Path>,
    graph: &TransitionGraph,
    grid: &WeightGrid,
    tables: &[UtilityTable],
    config: &IterationConfig,
) -> Result<GridManifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    if tables.len() != grid.feasible_count() {
        return Err(Error::DimensionMismatch {
            expected: grid.feasible_count(),
            actual: tables.len(),
        });
    }
    let mut tables = tables.iter();
    let mut entries = Vec::with_capacity(grid.raw_count());
    for (index, entry) in grid.entries.iter().enumerate() {
        let (table, trace) = if entry.feasible {
            let t = tables.next().expect("one table per feasible entry");
            let name = format!("utility_{index:03}.csv");
            write_utility_csv(graph, t, dir.join(&name))?;
            (Some(name), Some(TraceSummary::of(&t.trace)))
        } else {
            (None, None)
        };
        entries.push(ManifestEntry {
            index,
            lambda: entry.weights.clone(),
            steps: entry.steps.clone(),
            feasible: entry.feasible,
            table,
            trace,
        });
    }
    let manifest = GridManifest {
        schema_version: SCHEMA_VERSION,
        criteria: grid.criteria,
        divisions: grid.divisions,
        gamma: config.gamma,
        t_max: config.max_iter,
        mode: config.mode,
        raw_count: grid.raw_count(),
        feasible_count: grid.feasible_count(),
        entries,
    };
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Loads the manifest and every feasible table written by [`save_learned`].
pub fn load_learned(
    dir: impl AsRef<Path>,
    graph: &TransitionGraph,
) -> Result<(GridManifest, Vec<UtilityTable>)> {
    let dir = dir.as_ref();
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: GridManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let lambdas = manifest.feasible_vectors()?;
    let mut tables = Vec::with_capacity(lambdas.len());
    for (entry, lambda) in manifest.entries.iter().filter(|e| e.feasible).zip(lambdas) {
        let name = entry.table.as_ref().ok_or_else(|| {
            Error::InvalidParameter(format!("grid entry {} has no table", entry.index))
        })?;
        let values = read_utility_csv(graph, dir.join(name))?;
        let mut table =
            UtilityTable::from_values(values, manifest.gamma, manifest.mode, Some(lambda));
        table.trace = entry
            .trace
            .as_ref()
            .map(|t| t.deltas.clone())
            .unwrap_or_default();
        tables.push(table);
    }
    Ok((manifest, tables))
}

//! Loading and saving the files each pipeline stage hands to the next.

use std::fs;
use std::path::Path;

use careerpath_core::evaluation::{BenchmarkReport, GridSelection};
use careerpath_core::graph::{read_graph, TransitionGraph};
use careerpath_core::trajectory::{clean, read_jsonl, CareerTrajectory, IngestPolicy};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::ServiceError;

pub const SELECTION_SCHEMA_VERSION: u32 = 1;

/// Output of `select`: the PIM of every grid point and the chosen lambda*.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub schema_version: u32,
    pub max_len: usize,
    pub evaluated_paths: usize,
    pub skipped_paths: usize,
    #[serde(flatten)]
    pub selection: GridSelection,
}

pub fn require(path: &Path) -> Result<&Path, ServiceError> {
    if path.exists() {
        Ok(path)
    } else {
        Err(ServiceError::MissingInput(path.to_path_buf()))
    }
}

pub fn ensure_parent(path: &Path) -> Result<(), ServiceError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| careerpath_core::Error::io(parent, e))?;
    }
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), ServiceError> {
    ensure_parent(path)?;
    fs::write(path, text).map_err(|e| careerpath_core::Error::io(path, e))?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String, ServiceError> {
    require(path)?;
    Ok(fs::read_to_string(path).map_err(|e| careerpath_core::Error::io(path, e))?)
}

/// The corpus at `config.corpus`, cleaned with the configured support.
pub fn load_corpus(config: &PipelineConfig) -> Result<Vec<CareerTrajectory>, ServiceError> {
    let ingested = read_jsonl(require(&config.corpus)?, IngestPolicy::Strict)?;
    Ok(clean(&ingested.trajectories, config.min_support, true))
}

pub fn load_graph(config: &PipelineConfig) -> Result<TransitionGraph, ServiceError> {
    let nodes = config.nodes_path();
    let edges = config.edges_path();
    Ok(read_graph(require(&nodes)?, require(&edges)?)?)
}

pub fn load_selection(config: &PipelineConfig) -> Result<SelectionRecord, ServiceError> {
    let path = config.selection_path();
    let text = read_text(&path)?;
    serde_json::from_str(&text).map_err(|e| {
        careerpath_core::Error::Parse {
            line: e.line(),
            message: format!("{}: {e}", path.display()),
        }
        .into()
    })
}

pub fn load_report(path: &Path) -> Result<BenchmarkReport, ServiceError> {
    Ok(BenchmarkReport::from_json(&read_text(path)?)?)
}

//! Pipeline settings: defaults, an optional TOML file, then CLI overrides.

use std::fs;
use std::path::{Path, PathBuf};

use careerpath_core::graph::{DEFAULT_ALPHA, DEFAULT_PAGERANK_MAX_ITER, DEFAULT_PAGERANK_TOL};
use careerpath_core::planner::DEFAULT_MAX_LEN;
use careerpath_core::trajectory::{DateStamp, GeneratorConfig};
use careerpath_core::utility::{
    IterationConfig, UpdateMode, DEFAULT_GAMMA, DEFAULT_GRID_DIVISIONS, DEFAULT_T_MAX,
};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

pub const NODES_FILE: &str = "nodes.csv";
pub const EDGES_FILE: &str = "edges.csv";
pub const SELECTION_FILE: &str = "selection.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub gamma: f64,
    pub t_max: usize,
    /// Grid divisions per criterion.
    pub h: usize,
    pub alpha: f64,
    pub max_len: usize,
    pub min_support: usize,
    pub seed: u64,
    pub mode: UpdateMode,
    pub corpus: PathBuf,
    pub graph_dir: PathBuf,
    pub tables_dir: PathBuf,
    pub report: PathBuf,
    pub generator: GeneratorSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSection {
    pub jobs: usize,
    pub persons: usize,
    pub mean_len: f64,
    pub levels: usize,
    pub date_min: DateStamp,
    pub date_max: DateStamp,
}

impl Default for GeneratorSection {
    fn default() -> Self {
        let g = GeneratorConfig::default();
        Self {
            jobs: g.jobs,
            persons: g.persons,
            mean_len: g.mean_len,
            levels: g.levels,
            date_min: g.date_min,
            date_max: g.date_max,
        }
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            t_max: DEFAULT_T_MAX,
            h: DEFAULT_GRID_DIVISIONS,
            alpha: DEFAULT_ALPHA,
            max_len: DEFAULT_MAX_LEN,
            min_support: 2,
            seed: 42,
            mode: UpdateMode::Sync,
            corpus: PathBuf::from("data/corpus.jsonl"),
            graph_dir: PathBuf::from("data/graph"),
            tables_dir: PathBuf::from("data/tables"),
            report: PathBuf::from("data/report.json"),
            generator: GeneratorSection::default(),
        }
    }
}

/// Per-key replacements, typically from command-line flags.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub gamma: Option<f64>,
    pub t_max: Option<usize>,
    pub h: Option<usize>,
    pub alpha: Option<f64>,
    pub max_len: Option<usize>,
    pub min_support: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<UpdateMode>,
    pub corpus: Option<PathBuf>,
    pub graph_dir: Option<PathBuf>,
    pub tables_dir: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub persons: Option<usize>,
    pub mean_len: Option<f64>,
    pub levels: Option<usize>,
    pub date_min: Option<DateStamp>,
    pub date_max: Option<DateStamp>,
}

macro_rules! apply {
    ($target:expr, $source:expr, $($field:ident),*) => {
        $(if let Some(v) = $source.$field.clone() { $target.$field = v; })*
    };
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ServiceError> {
        toml::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))
    }

    /// Defaults, then `path` if given, then `overrides`; validated.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, ServiceError> {
        let mut config = match path {
            Some(p) => {
                let text = fs::read_to_string(p)
                    .map_err(|_| ServiceError::MissingInput(p.to_path_buf()))?;
                Self::from_toml(&text)?
            }
            None => Self::default(),
        };
        apply!(
            config,
            overrides,
            gamma,
            t_max,
            h,
            alpha,
            max_len,
            min_support,
            seed,
            mode,
            corpus,
            graph_dir,
            tables_dir,
            report
        );
        apply!(
            config.generator,
            overrides,
            jobs,
            persons,
            mean_len,
            levels,
            date_min,
            date_max
        );
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        let bad = |msg: String| Err(ServiceError::Config(msg));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad(format!("gamma must be in (0, 1], got {}", self.gamma));
        }
        if self.t_max == 0 {
            return bad("t_max must be positive".into());
        }
        if self.h == 0 {
            return bad("h must be positive".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if self.max_len == 0 {
            return bad("max_len must be positive".into());
        }
        if self.min_support == 0 {
            return bad("min_support must be positive".into());
        }
        self.generator_config()
            .validate()
            .map_err(|e| ServiceError::Config(e.to_string()))
    }

    pub fn iteration(&self) -> IterationConfig {
        IterationConfig {
            gamma: self.gamma,
            max_iter: self.t_max,
            mode: self.mode,
            stop_tol: None,
        }
    }

    pub fn generator_config(&self) -> GeneratorConfig {
        let g = &self.generator;
        GeneratorConfig {
            jobs: g.jobs,
            persons: g.persons,
            mean_len: g.mean_len,
            levels: g.levels,
            date_min: g.date_min,
            date_max: g.date_max,
        }
    }

    pub fn pagerank_tol(&self) -> f64 {
        DEFAULT_PAGERANK_TOL
    }

    pub fn pagerank_max_iter(&self) -> usize {
        DEFAULT_PAGERANK_MAX_ITER
    }

    pub fn nodes_path(&self) -> PathBuf {
        self.graph_dir.join(NODES_FILE)
    }

    pub fn edges_path(&self) -> PathBuf {
        self.graph_dir.join(EDGES_FILE)
    }

    pub fn selection_path(&self) -> PathBuf {
        self.tables_dir.join(SELECTION_FILE)
    }
}

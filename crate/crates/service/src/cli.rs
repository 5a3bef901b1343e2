//! Command-line driver for the offline pipeline and the server.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use careerpath_core::evaluation::{
    benchmark, evaluation_set, parse_methods, score_grid, write_plot_data_csv, BenchmarkConfig,
    DEFAULT_SIGNIFICANCE,
};
use careerpath_core::graph::{
    write_edges_csv, write_histogram_csv, write_nodes_csv, TransitionGraph, CRITERIA,
};
use careerpath_core::planner::{
    Method, EQUAL_WEIGHT_DESIRABILITY, EQUAL_WEIGHT_DURATION, EQUAL_WEIGHT_LEVEL,
};
use careerpath_core::trajectory::{
    clean, generate_synthetic, read_jsonl, write_jsonl, DateStamp, IngestPolicy,
};
use careerpath_core::utility::{
    load_learned, make_weight_grid, muld_learn, save_learned, UpdateMode, MANIFEST_FILE,
};
use clap::{Args, Parser, Subcommand};

use crate::api;
use crate::artifacts::{
    ensure_parent, load_corpus, load_graph, load_report, require, write_text, SelectionRecord,
    SELECTION_SCHEMA_VERSION,
};
use crate::config::{Overrides, PipelineConfig};
use crate::error::ServiceError;
use crate::query::{Engine, LambdaSpec, PlanRequest};

#[derive(Debug, Parser)]
#[command(
    name = "careerpath",
    version,
    about = "Multicriteria career path planning over a job transition graph"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Every pipeline setting can be given here; flags beat the config file.
#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    #[arg(long = "t-max", alias = "t_max", global = true)]
    pub t_max: Option<usize>,
    /// Grid divisions per criterion.
    #[arg(long, global = true)]
    pub h: Option<usize>,
    /// PageRank teleport probability.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long = "max-len", alias = "max_len", global = true)]
    pub max_len: Option<usize>,
    #[arg(long = "min-support", alias = "min_support", global = true)]
    pub min_support: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub mode: Option<UpdateMode>,
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    #[arg(long = "graph-dir", alias = "graph_dir", global = true)]
    pub graph_dir: Option<PathBuf>,
    #[arg(long = "tables-dir", alias = "tables_dir", global = true)]
    pub tables_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub persons: Option<usize>,
    #[arg(long = "mean-len", alias = "mean_len", global = true)]
    pub mean_len: Option<f64>,
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    #[arg(long = "date-min", alias = "date_min", global = true)]
    pub date_min: Option<DateStamp>,
    #[arg(long = "date-max", alias = "date_max", global = true)]
    pub date_max: Option<DateStamp>,
}

impl GlobalArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            gamma: self.gamma,
            t_max: self.t_max,
            h: self.h,
            alpha: self.alpha,
            max_len: self.max_len,
            min_support: self.min_support,
            seed: self.seed,
            mode: self.mode,
            corpus: self.corpus.clone(),
            graph_dir: self.graph_dir.clone(),
            tables_dir: self.tables_dir.clone(),
            report: self.report.clone(),
            jobs: self.jobs,
            persons: self.persons,
            mean_len: self.mean_len,
            levels: self.levels,
            date_min: self.date_min,
            date_max: self.date_max,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded synthetic corpus as JSONL.
    Generate {
        /// Defaults to the configured corpus path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate and clean a JSONL corpus.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Drop schema violations instead of failing.
        #[arg(long)]
        skip_invalid: bool,
        /// Defaults to the configured corpus path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the transition graph and write nodes.csv and edges.csv.
    Build,
    /// Learn a utility table for every feasible weight vector.
    Learn,
    /// Score the grid on the corpus and record lambda*.
    Select,
    /// Plan a path from one job.
    Plan {
        #[arg(long)]
        origin: usize,
        /// `auto` or comma-separated weights over (D, L, R).
        #[arg(long, default_value = "auto")]
        lambda: LambdaSpec,
        #[arg(long, default_value = "muld")]
        method: Method,
        /// Use the nearest grid point when the weights are off the grid.
        #[arg(long)]
        snap: bool,
        /// Also write the JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare MUL/D against the baselines on the corpus.
    Benchmark {
        /// Comma-separated method labels; MUL/D is always added.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
    },
    /// Per-path PIM differences from a benchmark report, as CSV.
    PlotData {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Out-degree histogram of the graph, as CSV.
    Stats {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API (and optionally the explorer's static files).
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

pub fn run(cli: Cli) -> Result<(), ServiceError> {
    let config = PipelineConfig::load(cli.global.config.as_deref(), &cli.global.overrides())?;
    match cli.command {
        Command::Generate { out } => generate(&config, out),
        Command::Ingest {
            input,
            skip_invalid,
            out,
        } => ingest(&config, &input, skip_invalid, out),
        Command::Build => build(&config),
        Command::Learn => learn(&config),
        Command::Select => select(&config),
        Command::Plan {
            origin,
            lambda,
            method,
            snap,
            out,
        } => plan(&config, origin, lambda, method, snap, out),
        Command::Benchmark { methods } => run_benchmark(&config, methods),
        Command::PlotData { out } => plot_data(&config, out),
        Command::Stats { out } => stats(&config, out),
        Command::Serve { addr, static_dir } => serve(&config, addr, static_dir),
    }
}

fn generate(config: &PipelineConfig, out: Option<PathBuf>) -> Result<(), ServiceError> {
    let out = out.unwrap_or_else(|| config.corpus.clone());
    let corpus = generate_synthetic(&config.generator_config(), config.seed)?;
    ensure_parent(&out)?;
    write_jsonl(&out, &corpus.trajectories)?;
    println!(
        "wrote {} trajectories over {} jobs to {}",
        corpus.trajectories.len(),
        corpus.jobs.len(),
        out.display()
    );
    Ok(())
}

fn ingest(
    config: &PipelineConfig,
    input: &Path,
    skip_invalid: bool,
    out: Option<PathBuf>,
) -> Result<(), ServiceError> {
    let policy = if skip_invalid {
        IngestPolicy::Skip
    } else {
        IngestPolicy::Strict
    };
    let ingested = read_jsonl(require(input)?, policy)?;
    for warning in &ingested.rejected {
        eprintln!("skipped: {warning}");
    }
    let cleaned = clean(&ingested.trajectories, config.min_support, true);
    let out = out.unwrap_or_else(|| config.corpus.clone());
    ensure_parent(&out)?;
    write_jsonl(&out, &cleaned)?;
    println!(
        "read {}, rejected {}, kept {} after cleaning; wrote {}",
        ingested.trajectories.len() + ingested.rejected.len(),
        ingested.rejected.len(),
        cleaned.len(),
        out.display()
    );
    Ok(())
}

fn build(config: &PipelineConfig) -> Result<(), ServiceError> {
    let trajectories = load_corpus(config)?;
    let (graph, report) = TransitionGraph::from_trajectories(
        &trajectories,
        config.alpha,
        config.pagerank_tol(),
        config.pagerank_max_iter(),
    )?;
    ensure_parent(&config.nodes_path())?;
    write_nodes_csv(&graph, config.nodes_path())?;
    write_edges_csv(&graph, config.edges_path())?;
    println!(
        "graph: {} jobs, {} edges from {} trajectories",
        graph.job_count(),
        graph.edge_count(),
        trajectories.len()
    );
    println!(
        "pagerank: {} iterations, residual {:.3e}, converged {}",
        report.iterations, report.residual, report.converged
    );
    if !report.converged {
        eprintln!("warning: pagerank did not converge");
    }
    Ok(())
}

fn learn(config: &PipelineConfig) -> Result<(), ServiceError> {
    let graph = load_graph(config)?;
    let grid = make_weight_grid(CRITERIA, config.h)?;
    let tables = muld_learn(&graph, &grid, &config.iteration())?;
    let manifest = save_learned(
        &config.tables_dir,
        &graph,
        &grid,
        &tables,
        &config.iteration(),
    )?;
    println!(
        "learned {} tables ({} raw grid points) into {}",
        manifest.feasible_count,
        manifest.raw_count,
        config.tables_dir.display()
    );
    Ok(())
}

fn select(config: &PipelineConfig) -> Result<(), ServiceError> {
    let graph = load_graph(config)?;
    require(&config.tables_dir.join(MANIFEST_FILE))?;
    let (_, tables) = load_learned(&config.tables_dir, &graph)?;
    let trajectories = load_corpus(config)?;
    let (actual, skipped) = evaluation_set(&graph, &trajectories);
    let selection = score_grid(&graph, &actual, &tables, config.max_len)?;
    let star = &selection.scores[selection.star_index];
    println!(
        "lambda* = {:?} (PIM {:.6}) over {} paths",
        selection.lambda_star,
        star.pim,
        actual.len()
    );
    let record = SelectionRecord {
        schema_version: SELECTION_SCHEMA_VERSION,
        max_len: config.max_len,
        evaluated_paths: actual.len(),
        skipped_paths: skipped,
        selection,
    };
    let text = serde_json::to_string_pretty(&record).expect("selection serializes") + "\n";
    write_text(&config.selection_path(), &text)
}

fn plan(
    config: &PipelineConfig,
    origin: usize,
    lambda: LambdaSpec,
    method: Method,
    snap: bool,
    out: Option<PathBuf>,
) -> Result<(), ServiceError> {
    let engine = Engine::load(config)?;
    let request = PlanRequest {
        origin_job_id: origin,
        lambda,
        method,
        max_len: None,
        snap,
    };
    let response = engine.plan(&request)?;
    let text = serde_json::to_string_pretty(&response).expect("plan serializes") + "\n";
    if let Some(out) = out {
        write_text(&out, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn run_benchmark(
    config: &PipelineConfig,
    methods: Option<Vec<String>>,
) -> Result<(), ServiceError> {
    let methods = match methods {
        Some(labels) => parse_methods(&labels).map_err(|e| ServiceError::Config(e.to_string()))?,
        None => Method::ALL.to_vec(),
    };
    let graph = load_graph(config)?;
    let trajectories = load_corpus(config)?;
    let bench = BenchmarkConfig {
        iteration: config.iteration(),
        divisions: config.h,
        max_len: config.max_len,
        significance: DEFAULT_SIGNIFICANCE,
        equal_weights: [
            EQUAL_WEIGHT_LEVEL,
            EQUAL_WEIGHT_DURATION,
            EQUAL_WEIGHT_DESIRABILITY,
        ],
    };
    let report = benchmark(&graph, &trajectories, &methods, &bench)?;
    write_text(&config.report, &report.to_json())?;
    let table = report.render_table();
    write_text(&config.report.with_extension("txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn plot_data(config: &PipelineConfig, out: Option<PathBuf>) -> Result<(), ServiceError> {
    let report = load_report(&config.report)?;
    let out = out.unwrap_or_else(|| config.report.with_extension("deltas.csv"));
    ensure_parent(&out)?;
    write_plot_data_csv(&report, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn stats(config: &PipelineConfig, out: Option<PathBuf>) -> Result<(), ServiceError> {
    let graph = load_graph(config)?;
    let out = out.unwrap_or_else(|| config.graph_dir.join("out_degree.csv"));
    ensure_parent(&out)?;
    write_histogram_csv(&graph, &out)?;
    let histogram = graph.out_degree_distribution();
    let max = histogram.keys().next_back().copied().unwrap_or(0);
    let sinks = histogram.get(&0).copied().unwrap_or(0);
    println!(
        "{} jobs, {} sinks, max out-degree {max}; wrote {}",
        graph.job_count(),
        sinks,
        out.display()
    );
    Ok(())
}

fn serve(
    config: &PipelineConfig,
    addr: SocketAddr,
    static_dir: Option<PathBuf>,
) -> Result<(), ServiceError> {
    let engine = Arc::new(Engine::load(config)?);
    if let Some(dir) = &static_dir {
        require(dir)?;
    }
    let app = api::router(engine, static_dir.as_deref());
    let runtime =
        tokio::runtime::Runtime::new().map_err(|e| ServiceError::Server(e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| ServiceError::Server(format!("bind {addr}: {e}")))?;
        println!(
            "listening on http://{}",
            listener
                .local_addr()
                .map_err(|e| ServiceError::Server(e.to_string()))?
        );
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| ServiceError::Server(e.to_string()))
    })
}

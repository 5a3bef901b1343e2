//! CSV exports of the transition graph.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Edge, EdgeStats, NodeStats, TransitionGraph};
use crate::error::{Error, Result};
use crate::trajectory::{CompanySize, JobKey};

#[derive(Serialize, Deserialize)]
struct EdgeRow {
    s_id: usize,
    d_id: usize,
    hop_count: usize,
    duration_cost: f64,
    level_gain: f64,
    desirability_gain: f64,
}

#[derive(Serialize, Deserialize)]
struct NodeRow {
    job_id: usize,
    industry: String,
    company_size: String,
    title: String,
    level: f64,
    pagerank: f64,
    out_degree: usize,
}

#[derive(Serialize)]
struct HistogramRow {
    out_degree: usize,
    job_count: usize,
}

fn csv_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for row in rows {
        writer.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        ));
    }
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| csv_err(path, e))
}

/// `s_id,d_id,hop_count,duration_cost,level_gain,desirability_gain`
pub fn write_edges_csv(graph: &TransitionGraph, path: impl AsRef<Path>) -> Result<()> {
    write_rows(
        path.as_ref(),
        graph.edges().iter().map(|e| EdgeRow {
            s_id: e.source,
            d_id: e.target,
            hop_count: e.stats.hop_count,
            duration_cost: e.stats.duration_cost,
            level_gain: e.stats.level_gain,
            desirability_gain: e.stats.desirability_gain,
        }),
    )
}

/// `job_id,industry,company_size,title,level,pagerank,out_degree`
pub fn write_nodes_csv(graph: &TransitionGraph, path: impl AsRef<Path>) -> Result<()> {
    write_rows(
        path.as_ref(),
        graph
            .jobs()
            .iter()
            .zip(graph.nodes())
            .enumerate()
            .map(|(id, (job, node))| NodeRow {
                job_id: id,
                industry: job.industry().to_string(),
                company_size: job.company_size().label().to_string(),
                title: job.title().to_string(),
                level: node.level,
                pagerank: node.pagerank,
                out_degree: node.out_degree,
            }),
    )
}

/// `out_degree,job_count`
pub fn write_histogram_csv(graph: &TransitionGraph, path: impl AsRef<Path>) -> Result<()> {
    write_rows(
        path.as_ref(),
        graph
            .out_degree_distribution()
            .into_iter()
            .map(|(out_degree, job_count)| HistogramRow {
                out_degree,
                job_count,
            }),
    )
}

/// Loads a graph written by [`write_nodes_csv`] and [`write_edges_csv`].
pub fn read_graph(
    nodes_path: impl AsRef<Path>,
    edges_path: impl AsRef<Path>,
) -> Result<TransitionGraph> {
    let nodes_path = nodes_path.as_ref();
    let node_rows: Vec<NodeRow> = read_rows(nodes_path)?;
    let edge_rows: Vec<EdgeRow> = read_rows(edges_path.as_ref())?;

    let mut jobs = Vec::with_capacity(node_rows.len());
    let mut nodes = Vec::with_capacity(node_rows.len());
    for (expected, row) in node_rows.into_iter().enumerate() {
        if row.job_id != expected {
            return Err(csv_err(
                nodes_path,
                format!(
                    "job ids must be dense and ordered; expected {expected}, got {}",
                    row.job_id
                ),
            ));
        }
        let size: CompanySize = row.company_size.parse()?;
        jobs.push(JobKey::new(&row.industry, size, &row.title)?);
        nodes.push(NodeStats {
            level: row.level,
            pagerank: row.pagerank,
            out_degree: row.out_degree,
        });
    }
    let edges = edge_rows
        .into_iter()
        .map(|r| Edge {
            source: r.s_id,
            target: r.d_id,
            stats: EdgeStats {
                hop_count: r.hop_count,
                duration_cost: r.duration_cost,
                level_gain: r.level_gain,
                desirability_gain: r.desirability_gain,
            },
        })
        .collect();
    TransitionGraph::from_parts(jobs, nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{generate_synthetic, GeneratorConfig};

    #[test]
    fn csv_round_trip_is_exact() {
        let cfg = GeneratorConfig {
            jobs: 30,
            persons: 200,
            ..GeneratorConfig::default()
        };
        let corpus = generate_synthetic(&cfg, 3).unwrap();
        let (graph, _) =
            TransitionGraph::from_trajectories(&corpus.trajectories, 0.15, 1e-10, 200).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let nodes = dir.path().join("nodes.csv");
        let edges = dir.path().join("edges.csv");
        write_nodes_csv(&graph, &nodes).unwrap();
        write_edges_csv(&graph, &edges).unwrap();
        let back = read_graph(&nodes, &edges).unwrap();
        assert_eq!(back.jobs(), graph.jobs());
        assert_eq!(back.nodes(), graph.nodes());
        assert_eq!(back.edges(), graph.edges());

        let header = std::fs::read_to_string(&edges).unwrap();
        assert!(
            header.starts_with("s_id,d_id,hop_count,duration_cost,level_gain,desirability_gain\n")
        );
        let header = std::fs::read_to_string(&nodes).unwrap();
        assert!(
            header.starts_with("job_id,industry,company_size,title,level,pagerank,out_degree\n")
        );
    }

    #[test]
    fn missing_file_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = read_graph(dir.path().join("n.csv"), dir.path().join("e.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}

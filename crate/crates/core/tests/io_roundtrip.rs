mod common;

use careerpath_core::graph::{read_graph, write_edges_csv, write_nodes_csv, CRITERIA};
use careerpath_core::trajectory::{
    clean, generate_synthetic, parse_jsonl, to_jsonl_string, GeneratorConfig, IngestPolicy,
};
use careerpath_core::utility::{
    load_learned, make_weight_grid, muld_learn, save_learned, IterationConfig,
};

#[test]
fn corpus_survives_jsonl() {
    let corpus = generate_synthetic(&GeneratorConfig::default(), 42).unwrap();
    let text = to_jsonl_string(&corpus.trajectories);
    let back = parse_jsonl(&text, IngestPolicy::Strict).unwrap();
    assert!(back.rejected.is_empty());
    assert_eq!(back.trajectories, corpus.trajectories);
    assert_eq!(to_jsonl_string(&back.trajectories), text);
}

#[test]
fn cleaning_seed42_is_idempotent() {
    let corpus = generate_synthetic(&GeneratorConfig::default(), 42).unwrap();
    for support in [1, 2, 5, 20] {
        let once = clean(&corpus.trajectories, support, true);
        assert_eq!(clean(&once, support, true), once);
    }
}

#[test]
fn graph_and_tables_survive_export() {
    let (_, g) = common::seed42();
    let dir = tempfile::tempdir().unwrap();
    let (nodes, edges) = (dir.path().join("nodes.csv"), dir.path().join("edges.csv"));
    write_nodes_csv(&g, &nodes).unwrap();
    write_edges_csv(&g, &edges).unwrap();
    let back = read_graph(&nodes, &edges).unwrap();
    assert_eq!(back, g);

    let grid = make_weight_grid(CRITERIA, 4).unwrap();
    let cfg = IterationConfig::default();
    let tables = muld_learn(&g, &grid, &cfg).unwrap();
    let manifest = save_learned(dir.path().join("tables"), &g, &grid, &tables, &cfg).unwrap();
    assert_eq!(manifest.raw_count, 25);
    assert_eq!(manifest.feasible_count, 15);
    let (loaded_manifest, loaded) = load_learned(dir.path().join("tables"), &back).unwrap();
    assert_eq!(loaded_manifest, manifest);
    assert_eq!(loaded, tables);
}

//! A small pipeline run into a temporary directory.
#![allow(dead_code)]

use std::path::Path;

use careerpath::cli::{run, Cli};
use careerpath::config::{Overrides, PipelineConfig};
use clap::Parser;
use tempfile::TempDir;

pub struct Fixture {
    pub dir: TempDir,
    pub config: PipelineConfig,
}

impl Fixture {
    /// Global flags pointing every artifact into the fixture directory.
    pub fn args(&self) -> Vec<String> {
        let p = |name: &str| self.dir.path().join(name).display().to_string();
        vec![
            "--corpus".into(),
            p("corpus.jsonl"),
            "--graph-dir".into(),
            p("graph"),
            "--tables-dir".into(),
            p("tables"),
            "--report".into(),
            p("report.json"),
            "--jobs".into(),
            self.config.generator.jobs.to_string(),
            "--persons".into(),
            self.config.generator.persons.to_string(),
        ]
    }

    pub fn run(&self, command: &[&str]) {
        let mut argv = vec!["careerpath".to_string()];
        argv.extend(self.args());
        argv.extend(command.iter().map(|s| s.to_string()));
        run(Cli::parse_from(argv)).unwrap_or_else(|e| panic!("{command:?}: {e}"));
    }

    pub fn path(&self, name: &str) -> std::path::PathBuf {
        self.dir.path().join(name)
    }
}

/// generate, build, learn, select (and benchmark when asked) on a seeded
/// corpus of `persons` people over `jobs` jobs.
pub fn pipeline(jobs: usize, persons: usize, with_benchmark: bool) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root: &Path = dir.path();
    let overrides = Overrides {
        corpus: Some(root.join("corpus.jsonl")),
        graph_dir: Some(root.join("graph")),
        tables_dir: Some(root.join("tables")),
        report: Some(root.join("report.json")),
        jobs: Some(jobs),
        persons: Some(persons),
        ..Overrides::default()
    };
    let config = PipelineConfig::load(None, &overrides).unwrap();
    let fixture = Fixture { dir, config };
    for step in ["generate", "build", "learn", "select"] {
        fixture.run(&[step]);
    }
    if with_benchmark {
        fixture.run(&["benchmark"]);
    }
    fixture
}

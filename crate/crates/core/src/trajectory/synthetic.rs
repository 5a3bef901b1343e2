//! Seeded synthetic career corpora.
//!
//! Jobs are ranked by a latent level. Every non-terminal job gets a small,
//! heavy-tailed set of candidate successors drawn mostly from the next few
//! ranks up, with occasional lateral or backward moves. People enter at
//! low-level jobs and walk the candidate lists, choosing successors in
//! proportion to a log-normal attractiveness. The top ranks have no
//! successors, which gives the observed graph its zero out-degree jobs.

use std::collections::HashSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Pareto, Poisson};
use serde::{Deserialize, Serialize};

use super::{CareerTrajectory, CompanySize, DateStamp, JobKey, WorkStint};
use crate::error::{Error, Result};

const INDUSTRIES: [&str; 10] = [
    "Banking",
    "Telecommunications",
    "Semiconductors",
    "IT & Services",
    "Financial Services",
    "Healthcare",
    "Education",
    "Logistics",
    "Retail",
    "Government",
];

const ROLES: [&str; 12] = [
    "engineer",
    "analyst",
    "consultant",
    "designer",
    "accountant",
    "sales executive",
    "product manager",
    "data scientist",
    "marketing executive",
    "operations officer",
    "researcher",
    "project manager",
];

const TIERS: [&str; 8] = [
    "intern",
    "junior",
    "associate",
    "senior",
    "lead",
    "head of",
    "director",
    "managing director",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub jobs: usize,
    pub persons: usize,
    pub mean_len: f64,
    /// Number of seniority tiers the latent level spans.
    pub levels: usize,
    pub date_min: DateStamp,
    pub date_max: DateStamp,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            jobs: 200,
            persons: 5000,
            mean_len: 4.0,
            levels: 6,
            date_min: DateStamp::new(1980, 1).expect("valid date"),
            date_max: DateStamp::new(2016, 11).expect("valid date"),
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.jobs < 2 {
            return Err(Error::InvalidConfig(format!(
                "jobs must be >= 2, got {}",
                self.jobs
            )));
        }
        if self.persons < 1 {
            return Err(Error::InvalidConfig("persons must be >= 1".into()));
        }
        if self.date_max <= self.date_min {
            return Err(Error::InvalidConfig(format!(
                "empty date range {}..{}",
                self.date_min, self.date_max
            )));
        }
        if !(self.mean_len.is_finite() && self.mean_len >= 2.0) {
            return Err(Error::InvalidConfig(format!(
                "mean_len must be >= 2, got {}",
                self.mean_len
            )));
        }
        if !(2..=TIERS.len()).contains(&self.levels) {
            return Err(Error::InvalidConfig(format!(
                "levels must be in 2..={}, got {}",
                TIERS.len(),
                self.levels
            )));
        }
        Ok(())
    }
}

/// Ground truth behind one generated job.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticJob {
    pub key: JobKey,
    pub latent_level: f64,
    pub attractiveness: f64,
    pub tenure_months: f64,
    /// Indices into [`SyntheticCorpus::jobs`].
    pub successors: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticCorpus {
    /// Ordered by latent level, lowest first.
    pub jobs: Vec<SyntheticJob>,
    pub trajectories: Vec<CareerTrajectory>,
}

pub fn generate_synthetic(config: &GeneratorConfig, seed: u64) -> Result<SyntheticCorpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jobs = make_jobs(config, &mut rng);

    let entry_count = ((jobs.len() as f64 * 0.3).ceil() as usize).clamp(1, jobs.len() - 1);
    let entry_weights: Vec<f64> = jobs[..entry_count]
        .iter()
        .map(|j| j.attractiveness)
        .collect();
    let entry_dist = WeightedIndex::new(&entry_weights).expect("positive attractiveness");
    let successor_dists: Vec<Option<WeightedIndex<f64>>> = jobs
        .iter()
        .map(|job| {
            if job.successors.is_empty() {
                None
            } else {
                let w: Vec<f64> = job
                    .successors
                    .iter()
                    .map(|&s| jobs[s].attractiveness)
                    .collect();
                Some(WeightedIndex::new(&w).expect("positive attractiveness"))
            }
        })
        .collect();

    let extra_len = Poisson::new(config.mean_len - 2.0).ok();
    let span = config.date_max.months_since(config.date_min);
    let mut trajectories = Vec::with_capacity(config.persons);

    for person in 0..config.persons {
        let graduation = config
            .date_min
            .add_months(rng.random_range(0..=span * 3 / 4));
        let target_len = 2 + extra_len.map_or(0, |p| p.sample(&mut rng) as usize);

        let mut stints = Vec::with_capacity(target_len);
        let mut current = entry_dist.sample(&mut rng);
        let mut start = graduation.add_months(rng.random_range(0..=6));
        while start <= config.date_max {
            let job = &jobs[current];
            let stretch: f64 = rng.random_range(0.5..1.5);
            let months = (job.tenure_months * stretch).round().max(1.0) as i64;
            let end = start.add_months(months).min(config.date_max);
            stints.push(WorkStint {
                job: job.key.clone(),
                start,
                end,
            });
            if stints.len() >= target_len || end >= config.date_max {
                break;
            }
            let Some(dist) = &successor_dists[current] else {
                break;
            };
            current = job.successors[dist.sample(&mut rng)];
            start = end.add_months(rng.random_range(0..=3));
        }
        trajectories.push(CareerTrajectory::new(
            format!("p{person:06}"),
            Some(graduation),
            stints,
        ));
    }

    Ok(SyntheticCorpus { jobs, trajectories })
}

const SINK_SHARE: f64 = 0.12;

fn make_jobs(config: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Vec<SyntheticJob> {
    let n = config.jobs;
    let top_level = (config.levels - 1) as f64;
    let attractiveness = LogNormal::new(0.0, 1.0).expect("valid lognormal");
    let fanout = Pareto::new(1.0, 1.2).expect("valid pareto");

    let mut seen = HashSet::new();
    let mut jobs = Vec::with_capacity(n);
    for rank in 0..n {
        let latent_level = top_level * rank as f64 / (n - 1) as f64;
        let tier = TIERS[(latent_level.floor() as usize).min(config.levels - 1)];
        let mut key = None;
        for _ in 0..20 {
            let candidate = random_key(rng, tier);
            if seen.insert(candidate.clone()) {
                key = Some(candidate);
                break;
            }
        }
        let key = key.unwrap_or_else(|| {
            let base = random_key(rng, tier);
            let k = JobKey::new(
                base.industry(),
                base.company_size(),
                &format!("{} {rank}", base.title()),
            )
            .expect("non-empty fields");
            seen.insert(k.clone());
            k
        });
        jobs.push(SyntheticJob {
            key,
            latent_level,
            attractiveness: attractiveness.sample(rng),
            tenure_months: rng.random_range(12.0..60.0),
            successors: Vec::new(),
        });
    }

    let sinks = ((n as f64 * SINK_SHARE).ceil() as usize).clamp(1, n - 1);
    let window = (n / 8).max(2);
    let max_fanout = (n / 5).max(1);
    for (rank, job) in jobs.iter_mut().enumerate().take(n - sinks) {
        let draw: f64 = fanout.sample(rng);
        let k = (draw.floor() as usize).clamp(1, max_fanout);
        let mut successors = Vec::with_capacity(k);
        for _ in 0..k {
            let next = if rng.random_bool(0.85) {
                rng.random_range(rank + 1..=(rank + window).min(n - 1))
            } else {
                rng.random_range(rank + 1..n)
            };
            if !successors.contains(&next) {
                successors.push(next);
            }
        }
        job.successors = successors;
    }
    jobs
}

fn random_key(rng: &mut ChaCha8Rng, tier: &str) -> JobKey {
    let industry = INDUSTRIES[rng.random_range(0..INDUSTRIES.len())];
    let size = CompanySize::ALL[rng.random_range(0..CompanySize::ALL.len())];
    let role = ROLES[rng.random_range(0..ROLES.len())];
    JobKey::new(industry, size, &format!("{tier} {role}")).expect("non-empty fields")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{clean, to_jsonl_string};

    #[test]
    fn deterministic_per_seed() {
        let cfg = GeneratorConfig {
            persons: 300,
            ..GeneratorConfig::default()
        };
        let a = generate_synthetic(&cfg, 7).unwrap();
        let b = generate_synthetic(&cfg, 7).unwrap();
        assert_eq!(
            to_jsonl_string(&a.trajectories),
            to_jsonl_string(&b.trajectories)
        );
        let c = generate_synthetic(&cfg, 8).unwrap();
        assert_ne!(
            to_jsonl_string(&a.trajectories),
            to_jsonl_string(&c.trajectories)
        );
    }

    #[test]
    fn two_jobs_one_person() {
        let cfg = GeneratorConfig {
            jobs: 2,
            persons: 1,
            mean_len: 2.0,
            ..GeneratorConfig::default()
        };
        let corpus = generate_synthetic(&cfg, 1).unwrap();
        assert_eq!(corpus.trajectories.len(), 1);
        let stints = corpus.trajectories[0].stints();
        assert_eq!(stints.len(), 2);
        assert_eq!(stints[0].job, corpus.jobs[0].key);
        assert_eq!(stints[1].job, corpus.jobs[1].key);
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = GeneratorConfig::default();
        for cfg in [
            GeneratorConfig {
                jobs: 1,
                ..base.clone()
            },
            GeneratorConfig {
                persons: 0,
                ..base.clone()
            },
            GeneratorConfig {
                date_max: base.date_min,
                ..base.clone()
            },
            GeneratorConfig {
                mean_len: 1.0,
                ..base.clone()
            },
        ] {
            assert!(matches!(
                generate_synthetic(&cfg, 0),
                Err(Error::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn output_satisfies_trajectory_invariants() {
        let cfg = GeneratorConfig {
            persons: 500,
            ..GeneratorConfig::default()
        };
        let corpus = generate_synthetic(&cfg, 42).unwrap();
        for t in &corpus.trajectories {
            let grad = t.graduation.unwrap();
            for pair in t.stints().windows(2) {
                assert!(pair[0].start <= pair[1].start);
                assert!(pair[0].end <= pair[1].start);
            }
            for s in t.stints() {
                assert!(s.end >= s.start);
                assert!(s.start >= grad);
            }
        }
        let cleaned = clean(&corpus.trajectories, 1, true);
        let long: Vec<_> = corpus
            .trajectories
            .iter()
            .filter(|t| t.stints().len() >= 2)
            .cloned()
            .collect();
        assert_eq!(cleaned, long);
    }
}

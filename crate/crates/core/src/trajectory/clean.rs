use std::collections::{HashMap, HashSet};

use super::{CareerTrajectory, JobKey};

/// Cleans a raw corpus.
///
/// Drops trajectories without a graduation date when `require_graduation` is
/// set, removes stints that start before graduation, removes stints whose job
/// is held by fewer than `min_support` distinct persons, and drops
/// trajectories left with fewer than two stints. Support filtering is repeated
/// until nothing changes, so the result is a fixed point of `clean`.
pub fn clean(
    trajectories: &[CareerTrajectory],
    min_support: usize,
    require_graduation: bool,
) -> Vec<CareerTrajectory> {
    let min_support = min_support.max(1);

    let mut kept: Vec<CareerTrajectory> = trajectories
        .iter()
        .filter(|t| !require_graduation || t.graduation.is_some())
        .cloned()
        .map(|mut t| {
            if let Some(grad) = t.graduation {
                t.retain_stints(|s| s.start >= grad);
            }
            t
        })
        .collect();

    loop {
        let support = job_support(&kept);
        let before: usize = kept.iter().map(|t| t.stints().len()).sum::<usize>() + kept.len();
        for t in &mut kept {
            t.retain_stints(|s| support.get(&s.job).copied().unwrap_or(0) >= min_support);
        }
        kept.retain(|t| t.stints().len() >= 2);
        let after: usize = kept.iter().map(|t| t.stints().len()).sum::<usize>() + kept.len();
        if after == before {
            return kept;
        }
    }
}

/// Number of distinct persons holding each job.
fn job_support(trajectories: &[CareerTrajectory]) -> HashMap<JobKey, usize> {
    let mut holders: HashMap<&JobKey, HashSet<&str>> = HashMap::new();
    for t in trajectories {
        for s in t.stints() {
            holders
                .entry(&s.job)
                .or_default()
                .insert(t.person_id.as_str());
        }
    }
    holders
        .into_iter()
        .map(|(job, people)| (job.clone(), people.len()))
        .collect()
}

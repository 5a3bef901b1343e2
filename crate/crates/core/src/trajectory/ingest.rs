use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{CareerTrajectory, CompanySize, DateStamp, JobKey, WorkStint};
use crate::error::{Error, Result};

/// What to do with a record that parses as JSON but violates the schema.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IngestPolicy {
    /// Fail on the first violation.
    #[default]
    Strict,
    /// Drop the record and keep a warning.
    Skip,
}

#[derive(Debug, Default)]
pub struct Ingested {
    pub trajectories: Vec<CareerTrajectory>,
    /// Schema violations dropped under [`IngestPolicy::Skip`].
    pub rejected: Vec<Error>,
}

#[derive(Serialize, Deserialize)]
struct StintRecord {
    industry: String,
    company_size: String,
    title: String,
    start: String,
    end: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GraduationField {
    One(String),
    Many(Vec<String>),
}

#[derive(Deserialize)]
struct TrajectoryRecord {
    person_id: String,
    #[serde(default)]
    graduation: Option<GraduationField>,
    stints: Vec<StintRecord>,
}

#[derive(Serialize)]
struct TrajectoryOut<'a> {
    person_id: &'a str,
    graduation: Option<String>,
    stints: Vec<StintRecord>,
}

pub fn read_jsonl(path: impl AsRef<Path>, policy: IngestPolicy) -> Result<Ingested> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_jsonl(&text, policy)
}

/// Parses trajectory JSONL. Blank lines are ignored. Malformed JSON is always
/// an error; schema violations follow `policy`.
pub fn parse_jsonl(text: &str, policy: IngestPolicy) -> Result<Ingested> {
    let mut out = Ingested::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        match record_from_value(value, line_no) {
            Ok(traj) => out.trajectories.push(traj),
            Err(err) => match policy {
                IngestPolicy::Strict => return Err(err),
                IngestPolicy::Skip => out.rejected.push(err),
            },
        }
    }
    Ok(out)
}

fn record_from_value(value: Value, line: usize) -> Result<CareerTrajectory> {
    let person_id = value
        .get("person_id")
        .and_then(Value::as_str)
        .map(str::to_string);
    let violation = |message: String| Error::Schema {
        line,
        person_id: person_id.clone(),
        message,
    };

    let record: TrajectoryRecord =
        serde_json::from_value(value).map_err(|e| violation(e.to_string()))?;

    // Multiple education end dates reduce to the latest one.
    let graduation = match record.graduation {
        None => None,
        Some(GraduationField::One(raw)) => Some(
            raw.parse::<DateStamp>()
                .map_err(|e| violation(e.to_string()))?,
        ),
        Some(GraduationField::Many(raws)) => {
            let mut latest = None;
            for raw in raws {
                let date = raw
                    .parse::<DateStamp>()
                    .map_err(|e| violation(e.to_string()))?;
                latest = latest.max(Some(date));
            }
            latest
        }
    };

    let mut stints = Vec::with_capacity(record.stints.len());
    for s in record.stints {
        let size: CompanySize = s
            .company_size
            .parse()
            .map_err(|e: Error| violation(e.to_string()))?;
        let job = JobKey::new(&s.industry, size, &s.title).map_err(|e| violation(e.to_string()))?;
        let start: DateStamp = s
            .start
            .parse()
            .map_err(|e: Error| violation(e.to_string()))?;
        let end: DateStamp = s.end.parse().map_err(|e: Error| violation(e.to_string()))?;
        stints.push(WorkStint::new(job, start, end).map_err(|e| violation(e.to_string()))?);
    }
    Ok(CareerTrajectory::new(record.person_id, graduation, stints))
}

/// One JSON object per line, newline-terminated.
pub fn to_jsonl_string(trajectories: &[CareerTrajectory]) -> String {
    let mut out = String::new();
    for traj in trajectories {
        let record = TrajectoryOut {
            person_id: &traj.person_id,
            graduation: traj.graduation.map(|g| g.to_string()),
            stints: traj
                .stints()
                .iter()
                .map(|s| StintRecord {
                    industry: s.job.industry().to_string(),
                    company_size: s.job.company_size().label().to_string(),
                    title: s.job.title().to_string(),
                    start: s.start.to_string(),
                    end: s.end.to_string(),
                })
                .collect(),
        };
        out.push_str(&serde_json::to_string(&record).expect("trajectory record serializes"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl(path: impl AsRef<Path>, trajectories: &[CareerTrajectory]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_jsonl_string(trajectories)).map_err(|e| Error::io(path, e))
}

//! Career trajectory records: dates, job identities, stints and persons.
//!
//! Everything is kept at month granularity. A [`JobKey`] is the Markov state
//! used by the transition graph: an industry, a company-size category and a
//! normalized title.

mod clean;
mod ingest;
mod synthetic;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use clean::clean;
pub use ingest::{parse_jsonl, read_jsonl, to_jsonl_string, write_jsonl, IngestPolicy, Ingested};
pub use synthetic::{generate_synthetic, GeneratorConfig, SyntheticCorpus, SyntheticJob};

/// A calendar month.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DateStamp {
    year: i32,
    month: u8,
}

impl DateStamp {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidDate(format!("{year}-{month}")));
        }
        Ok(Self {
            year,
            month: month as u8,
        })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        u32::from(self.month)
    }

    fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    fn from_ordinal(ordinal: i64) -> Self {
        Self {
            year: ordinal.div_euclid(12) as i32,
            month: (ordinal.rem_euclid(12) + 1) as u8,
        }
    }

    /// Whole months from `earlier` to `self` (negative if `self` is earlier).
    pub fn months_since(self, earlier: DateStamp) -> i64 {
        self.ordinal() - earlier.ordinal()
    }

    pub fn add_months(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }
}

impl fmt::Display for DateStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for DateStamp {
    type Err = Error;

    /// Accepts `YYYY-MM`; a trailing `-DD` day is accepted and discarded.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDate(s.to_string());
        let mut parts = s.trim().split('-');
        let year: i32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let month: u32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if let Some(day) = parts.next() {
            let day: u32 = day.parse().map_err(|_| bad())?;
            if !(1..=31).contains(&day) {
                return Err(bad());
            }
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        DateStamp::new(year, month).map_err(|_| bad())
    }
}

impl Serialize for DateStamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DateStamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// The seven ordinal company-size categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompanySize {
    Micro,
    Small,
    Medium,
    Large,
    VeryLarge,
    Huge,
    Enterprise,
}

impl CompanySize {
    pub const ALL: [CompanySize; 7] = [
        CompanySize::Micro,
        CompanySize::Small,
        CompanySize::Medium,
        CompanySize::Large,
        CompanySize::VeryLarge,
        CompanySize::Huge,
        CompanySize::Enterprise,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CompanySize::Micro => "[2-10]",
            CompanySize::Small => "[11-50]",
            CompanySize::Medium => "[51-200]",
            CompanySize::Large => "[201-1000]",
            CompanySize::VeryLarge => "[1001-5000]",
            CompanySize::Huge => "[5001-10000]",
            CompanySize::Enterprise => "[10001+]",
        }
    }
}

impl fmt::Display for CompanySize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CompanySize {
    type Err = Error;

    /// Accepts the bracketed label or the bare range (`"51-200"`), ignoring
    /// whitespace and thousands separators.
    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && !matches!(c, '[' | ']' | ','))
            .collect();
        CompanySize::ALL
            .into_iter()
            .find(|size| size.label().trim_matches(|c| c == '[' || c == ']') == cleaned)
            .ok_or_else(|| Error::InvalidCompanySize(s.to_string()))
    }
}

/// Identity of a job: industry, company-size category and normalized title.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JobKey {
    industry: String,
    company_size: CompanySize,
    title: String,
}

impl JobKey {
    pub fn new(industry: &str, company_size: CompanySize, title: &str) -> Result<Self> {
        let industry = industry.trim();
        let title = normalize_title(title);
        if industry.is_empty() {
            return Err(Error::InvalidJob("empty industry".into()));
        }
        if title.is_empty() {
            return Err(Error::InvalidJob("empty title".into()));
        }
        Ok(Self {
            industry: industry.to_string(),
            company_size,
            title,
        })
    }

    pub fn industry(&self) -> &str {
        &self.industry
    }

    pub fn company_size(&self) -> CompanySize {
        self.company_size
    }

    pub fn title(&self) -> &str {
        &self.title
    }
}

impl fmt::Display for JobKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            self.industry, self.company_size, self.title
        )
    }
}

/// Lowercases and collapses runs of whitespace to a single space.
pub fn normalize_title(raw: &str) -> String {
    raw.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkStint {
    pub job: JobKey,
    pub start: DateStamp,
    pub end: DateStamp,
}

impl WorkStint {
    pub fn new(job: JobKey, start: DateStamp, end: DateStamp) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidParameter(format!(
                "stint {job} ends ({end}) before it starts ({start})"
            )));
        }
        Ok(Self { job, start, end })
    }

    pub fn duration_months(&self) -> i64 {
        self.end.months_since(self.start)
    }
}

/// One person's chronological job history.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CareerTrajectory {
    pub person_id: String,
    pub graduation: Option<DateStamp>,
    stints: Vec<WorkStint>,
}

impl CareerTrajectory {
    /// Sorts stints by start date and repairs overlaps by truncating the
    /// earlier stint's end to the later stint's start.
    pub fn new(
        person_id: impl Into<String>,
        graduation: Option<DateStamp>,
        mut stints: Vec<WorkStint>,
    ) -> Self {
        stints.sort_by(|a, b| a.start.cmp(&b.start).then(a.end.cmp(&b.end)));
        for k in 1..stints.len() {
            let next_start = stints[k].start;
            if stints[k - 1].end > next_start {
                stints[k - 1].end = next_start;
            }
        }
        Self {
            person_id: person_id.into(),
            graduation,
            stints,
        }
    }

    pub fn stints(&self) -> &[WorkStint] {
        &self.stints
    }

    pub(crate) fn retain_stints(&mut self, keep: impl FnMut(&WorkStint) -> bool) {
        self.stints.retain(keep);
    }

    /// Stints with consecutive repeats of the same job merged into one stint
    /// spanning both periods.
    pub fn merged_stints(&self) -> Vec<WorkStint> {
        let mut merged: Vec<WorkStint> = Vec::with_capacity(self.stints.len());
        for stint in &self.stints {
            match merged.last_mut() {
                Some(last) if last.job == stint.job => {
                    last.end = last.end.max(stint.end);
                }
                _ => merged.push(stint.clone()),
            }
        }
        merged
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> DateStamp {
        s.parse().unwrap()
    }

    #[test]
    fn date_parsing_and_month_arithmetic() {
        assert_eq!(d("2016-11"), DateStamp::new(2016, 11).unwrap());
        assert_eq!(d("2016-11-23"), d("2016-11"));
        assert_eq!(d("2017-02").months_since(d("2015-12")), 14);
        assert_eq!(d("2015-12").add_months(14), d("2017-02"));
        assert_eq!(d("2015-01").add_months(-1), d("2014-12"));
        assert!("2016-13".parse::<DateStamp>().is_err());
        assert!("2016".parse::<DateStamp>().is_err());
        assert!("abc-01".parse::<DateStamp>().is_err());
        assert_eq!(d("2003-04").to_string(), "2003-04");
    }

    #[test]
    fn company_size_labels() {
        for size in CompanySize::ALL {
            assert_eq!(size.label().parse::<CompanySize>().unwrap(), size);
        }
        assert_eq!(
            "10,001+".parse::<CompanySize>().unwrap(),
            CompanySize::Enterprise
        );
        assert_eq!(
            "51-200".parse::<CompanySize>().unwrap(),
            CompanySize::Medium
        );
        assert!("1-50".parse::<CompanySize>().is_err());
    }

    #[test]
    fn job_key_normalizes_title() {
        let key = JobKey::new(" Banking ", CompanySize::Huge, "  Vice   PRESIDENT ").unwrap();
        assert_eq!(key.title(), "vice president");
        assert_eq!(key.industry(), "Banking");
        assert!(JobKey::new("", CompanySize::Huge, "x").is_err());
        assert!(JobKey::new("x", CompanySize::Huge, "   ").is_err());
    }

    #[test]
    fn overlapping_stints_are_truncated() {
        let a = JobKey::new("it", CompanySize::Small, "a").unwrap();
        let b = JobKey::new("it", CompanySize::Small, "b").unwrap();
        let t = CareerTrajectory::new(
            "p",
            None,
            vec![
                WorkStint::new(b.clone(), d("2012-01"), d("2013-01")).unwrap(),
                WorkStint::new(a.clone(), d("2010-01"), d("2012-06")).unwrap(),
            ],
        );
        assert_eq!(t.stints()[0].job, a);
        assert_eq!(t.stints()[0].end, d("2012-01"));
        assert_eq!(t.stints()[1].job, b);
    }

    #[test]
    fn repeated_jobs_merge() {
        let a = JobKey::new("it", CompanySize::Small, "a").unwrap();
        let b = JobKey::new("it", CompanySize::Small, "b").unwrap();
        let t = CareerTrajectory::new(
            "p",
            None,
            vec![
                WorkStint::new(a.clone(), d("2010-01"), d("2011-01")).unwrap(),
                WorkStint::new(a.clone(), d("2011-02"), d("2012-01")).unwrap(),
                WorkStint::new(b, d("2012-01"), d("2013-01")).unwrap(),
            ],
        );
        let merged = t.merged_stints();
        assert_eq!(merged.len(), 2);
        assert_eq!(merged[0].start, d("2010-01"));
        assert_eq!(merged[0].end, d("2012-01"));
    }
}

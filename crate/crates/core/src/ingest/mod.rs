//! Monthly growth series from exported version-control history.
//!
//! The accepted format is produced from any git clone by
//!
//! ```text
//! git log --reverse --find-renames --format='commit %H %aI' --name-status
//! ```
//!
//! Each record starts with `commit <hash> <ISO-8601 author date>`. Lines
//! `A\t<path>` list added files; other status lines are ignored; blank lines
//! separate records. Renames appear as `R` lines and are not additions.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use chrono::{DateTime, Datelike};
use globset::{GlobBuilder, GlobMatcher};
use serde::{Deserialize, Serialize};

use crate::growth::GrowthSeries;

/// Default pattern for new-file counts: every `.lean` file under `Mathlib/`.
pub const DEFAULT_GLOB: &str = "Mathlib/**/*.lean";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Option<YearMonth> {
        (1..=12).contains(&month).then_some(YearMonth { year, month })
    }

    pub fn succ(self) -> YearMonth {
        if self.month == 12 {
            YearMonth { year: self.year + 1, month: 1 }
        } else {
            YearMonth { year: self.year, month: self.month + 1 }
        }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (y, m) = s.split_once('-').ok_or_else(|| format!("expected YYYY-MM, got `{s}`"))?;
        let year = y.parse().map_err(|_| format!("bad year in `{s}`"))?;
        let month = m.parse().map_err(|_| format!("bad month in `{s}`"))?;
        YearMonth::new(year, month).ok_or_else(|| format!("month out of range in `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommitRecord {
    pub hash: String,
    pub month: YearMonth,
    pub added_paths: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: duplicate commit hash {hash}")]
    DuplicateHash { line: usize, hash: String },
    #[error("invalid glob: {0}")]
    Glob(#[from] globset::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_commit_line(rest: &str, line: usize) -> Result<(String, YearMonth), IngestError> {
    let err = |message: String| IngestError::Parse { line, message };
    let mut parts = rest.split_whitespace();
    let (Some(hash), Some(date), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(err(format!("expected `commit <hash> <date>`, got `commit {rest}`")));
    };
    let date = DateTime::parse_from_rfc3339(date).map_err(|e| err(format!("bad date `{date}`: {e}")))?;
    // the date's own calendar fields, not UTC
    Ok((hash.to_string(), YearMonth { year: date.year(), month: date.month() }))
}

pub fn parse_log<R: BufRead>(reader: R) -> Result<Vec<CommitRecord>, IngestError> {
    let mut out: Vec<CommitRecord> = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let no = i + 1;
        let trimmed = line.trim_end_matches('\r');
        if trimmed.trim().is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("commit ") {
            let (hash, month) = parse_commit_line(rest, no)?;
            if !seen.insert(hash.clone()) {
                return Err(IngestError::DuplicateHash { line: no, hash });
            }
            out.push(CommitRecord { hash, month, added_paths: Vec::new() });
        } else if let Some((status, path)) = trimmed.split_once('\t') {
            let Some(rec) = out.last_mut() else {
                return Err(IngestError::Parse { line: no, message: "status line before any commit".into() });
            };
            if status == "A" {
                rec.added_paths.push(path.to_string());
            }
        } else {
            return Err(IngestError::Parse { line: no, message: format!("unrecognized line `{trimmed}`") });
        }
    }
    Ok(out)
}

/// Writes records in the accepted format, dating each commit at the start of its month.
pub fn write_log<W: Write>(records: &[CommitRecord], mut w: W) -> std::io::Result<()> {
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        writeln!(w, "commit {} {}-01T00:00:00+00:00", r.hash, r.month)?;
        for p in &r.added_paths {
            writeln!(w, "A\t{p}")?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    Commits,
    NewFiles,
}

impl FromStr for CountMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "commits" => Ok(CountMode::Commits),
            "new_files" | "new-files" => Ok(CountMode::NewFiles),
            _ => Err(format!("unknown mode `{s}` (expected commits or new_files)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonthlySeries {
    pub months: Vec<YearMonth>,
    pub increments: Vec<u64>,
    pub cumulative: Vec<u64>,
}

impl MonthlySeries {
    pub fn len(&self) -> usize {
        self.months.len()
    }

    pub fn is_empty(&self) -> bool {
        self.months.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    /// Month index `t = 1, 2, ...` against cumulative counts.
    pub fn growth_series(&self) -> GrowthSeries {
        GrowthSeries::from_counts(self.cumulative.iter().map(|&c| c as f64)).expect("counts are valid")
    }

    /// `t,n,month,increment`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,n,month,increment")?;
        for (i, ((m, inc), c)) in self.months.iter().zip(&self.increments).zip(&self.cumulative).enumerate() {
            writeln!(w, "{},{c},{m},{inc}", i + 1)?;
        }
        Ok(())
    }
}

/// Per-month counts over the contiguous span of observed months.
///
/// `glob` applies in [`CountMode::NewFiles`]; `*` stays within a path segment.
pub fn monthly_series(records: &[CommitRecord], mode: CountMode, glob: Option<&str>) -> Result<MonthlySeries, IngestError> {
    // literal_separator so `*` does not cross `/`
    let matcher: Option<GlobMatcher> = match glob {
        Some(g) => Some(GlobBuilder::new(g).literal_separator(true).build()?.compile_matcher()),
        None => None,
    };
    let mut per_month: BTreeMap<YearMonth, u64> = BTreeMap::new();
    for r in records {
        let inc = match mode {
            CountMode::Commits => 1,
            CountMode::NewFiles => {
                r.added_paths.iter().filter(|p| matcher.as_ref().map_or(true, |m| m.is_match(p))).count() as u64
            }
        };
        *per_month.entry(r.month).or_default() += inc;
    }
    let (Some(&first), Some(&last)) = (per_month.keys().next(), per_month.keys().next_back()) else {
        return Ok(MonthlySeries { months: vec![], increments: vec![], cumulative: vec![] });
    };
    let mut months = Vec::new();
    let mut m = first;
    loop {
        months.push(m);
        if m == last {
            break;
        }
        m = m.succ();
    }
    let increments: Vec<u64> = months.iter().map(|m| per_month.get(m).copied().unwrap_or(0)).collect();
    let cumulative = increments
        .iter()
        .scan(0u64, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    Ok(MonthlySeries { months, increments, cumulative })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ym(s: &str) -> YearMonth {
        s.parse().unwrap()
    }

    #[test]
    fn empty_stream() {
        assert!(parse_log("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn single_record() {
        let log = "commit abc 2021-05-03T10:00:00+00:00\nA\tMathlib/Algebra/Basic.lean\n";
        let r = parse_log(log.as_bytes()).unwrap();
        assert_eq!(r, vec![CommitRecord {
            hash: "abc".into(),
            month: ym("2021-05"),
            added_paths: vec!["Mathlib/Algebra/Basic.lean".into()]
        }]);
    }

    #[test]
    fn modifications_are_ignored() {
        let log = "commit abc 2021-05-03T10:00:00+00:00\n\nM\tREADME.md\nD\told.lean\n";
        assert!(parse_log(log.as_bytes()).unwrap()[0].added_paths.is_empty());
    }

    #[test]
    fn month_uses_local_calendar_fields() {
        let log = "commit abc 2021-05-31T23:30:00-05:00\n";
        assert_eq!(parse_log(log.as_bytes()).unwrap()[0].month, ym("2021-05"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad_date = "commit a 2021-05-03T10:00:00+00:00\n\ncommit b 2021-13-01\n";
        assert!(matches!(parse_log(bad_date.as_bytes()), Err(IngestError::Parse { line: 3, .. })));
        assert!(matches!(parse_log("commit x\n".as_bytes()), Err(IngestError::Parse { line: 1, .. })));
        let dup = "commit a 2021-05-03T10:00:00+00:00\ncommit a 2021-05-04T10:00:00+00:00\n";
        assert!(matches!(parse_log(dup.as_bytes()), Err(IngestError::DuplicateHash { line: 2, .. })));
    }

    fn rec(hash: &str, month: &str, paths: &[&str]) -> CommitRecord {
        CommitRecord { hash: hash.into(), month: ym(month), added_paths: paths.iter().map(|p| p.to_string()).collect() }
    }

    #[test]
    fn gap_months_are_filled() {
        let recs = [
            rec("a", "2021-05", &[]),
            rec("b", "2021-05", &[]),
            rec("c", "2021-05", &[]),
            rec("d", "2021-07", &[]),
            rec("e", "2021-07", &[]),
        ];
        let s = monthly_series(&recs, CountMode::Commits, None).unwrap();
        assert_eq!(s.months, vec![ym("2021-05"), ym("2021-06"), ym("2021-07")]);
        assert_eq!(s.increments, vec![3, 0, 2]);
        assert_eq!(s.cumulative, vec![3, 3, 5]);
    }

    #[test]
    fn glob_segments() {
        let recs = [rec("a", "2021-12", &["Mathlib/A.lean", "Mathlib/X/B.lean", "Other/C.lean", "Mathlib/D.md"])];
        let deep = monthly_series(&recs, CountMode::NewFiles, Some(DEFAULT_GLOB)).unwrap();
        assert_eq!(deep.increments, vec![2]);
        let flat = monthly_series(&recs, CountMode::NewFiles, Some("Mathlib/*.lean")).unwrap();
        assert_eq!(flat.increments, vec![1]);
        let none = monthly_series(&recs, CountMode::NewFiles, Some("nothing/**")).unwrap();
        assert_eq!(none.increments, vec![0]);
    }

    #[test]
    fn year_boundary() {
        let recs = [rec("a", "2021-11", &[]), rec("b", "2022-02", &[])];
        let s = monthly_series(&recs, CountMode::Commits, None).unwrap();
        assert_eq!(s.months.iter().map(ToString::to_string).collect::<Vec<_>>(), [
            "2021-11", "2021-12", "2022-01", "2022-02"
        ]);
    }

    #[test]
    fn printer_round_trip() {
        let recs = vec![rec("a", "2021-11", &["x/y.lean"]), rec("b", "2022-02", &[]), rec("c", "2022-02", &["p", "q"])];
        let mut buf = Vec::new();
        write_log(&recs, &mut buf).unwrap();
        assert_eq!(parse_log(buf.as_slice()).unwrap(), recs);
    }
}

use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::{PlanError, SweepPlan};
use crate::discovery::{run, write_rules, ArchConfig, Trajectory};
use crate::term::Substrate;

/// A config that failed; kept in the trajectory file so sweeps stay auditable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEntry {
    pub key: String,
    pub error: String,
    pub config: ArchConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepRecord {
    Error(ErrorEntry),
    Trajectory(Trajectory),
}

impl SweepRecord {
    pub fn key(&self) -> String {
        match self {
            SweepRecord::Error(e) => e.key.clone(),
            SweepRecord::Trajectory(t) => t.config.key(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Record { path: PathBuf, line: usize, message: String },
    #[error(transparent)]
    Plan(#[from] PlanError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub planned: usize,
    pub skipped: usize,
    pub completed: usize,
    pub failed: usize,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SweepError + '_ {
    move |source| SweepError::Io { path: path.to_path_buf(), source }
}

/// Reads every record; a trailing partial line left by an interrupted write is ignored.
pub fn read_records(path: &Path) -> Result<Vec<SweepRecord>, SweepError> {
    let file = File::open(path).map_err(io_err(path))?;
    parse_records(BufReader::new(file), path).map(|(r, _)| r)
}

/// Records plus the byte length of the complete-line prefix.
fn parse_records<R: BufRead>(mut reader: R, path: &Path) -> Result<(Vec<SweepRecord>, u64), SweepError> {
    let mut out = Vec::new();
    let mut good = 0u64;
    let mut buf = String::new();
    let mut line = 0;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf).map_err(io_err(path))?;
        if n == 0 {
            break;
        }
        line += 1;
        if !buf.ends_with('\n') {
            break;
        }
        let text = buf.trim();
        if !text.is_empty() {
            let rec = serde_json::from_str(text).map_err(|e| SweepError::Record {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            })?;
            out.push(rec);
        }
        good += n as u64;
    }
    Ok((out, good))
}

/// File name for a config's rule dump: the key with `/` replaced by `_`.
pub fn rules_file_name(config: &ArchConfig) -> String {
    format!("{}.rules", config.key().replace('/', "_"))
}

fn execute(config: &ArchConfig, rules_dir: Option<&Path>) -> SweepRecord {
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
        config.validate(true).map_err(|e| e.to_string())?;
        let result = run(&Substrate::new(config.domain), config);
        if let Some(dir) = rules_dir {
            let path = dir.join(rules_file_name(config));
            let mut buf = Vec::new();
            write_rules(&result.rules, &mut buf).map_err(|e| e.to_string())?;
            fs::write(&path, buf).map_err(|e| format!("{}: {e}", path.display()))?;
        }
        Ok::<_, String>(result.trajectory)
    }));
    let error = match outcome {
        Ok(Ok(t)) => return SweepRecord::Trajectory(t),
        Ok(Err(e)) => e,
        Err(p) => p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into()),
    };
    SweepRecord::Error(ErrorEntry { key: config.key(), error, config: config.clone() })
}

/// Runs every config of `plan` whose key is not yet in `out`, appending one
/// JSON line per config as it finishes.
pub fn run_sweep(
    plan: &SweepPlan,
    out: &Path,
    rules_dir: Option<&Path>,
    progress: Option<&(dyn Fn(usize, usize) + Sync)>,
) -> Result<SweepSummary, SweepError> {
    let configs = plan.configs()?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    if let Some(dir) = rules_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let mut file = OpenOptions::new().read(true).write(true).create(true).truncate(false).open(out).map_err(io_err(out))?;
    let mut existing = String::new();
    file.read_to_string(&mut existing).map_err(io_err(out))?;
    let (records, good) = parse_records(existing.as_bytes(), out)?;
    // drop a torn final line before appending
    file.set_len(good).map_err(io_err(out))?;
    file.seek(SeekFrom::End(0)).map_err(io_err(out))?;

    let done: HashSet<String> = records.iter().map(SweepRecord::key).collect();
    let pending: Vec<&ArchConfig> = configs.iter().filter(|c| !done.contains(&c.key())).collect();
    let mut summary = SweepSummary { planned: configs.len(), skipped: configs.len() - pending.len(), ..Default::default() };

    let writer = Mutex::new(file);
    let finished = AtomicUsize::new(0);
    let failed = AtomicUsize::new(0);
    let total = pending.len();
    let work = || {
        pending.par_iter().try_for_each(|config| {
            let rec = execute(config, rules_dir);
            if matches!(rec, SweepRecord::Error(_)) {
                failed.fetch_add(1, Ordering::Relaxed);
            }
            let mut line = serde_json::to_string(&rec).expect("records serialize");
            line.push('\n');
            {
                let mut f = writer.lock().expect("writer lock");
                f.write_all(line.as_bytes()).and_then(|_| f.flush()).map_err(io_err(out))?;
            }
            let n = finished.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(cb) = progress {
                cb(n, total);
            }
            Ok::<(), SweepError>(())
        })
    };
    match plan.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SweepError::Io { path: out.to_path_buf(), source: std::io::Error::other(e) })?
            .install(work)?,
        None => work()?,
    }
    summary.failed = failed.into_inner();
    summary.completed = finished.into_inner() - summary.failed;
    Ok(summary)
}

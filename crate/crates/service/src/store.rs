//! Append-only JSON-lines persistence for submissions and sessions.
//!
//! Every accepted submission appends one [`StoreRecord`] line to
//! `traces.jsonl` and is synced before the call returns. A status change
//! appends a superseding record for the same trace id; readers see the
//! latest record per id, in first-submission order. Session
//! acknowledgments go to `sessions.jsonl` the same way.

use std::collections::{BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use tasktrace::{Trace, ValidationReport};

pub const TRACE_LOG: &str = "traces.jsonl";
pub const SESSION_LOG: &str = "sessions.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Approved,
    Rejected,
    PendingReview,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoreRecord {
    pub trace: Trace,
    pub status: RecordStatus,
    pub report: ValidationReport,
}

impl StoreRecord {
    /// A record whose status follows the report's verdict.
    pub fn from_report(trace: Trace, report: ValidationReport) -> Self {
        let status = if report.is_approved() {
            RecordStatus::Approved
        } else {
            RecordStatus::Rejected
        };
        StoreRecord {
            trace,
            status,
            report,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("store records always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SessionRecord {
    session: String,
    acknowledged: bool,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("data directory {0} does not exist or is not a directory")]
    MissingDir(PathBuf),
    #[error("{file} line {line}: {message}")]
    Corrupt {
        file: &'static str,
        line: usize,
        message: String,
    },
    #[error("trace id {0:?} is already stored")]
    DuplicateId(String),
    #[error("trace id {0:?} is not stored")]
    UnknownId(String),
    #[error("storage failure: {0}")]
    Io(#[from] io::Error),
}

/// An append-only log file that rolls back partial writes.
#[derive(Debug)]
struct Log {
    file: File,
    len: u64,
}

impl Log {
    fn open(path: &Path) -> io::Result<Self> {
        let file = OpenOptions::new()
            .create(true)
            .read(true)
            .append(true)
            .open(path)?;
        let len = file.metadata()?.len();
        Ok(Log { file, len })
    }

    /// Writes `line` plus a newline and syncs. On failure the file is cut
    /// back to its previous length so no partial record survives.
    fn append(&mut self, line: &str) -> io::Result<()> {
        let mut buf = Vec::with_capacity(line.len() + 1);
        buf.extend_from_slice(line.as_bytes());
        buf.push(b'\n');
        let result = self
            .file
            .write_all(&buf)
            .and_then(|()| self.file.sync_data());
        match result {
            Ok(()) => {
                self.len += buf.len() as u64;
                Ok(())
            }
            Err(e) => {
                let _ = self.file.set_len(self.len);
                let _ = self.file.seek(SeekFrom::End(0));
                Err(e)
            }
        }
    }
}

/// Reads the non-blank lines of a log. A final line without a newline is
/// a torn write from an interrupted append; it is dropped and the file
/// truncated before it.
fn replay_lines(path: &Path) -> io::Result<Vec<(usize, String)>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let mut reader = BufReader::new(file);
    let mut lines = Vec::new();
    let mut offset = 0u64;
    let mut torn_at = None;
    let mut buf = String::new();
    for number in 1.. {
        buf.clear();
        let n = reader.read_line(&mut buf)?;
        if n == 0 {
            break;
        }
        if !buf.ends_with('\n') {
            torn_at = Some(offset);
            break;
        }
        offset += n as u64;
        if !buf.trim().is_empty() {
            lines.push((number, buf.trim_end().to_owned()));
        }
    }
    if let Some(cut) = torn_at {
        tracing::warn!(path = %path.display(), cut, "dropping torn final line");
        OpenOptions::new().write(true).open(path)?.set_len(cut)?;
    }
    Ok(lines)
}

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    traces: Log,
    sessions: Log,
    /// Latest record per id, in first-submission order.
    records: Vec<StoreRecord>,
    index: HashMap<String, usize>,
    acknowledged: BTreeSet<String>,
}

impl Store {
    /// Opens the logs in `dir`, creating them if needed, and replays them.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        if !dir.is_dir() {
            return Err(StoreError::MissingDir(dir));
        }
        let trace_path = dir.join(TRACE_LOG);
        let session_path = dir.join(SESSION_LOG);

        let mut records: Vec<StoreRecord> = Vec::new();
        let mut index = HashMap::new();
        for (line, text) in replay_lines(&trace_path)? {
            let record: StoreRecord =
                serde_json::from_str(&text).map_err(|e| StoreError::Corrupt {
                    file: TRACE_LOG,
                    line,
                    message: e.to_string(),
                })?;
            match index.get(&record.trace.id) {
                Some(&i) => records[i] = record,
                None => {
                    index.insert(record.trace.id.clone(), records.len());
                    records.push(record);
                }
            }
        }

        let mut acknowledged = BTreeSet::new();
        for (line, text) in replay_lines(&session_path)? {
            let record: SessionRecord =
                serde_json::from_str(&text).map_err(|e| StoreError::Corrupt {
                    file: SESSION_LOG,
                    line,
                    message: e.to_string(),
                })?;
            if record.acknowledged {
                acknowledged.insert(record.session);
            } else {
                acknowledged.remove(&record.session);
            }
        }

        Ok(Store {
            traces: Log::open(&trace_path)?,
            sessions: Log::open(&session_path)?,
            dir,
            records,
            index,
            acknowledged,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Latest record per trace id, in first-submission order.
    pub fn records(&self) -> &[StoreRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&StoreRecord> {
        self.index.get(id).map(|&i| &self.records[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Persists a new submission. Nothing is recorded when the write fails.
    pub fn insert(&mut self, record: StoreRecord) -> Result<(), StoreError> {
        if self.contains(&record.trace.id) {
            return Err(StoreError::DuplicateId(record.trace.id));
        }
        self.traces.append(&record.to_line())?;
        self.index.insert(record.trace.id.clone(), self.records.len());
        self.records.push(record);
        Ok(())
    }

    /// Appends a superseding record with a new status for a stored trace.
    pub fn review(&mut self, id: &str, status: RecordStatus) -> Result<&StoreRecord, StoreError> {
        let &i = self
            .index
            .get(id)
            .ok_or_else(|| StoreError::UnknownId(id.to_owned()))?;
        let record = StoreRecord {
            status,
            ..self.records[i].clone()
        };
        self.traces.append(&record.to_line())?;
        self.records[i] = record;
        Ok(&self.records[i])
    }

    /// Records an acknowledged session and returns its token.
    pub fn acknowledge(&mut self, session: Option<String>) -> Result<String, StoreError> {
        let session = session.unwrap_or_else(|| uuid::Uuid::new_v4().to_string());
        if !self.acknowledged.contains(&session) {
            let line = serde_json::to_string(&SessionRecord {
                session: session.clone(),
                acknowledged: true,
            })
            .expect("session records always serialize");
            self.sessions.append(&line)?;
            self.acknowledged.insert(session.clone());
        }
        Ok(session)
    }

    pub fn is_acknowledged(&self, session: &str) -> bool {
        self.acknowledged.contains(session)
    }

    /// Export form: one canonical record per line.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn break_trace_log(&mut self) {
        self.traces.file = OpenOptions::new().write(true).open("/dev/full").unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tasktrace::model::fixtures::f1;
    use tasktrace::validate_trace;

    fn record(trace: Trace) -> StoreRecord {
        let report = validate_trace(&trace);
        StoreRecord::from_report(trace, report)
    }

    #[test]
    fn replays_after_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = Store::open(dir.path()).unwrap();
        for t in f1() {
            store.insert(record(t)).unwrap();
        }
        let token = store.acknowledge(None).unwrap();
        drop(store);

        let store = Store::open(dir.path()).unwrap();
        let ids: Vec<&str> = store.records().iter().map(|r| r.trace.id.as_str()).collect();
        assert_eq!(ids, ["t1", "t2", "t3"]);
        assert!(store.is_acknowledged(&token));
        assert!(!store.is_acknowledged("other"));
    }

    #[test]
    fn duplicate_ids_refused() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = Store::open(dir.path()).unwrap();
        store.insert(record(f1().remove(0))).unwrap();
        assert!(matches!(
            store.insert(record(f1().remove(0))),
            Err(StoreError::DuplicateId(_))
        ));
        assert_eq!(store.records().len(), 1);
    }

    #[test]
    fn review_supersedes_without_reordering() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = Store::open(dir.path()).unwrap();
        for t in f1() {
            store.insert(record(t)).unwrap();
        }
        store.review("t1", RecordStatus::PendingReview).unwrap();
        drop(store);

        let raw = std::fs::read_to_string(dir.path().join(TRACE_LOG)).unwrap();
        assert_eq!(raw.lines().count(), 4);
        let store = Store::open(dir.path()).unwrap();
        assert_eq!(store.records()[0].trace.id, "t1");
        assert_eq!(store.records()[0].status, RecordStatus::PendingReview);
        assert_eq!(store.export().lines().count(), 3);
    }

    #[test]
    fn torn_tail_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = Store::open(dir.path()).unwrap();
        store.insert(record(f1().remove(0))).unwrap();
        drop(store);
        let path = dir.path().join(TRACE_LOG);
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"trace\":{\"id\":\"t2\"").unwrap();
        drop(f);

        let mut store = Store::open(dir.path()).unwrap();
        assert_eq!(store.records().len(), 1);
        store.insert(record(f1().remove(1))).unwrap();
        drop(store);
        assert_eq!(Store::open(dir.path()).unwrap().records().len(), 2);
    }

    #[test]
    fn corrupt_interior_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(TRACE_LOG), "not json\n").unwrap();
        assert!(matches!(
            Store::open(dir.path()),
            Err(StoreError::Corrupt { line: 1, .. })
        ));
    }

    #[test]
    fn failed_write_persists_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let mut store = Store::open(dir.path()).unwrap();
        store.insert(record(f1().remove(0))).unwrap();
        store.break_trace_log();
        assert!(matches!(store.insert(record(f1().remove(1))), Err(StoreError::Io(_))));
        assert_eq!(store.records().len(), 1);
        assert!(!store.contains("t2"));
        drop(store);
        assert_eq!(Store::open(dir.path()).unwrap().records().len(), 1);
    }

    #[test]
    fn missing_dir() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            Store::open(dir.path().join("absent")),
            Err(StoreError::MissingDir(_))
        ));
    }
}

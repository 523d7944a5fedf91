//! Append-only JSONL event log per document, plus a snapshot written on
//! export. Recovery loads the snapshot and replays the events after it.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::wire::{Interchange, QeResponse};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DocState {
    pub id: String,
    pub source: Interchange,
    pub revision: u64,
    pub targets: Vec<TargetState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetState {
    pub markup: String,
    pub revision: u64,
    pub human_edited: bool,
    pub qe: QeResponse,
    /// Word-level rows, one per target word.
    pub alignment: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
/// One log line. Adjacent tagging so the payload is read without buffering;
/// integer map keys do not survive a buffered round trip.
#[serde(tag = "type", content = "data", rename_all = "camelCase")]
pub enum Event {
    Created { state: DocState },
    #[serde(rename_all = "camelCase")]
    Edited { segment: usize, start: usize, end: usize, text: String },
    /// QE computed for `revision` of the segment; dropped on replay if the
    /// segment moved on, as it is live.
    #[serde(rename_all = "camelCase")]
    QeRefreshed { segment: usize, revision: u64, qe: QeResponse },
}

#[derive(Debug, Serialize, Deserialize)]
struct Snapshot {
    /// Log lines already folded into `state`.
    events: usize,
    state: DocState,
}

/// A document as found on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Recovered {
    pub snapshot: Option<DocState>,
    /// Events after the snapshot (all of them without one).
    pub events: Vec<Event>,
}

#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn log_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.jsonl"))
    }

    fn snapshot_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.snapshot.json"))
    }

    pub fn append(&self, id: &str, event: &Event) -> io::Result<()> {
        let mut line = serde_json::to_vec(event).map_err(io::Error::other)?;
        line.push(b'\n');
        let mut f = OpenOptions::new().create(true).append(true).open(self.log_path(id))?;
        f.write_all(&line)?;
        f.sync_data()
    }

    pub fn snapshot(&self, state: &DocState) -> io::Result<()> {
        let events = match File::open(self.log_path(&state.id)) {
            Ok(f) => BufReader::new(f).lines().count(),
            Err(e) if e.kind() == io::ErrorKind::NotFound => 0,
            Err(e) => return Err(e),
        };
        let body = serde_json::to_vec_pretty(&Snapshot { events, state: state.clone() }).map_err(io::Error::other)?;
        let path = self.snapshot_path(&state.id);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, body)?;
        fs::rename(tmp, path)
    }

    /// Every logged document, sorted by id. A torn final log line (crash
    /// mid-append) is ignored; any other unreadable line is an error.
    pub fn load(&self) -> io::Result<Vec<(String, Recovered)>> {
        let mut ids: Vec<String> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(".jsonl")).map(str::to_string))
            .collect();
        ids.sort();
        let mut out = Vec::with_capacity(ids.len());
        for id in ids {
            let snapshot: Option<Snapshot> = match fs::read(self.snapshot_path(&id)) {
                Ok(bytes) => Some(serde_json::from_slice(&bytes).map_err(|e| bad(&id, 0, e))?),
                Err(e) if e.kind() == io::ErrorKind::NotFound => None,
                Err(e) => return Err(e),
            };
            let lines: Vec<String> = BufReader::new(File::open(self.log_path(&id))?).lines().collect::<io::Result<_>>()?;
            let skip = snapshot.as_ref().map_or(0, |s| s.events);
            let mut events = Vec::new();
            for (n, line) in lines.iter().enumerate().skip(skip) {
                match serde_json::from_str::<Event>(line) {
                    Ok(e) => events.push(e),
                    Err(_) if n + 1 == lines.len() => break,
                    Err(e) => return Err(bad(&id, n + 1, e)),
                }
            }
            out.push((id, Recovered { snapshot: snapshot.map(|s| s.state), events }));
        }
        Ok(out)
    }
}

fn bad(id: &str, line: usize, e: serde_json::Error) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, format!("{id} line {line}: {e}"))
}

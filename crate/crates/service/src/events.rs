//! Client interaction events, logged as JSON Lines.
//!
//! Clients number their events per session starting at 1. Events are
//! released to the log in sequence order; an event that arrives ahead of a
//! gap waits in memory until the gap fills or the logger shuts down.
//! Re-sent events (already logged or already waiting) are acknowledged and
//! dropped, so each event lands in the log at most once.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAX_SESSION_ID_LEN: usize = 128;

type WriterHandle = JoinHandle<Result<(), EventError>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    QuerySubmitted,
    CityViewed,
    BannerShown,
    BannerClicked,
    BookingConfirmed,
}

/// Event as posted by the client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClientEvent {
    pub session_id: String,
    pub seq: u64,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub city_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client_ts: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<serde_json::Value>,
}

/// One line of the event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    #[serde(flatten)]
    pub event: ClientEvent,
    pub received_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    Accepted,
    Duplicate,
}

#[derive(Debug, Error)]
pub enum EventError {
    #[error("invalid event: {0}")]
    Invalid(String),
    #[error("session {session_id:?} has {pending} events waiting for seq {next_expected}")]
    TooManyPending { session_id: String, pending: usize, next_expected: u64 },
    #[error("event log is shut down")]
    Closed,
    #[error("event log {path}: {message}")]
    Io { path: PathBuf, message: String },
}

#[derive(Debug)]
struct Session {
    next_expected: u64,
    pending: BTreeMap<u64, EventRecord>,
}

impl Session {
    fn new() -> Self {
        Self { next_expected: 1, pending: BTreeMap::new() }
    }
}

#[derive(Debug)]
struct State {
    sessions: HashMap<String, Session>,
    tx: Option<mpsc::Sender<EventRecord>>,
}

/// Cloneable handle; all clones share one writer.
#[derive(Debug, Clone)]
pub struct EventLogger {
    state: Arc<Mutex<State>>,
    writer: Arc<Mutex<Option<WriterHandle>>>,
    max_pending: usize,
    path: PathBuf,
}

impl EventLogger {
    /// Open the log for appending, restoring per-session progress from
    /// whatever it already holds.
    pub fn open(path: &Path, max_pending: usize) -> Result<Self, EventError> {
        let io = |e: &dyn std::fmt::Display| EventError::Io { path: path.to_path_buf(), message: e.to_string() };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|e| io(&e))?;
        }
        let mut sessions: HashMap<String, Session> = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path).map_err(|e| io(&e))?);
            for (n, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| io(&e))?;
                if line.trim().is_empty() {
                    continue;
                }
                let record: EventRecord =
                    serde_json::from_str(&line).map_err(|e| io(&format!("line {}: {e}", n + 1)))?;
                let session = sessions.entry(record.event.session_id).or_insert_with(Session::new);
                session.next_expected = session.next_expected.max(record.event.seq + 1);
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| io(&e))?;
        let (tx, rx) = mpsc::channel();
        let writer_path = path.to_path_buf();
        let handle = std::thread::Builder::new()
            .name("event-log".into())
            .spawn(move || write_loop(file, rx, &writer_path))
            .map_err(|e| io(&e))?;
        Ok(Self {
            state: Arc::new(Mutex::new(State { sessions, tx: Some(tx) })),
            writer: Arc::new(Mutex::new(Some(handle))),
            max_pending,
            path: path.to_path_buf(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn submit(&self, event: ClientEvent) -> Result<Acceptance, EventError> {
        if event.session_id.is_empty() || event.session_id.len() > MAX_SESSION_ID_LEN {
            return Err(EventError::Invalid(format!("session_id must be 1..={MAX_SESSION_ID_LEN} bytes")));
        }
        if event.seq == 0 {
            return Err(EventError::Invalid("seq starts at 1".into()));
        }
        let mut state = self.state.lock().expect("event state lock");
        let State { sessions, tx } = &mut *state;
        let tx = tx.as_ref().ok_or(EventError::Closed)?;
        let session = sessions.entry(event.session_id.clone()).or_insert_with(Session::new);
        if event.seq < session.next_expected || session.pending.contains_key(&event.seq) {
            return Ok(Acceptance::Duplicate);
        }
        if event.seq > session.next_expected && session.pending.len() >= self.max_pending {
            return Err(EventError::TooManyPending {
                session_id: event.session_id,
                pending: session.pending.len(),
                next_expected: session.next_expected,
            });
        }
        let seq = event.seq;
        session.pending.insert(seq, EventRecord { event, received_at: Utc::now() });
        while let Some(record) = session.pending.remove(&session.next_expected) {
            tx.send(record).map_err(|_| EventError::Closed)?;
            session.next_expected += 1;
        }
        Ok(Acceptance::Accepted)
    }

    /// Write out every held-back event in sequence order, then close and
    /// sync the log. Later submissions fail with [`EventError::Closed`].
    pub fn shutdown(&self) -> Result<(), EventError> {
        {
            let mut state = self.state.lock().expect("event state lock");
            if let Some(tx) = state.tx.take() {
                let mut ids: Vec<&String> = state.sessions.keys().collect();
                ids.sort();
                let ids: Vec<String> = ids.into_iter().cloned().collect();
                for id in ids {
                    let session = state.sessions.get_mut(&id).expect("session present");
                    let pending = std::mem::take(&mut session.pending);
                    for (seq, record) in pending {
                        tx.send(record).map_err(|_| EventError::Closed)?;
                        session.next_expected = seq + 1;
                    }
                }
            }
        }
        let handle = self.writer.lock().expect("writer lock").take();
        match handle {
            Some(h) => h.join().map_err(|_| EventError::Io { path: self.path.clone(), message: "writer panicked".into() })?,
            None => Ok(()),
        }
    }
}

fn write_loop(file: File, rx: mpsc::Receiver<EventRecord>, path: &Path) -> Result<(), EventError> {
    let io = |e: &dyn std::fmt::Display| EventError::Io { path: path.to_path_buf(), message: e.to_string() };
    let mut out = BufWriter::new(file);
    while let Ok(first) = rx.recv() {
        let mut next = Some(first);
        while let Some(record) = next {
            let mut line = serde_json::to_string(&record).map_err(|e| io(&e))?;
            line.push('\n');
            if let Err(e) = out.write_all(line.as_bytes()) {
                tracing::error!("event log write failed: {e}");
                return Err(io(&e));
            }
            next = rx.try_recv().ok();
        }
        out.flush().map_err(|e| io(&e))?;
    }
    out.flush().map_err(|e| io(&e))?;
    out.get_ref().sync_all().map_err(|e| io(&e))
}

/// Read a whole event log back, in file order.
pub fn read_log(path: &Path) -> Result<Vec<EventRecord>, EventError> {
    let io = |e: &dyn std::fmt::Display| EventError::Io { path: path.to_path_buf(), message: e.to_string() };
    let text = std::fs::read_to_string(path).map_err(|e| io(&e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| io(&e)))
        .collect()
}

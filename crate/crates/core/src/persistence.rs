//! Durable storage for transcripts, session states and user profiles.
//!
//! Layout under the data directory:
//!
//! ```text
//! users/<user_id>.json        profile, rewritten atomically
//! sessions/<session_id>.jsonl one transcript turn per line, each with a CRC
//! states/<session_id>.json    session frame, rewritten atomically
//! ```
//!
//! A transcript line is acknowledged only after it has been fsynced. A final
//! line without its newline was never acknowledged; readers skip it and the
//! next writer truncates it.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, PoisonError};

use serde::{Deserialize, Serialize};

use crate::session::{SessionState, UserProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speaker {
    User,
    Robot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptTurn {
    pub session_id: String,
    pub turn_index: u64,
    pub speaker: Speaker,
    pub text: String,
    pub woz: bool,
    pub matched_category_id: Option<String>,
    /// UTC milliseconds since the epoch.
    pub timestamp: i64,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("session {session_id}: expected turn {expected}, got {got}")]
    IndexGap {
        session_id: String,
        expected: u64,
        got: u64,
    },
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("session {session_id}: corrupt record on line {line}")]
    CorruptRecord { session_id: String, line: usize },
    #[error("invalid identifier {0:?}")]
    InvalidId(String),
    #[error("woz flag set on a user turn")]
    WozUserTurn,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Storage backend used by the brain.
pub trait Store: Send + Sync {
    /// Appends a turn; `turn.turn_index` must be one past the last stored
    /// turn. Returns once the turn is durable.
    fn append_turn(&self, turn: &TranscriptTurn) -> Result<(), StoreError>;
    fn load_transcript(&self, session_id: &str) -> Result<Vec<TranscriptTurn>, StoreError>;
    /// Writes the profile and returns the version it was stored under.
    fn save_profile(&self, profile: &UserProfile) -> Result<u64, StoreError>;
    fn load_profile(&self, user_id: &str) -> Result<Option<UserProfile>, StoreError>;
    fn save_state(&self, state: &SessionState) -> Result<(), StoreError>;
    fn load_state(&self, session_id: &str) -> Result<SessionState, StoreError>;
    fn list_states(&self) -> Result<Vec<SessionState>, StoreError>;
}

/// Identifiers become file names, so they are restricted to a safe alphabet.
pub fn validate_id(id: &str) -> Result<(), StoreError> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(StoreError::InvalidId(id.to_string()))
    }
}

#[derive(Serialize)]
struct RecordOut<'a> {
    #[serde(flatten)]
    turn: &'a TranscriptTurn,
    crc: u32,
}

#[derive(Deserialize)]
struct RecordIn {
    #[serde(flatten)]
    turn: TranscriptTurn,
    crc: u32,
}

fn checksum(turn: &TranscriptTurn) -> Result<u32, serde_json::Error> {
    Ok(crc32fast::hash(serde_json::to_string(turn)?.as_bytes()))
}

/// Encodes one JSONL line (with trailing newline).
pub fn encode_record(turn: &TranscriptTurn) -> Result<String, serde_json::Error> {
    let crc = checksum(turn)?;
    let mut line = serde_json::to_string(&RecordOut { turn, crc })?;
    line.push('\n');
    Ok(line)
}

fn decode_record(line: &str) -> Option<TranscriptTurn> {
    let record: RecordIn = serde_json::from_str(line).ok()?;
    (checksum(&record.turn).ok()? == record.crc).then_some(record.turn)
}

/// Splits file content into complete lines, dropping an unterminated tail.
fn complete_lines(content: &str) -> impl Iterator<Item = &str> {
    let end = content.rfind('\n').map_or(0, |i| i + 1);
    content[..end].lines()
}

fn decode_all(session_id: &str, content: &str) -> Result<Vec<TranscriptTurn>, StoreError> {
    complete_lines(content)
        .enumerate()
        .map(|(i, line)| {
            decode_record(line).ok_or_else(|| StoreError::CorruptRecord {
                session_id: session_id.to_string(),
                line: i + 1,
            })
        })
        .collect()
}

fn sync_dir(dir: &Path) -> io::Result<()> {
    File::open(dir)?.sync_all()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let tmp = path.with_extension("json.tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    sync_dir(dir)
}

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(PoisonError::into_inner)
}

#[derive(Default)]
struct LogCursor {
    next_index: Option<u64>,
}

/// Flat-file [`Store`].
pub struct FileStore {
    root: PathBuf,
    logs: Mutex<HashMap<String, Arc<Mutex<LogCursor>>>>,
    users: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl FileStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<FileStore, StoreError> {
        let root = root.into();
        for sub in ["users", "sessions", "states"] {
            fs::create_dir_all(root.join(sub))?;
        }
        Ok(FileStore {
            root,
            logs: Mutex::default(),
            users: Mutex::default(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn transcript_path(&self, session_id: &str) -> PathBuf {
        self.root.join("sessions").join(format!("{session_id}.jsonl"))
    }

    fn state_path(&self, session_id: &str) -> PathBuf {
        self.root.join("states").join(format!("{session_id}.json"))
    }

    fn profile_path(&self, user_id: &str) -> PathBuf {
        self.root.join("users").join(format!("{user_id}.json"))
    }

    fn cursor(&self, session_id: &str) -> Arc<Mutex<LogCursor>> {
        lock(&self.logs).entry(session_id.to_string()).or_default().clone()
    }

    /// Validates an existing transcript, truncating an unacknowledged tail,
    /// and returns the number of stored turns.
    fn recover(&self, session_id: &str, path: &Path) -> Result<u64, StoreError> {
        let content = match fs::read_to_string(path) {
            Ok(c) => c,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        let turns = decode_all(session_id, &content)?;
        let complete = content.rfind('\n').map_or(0, |i| i + 1);
        if complete < content.len() {
            let f = OpenOptions::new().write(true).open(path)?;
            f.set_len(complete as u64)?;
            f.sync_all()?;
        }
        Ok(turns.len() as u64)
    }
}

impl Store for FileStore {
    fn append_turn(&self, turn: &TranscriptTurn) -> Result<(), StoreError> {
        validate_id(&turn.session_id)?;
        if turn.woz && turn.speaker == Speaker::User {
            return Err(StoreError::WozUserTurn);
        }
        let cursor = self.cursor(&turn.session_id);
        let mut cursor = lock(&cursor);
        let path = self.transcript_path(&turn.session_id);
        let next = match cursor.next_index {
            Some(n) => n,
            None => self.recover(&turn.session_id, &path)?,
        };
        cursor.next_index = Some(next);
        if turn.turn_index != next {
            return Err(StoreError::IndexGap {
                session_id: turn.session_id.clone(),
                expected: next,
                got: turn.turn_index,
            });
        }
        let line = encode_record(turn)?;
        let mut file = OpenOptions::new().create(true).append(true).open(&path)?;
        file.write_all(line.as_bytes())?;
        file.sync_data()?;
        if next == 0 {
            sync_dir(path.parent().unwrap_or(Path::new(".")))?;
        }
        cursor.next_index = Some(next + 1);
        Ok(())
    }

    fn load_transcript(&self, session_id: &str) -> Result<Vec<TranscriptTurn>, StoreError> {
        validate_id(session_id)?;
        match fs::read_to_string(self.transcript_path(session_id)) {
            Ok(content) => decode_all(session_id, &content),
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                Err(StoreError::UnknownSession(session_id.to_string()))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn save_profile(&self, profile: &UserProfile) -> Result<u64, StoreError> {
        validate_id(&profile.user_id)?;
        let guard = lock(&self.users)
            .entry(profile.user_id.clone())
            .or_default()
            .clone();
        let _held = lock(&guard);
        let stored = self.load_profile(&profile.user_id)?.map_or(0, |p| p.version);
        let version = stored.max(profile.version) + 1;
        let mut out = profile.clone();
        out.version = version;
        write_atomic(
            &self.profile_path(&profile.user_id),
            &serde_json::to_vec_pretty(&out)?,
        )?;
        Ok(version)
    }

    fn load_profile(&self, user_id: &str) -> Result<Option<UserProfile>, StoreError> {
        validate_id(user_id)?;
        match fs::read(self.profile_path(user_id)) {
            Ok(bytes) => Ok(Some(serde_json::from_slice(&bytes)?)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    fn save_state(&self, state: &SessionState) -> Result<(), StoreError> {
        validate_id(&state.session_id)?;
        write_atomic(
            &self.state_path(&state.session_id),
            &serde_json::to_vec_pretty(state)?,
        )?;
        Ok(())
    }

    fn load_state(&self, session_id: &str) -> Result<SessionState, StoreError> {
        validate_id(session_id)?;
        match fs::read(self.state_path(session_id)) {
            Ok(bytes) => Ok(serde_json::from_slice(&bytes)?),
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                Err(StoreError::UnknownSession(session_id.to_string()))
            }
            Err(e) => Err(e.into()),
        }
    }

    fn list_states(&self) -> Result<Vec<SessionState>, StoreError> {
        let mut states = Vec::new();
        for entry in fs::read_dir(self.root.join("states"))? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            states.push(serde_json::from_slice(&fs::read(&path)?)?);
        }
        states.sort_by(|a: &SessionState, b| a.session_id.cmp(&b.session_id));
        Ok(states)
    }
}

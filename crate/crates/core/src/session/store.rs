//! A saved session is a directory of plain-text files, one per artifact.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::Level;
use crate::error::{FormatError, SessionError};
use crate::mdp::{read_model, read_policy, write_model, write_policy};
use crate::patch::{read_patches, write_patch};

use super::{Brain, EpisodeTrace, Session, SessionConfig};

pub const LEVEL_FILE: &str = "level.txt";
pub const POLICY_FILE: &str = "policy.txt";
pub const MODEL_FILE: &str = "model.txt";
pub const TRACE_FILE: &str = "trace.jsonl";
pub const SESSION_FILE: &str = "session.json";

const SESSION_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Cursor {
    version: u32,
    current_frame: usize,
}

pub(super) fn render(session: &Session) -> BTreeMap<&'static str, String> {
    let brain = &session.brain;
    let mut policy = write_policy(&brain.policy, &brain.values, brain.gamma);
    for p in &session.patches {
        write_patch(&mut policy, p);
    }
    let cursor = Cursor { version: SESSION_FORMAT_VERSION, current_frame: session.current_frame };
    BTreeMap::from([
        (LEVEL_FILE, session.level.to_text()),
        (POLICY_FILE, policy),
        (MODEL_FILE, write_model(&brain.model)),
        (TRACE_FILE, session.trace.to_text()),
        (SESSION_FILE, serde_json::to_string(&cursor).unwrap() + "\n"),
    ])
}

pub fn save_session(session: &Session, dir: &Path) -> Result<(), SessionError> {
    fs::create_dir_all(dir)?;
    for (name, text) in render(session) {
        fs::write(dir.join(name), text)?;
    }
    Ok(())
}

/// Loads a saved session, paused at the frame it was saved on.
pub fn load_session(dir: &Path, config: SessionConfig) -> Result<Session, SessionError> {
    let read = |name: &str| fs::read_to_string(dir.join(name));
    let level = Level::parse(&read(LEVEL_FILE)?)?;
    let policy_text = read(POLICY_FILE)?;
    let pf = read_policy(&policy_text)?;
    let patches = read_patches(&policy_text)?;
    let model = read_model(&read(MODEL_FILE)?)?;
    let trace = EpisodeTrace::parse(&read(TRACE_FILE)?)?;
    let cursor_text = read(SESSION_FILE)?;
    let cursor: Cursor =
        serde_json::from_str(&cursor_text).map_err(|e| FormatError::Record { line: 1, reason: e.to_string() })?;
    if cursor.version != SESSION_FORMAT_VERSION {
        return Err(FormatError::Version { expected: SESSION_FORMAT_VERSION, found: cursor.version }.into());
    }
    if let Some(i) = trace.first_divergence(&level) {
        return Err(FormatError::Record { line: i + 2, reason: "trace does not replay on this level".into() }.into());
    }
    let brain = Brain { model, policy: pf.policy, values: pf.values, gamma: pf.gamma };
    Session::restore(level, brain, patches, trace, cursor.current_frame, config)
}

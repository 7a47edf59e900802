//! Bundled levels, and scripted fixes replayed against a live session.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::env::Level;
use crate::error::{FormatError, PatchError, SessionError};
use crate::mdp::ExploreConfig;
use crate::patch::{FixRequest, PatchStats};
use crate::session::{play_episode, Brain, Outcome, Session, SessionConfig};

pub const TRAINING_LEVEL: &str = include_str!("../../levels/training.txt");

#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub name: &'static str,
    pub level: &'static str,
    pub script: &'static str,
}

impl Scenario {
    pub fn level(&self) -> Level {
        Level::parse(self.level).expect("bundled levels parse")
    }

    pub fn script(&self) -> Vec<FixRequest> {
        parse_script(self.script).expect("bundled scripts parse")
    }
}

pub const SCENARIOS: [Scenario; 3] = [
    Scenario {
        name: "b1-coins-above-enemy",
        level: include_str!("../../levels/b1.txt"),
        script: include_str!("../../levels/b1.json"),
    },
    Scenario {
        name: "b2-ceiling-over-enemy",
        level: include_str!("../../levels/b2.txt"),
        script: include_str!("../../levels/b2.json"),
    },
    Scenario {
        name: "b3-trapped-enemy",
        level: include_str!("../../levels/b3.txt"),
        script: include_str!("../../levels/b3.json"),
    },
];

/// Exploration settings the bundled base policy is trained with.
pub fn base_explore_config() -> ExploreConfig {
    ExploreConfig { total_steps: 50_000, seed: 0, ..Default::default() }
}

pub fn train_base() -> Brain {
    let level = Level::parse(TRAINING_LEVEL).expect("bundled levels parse");
    Brain::train(&level, &base_explore_config()).expect("training level solves")
}

/// A fix script is a JSON list of fix requests.
pub fn parse_script(text: &str) -> Result<Vec<FixRequest>, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Record { line: e.line(), reason: e.to_string() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixReport {
    pub request: FixRequest,
    pub anchor_frame: usize,
    pub patch_id: u32,
    pub relevant_states: usize,
    pub stats: PatchStats,
    /// How the episode ended when resumed from the anchor with the patch applied.
    pub resumed_outcome: Option<Outcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptReport {
    pub base_outcome: Option<Outcome>,
    pub base_frames: usize,
    pub fixes: Vec<FixReport>,
    /// A fresh episode from the spawn point under the final policy.
    pub final_outcome: Outcome,
    pub final_frames: usize,
    pub wall_time_ms: u64,
}

impl ScriptReport {
    pub fn repaired(&self) -> bool {
        self.base_outcome != Some(Outcome::Finished) && self.final_outcome == Outcome::Finished
    }

    pub fn max_patch_ms(&self) -> u64 {
        self.fixes.iter().map(|f| f.stats.wall_time_ms).max().unwrap_or(0)
    }
}

/// Plays `level` with `brain`, then applies each fix in turn. A fix without an
/// anchor frame is anchored at the first frame of the latest run whose state
/// shows all of its features; after each fix the episode resumes from there.
pub fn run_fix_script(
    level: Level,
    brain: Brain,
    script: &[FixRequest],
    config: SessionConfig,
) -> Result<ScriptReport, SessionError> {
    let started = Instant::now();
    let max_frames = config.max_frames;
    let mut session = Session::start(level, Some(brain), config)?;
    let base_outcome = session.run_to_end();
    let base_frames = session.trace().len();
    let mut fixes = Vec::new();
    for request in script {
        let mut request = request.clone();
        let anchor = match request.anchor_frame {
            Some(i) => i,
            None => {
                let predicate = request.predicate();
                session
                    .trace()
                    .frames
                    .iter()
                    .find(|f| f.world.alive && predicate.matches_key(&f.state_key))
                    .map(|f| f.index)
                    .ok_or_else(|| {
                        PatchError::InfeasibleFix(format!("no recorded frame shows {}", predicate.to_text()))
                    })?
            }
        };
        request.anchor_frame = Some(anchor);
        session.seek(anchor)?;
        let before = session.policy().clone();
        let patch = session.submit_fix(request.clone())?;
        let (patch_id, stats, relevant_states) = (patch.id, patch.stats.clone(), patch.relevant_states(&before).len());
        session.resume()?;
        let resumed_outcome = session.run_to_end();
        fixes.push(FixReport { request, anchor_frame: anchor, patch_id, relevant_states, stats, resumed_outcome });
    }
    let (trace, final_outcome) = play_episode(session.level(), session.policy(), max_frames - 1);
    Ok(ScriptReport {
        base_outcome,
        base_frames,
        fixes,
        final_outcome,
        final_frames: trace.len(),
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

use serde::{Deserialize, Serialize};

use crate::env::{featurize, step, Action, Event, Level, RewardComponents, WorldState};
use crate::error::FormatError;
use crate::mdp::{Policy, StateKey};

pub const TRACE_FORMAT_VERSION: u32 = 1;

/// One recorded tick. `action` and `rewards` describe the transition that led
/// into this frame; both are empty on the first frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub index: usize,
    pub tick: u64,
    pub world: WorldState,
    pub state_key: StateKey,
    pub action: Option<Action>,
    pub rewards: RewardComponents,
    pub cumulative: RewardComponents,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Finished,
    Died,
    TimedOut,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub frames: Vec<Frame>,
}

impl EpisodeTrace {
    pub fn start(level: &Level, world: WorldState) -> EpisodeTrace {
        let frame = Frame {
            index: 0,
            tick: world.tick,
            state_key: StateKey::from(featurize(&world, level)),
            world,
            action: None,
            rewards: RewardComponents::default(),
            cumulative: RewardComponents::default(),
            events: Vec::new(),
        };
        EpisodeTrace { frames: vec![frame] }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn last(&self) -> &Frame {
        self.frames.last().expect("a trace always has its first frame")
    }

    pub fn get(&self, index: usize) -> Option<&Frame> {
        self.frames.get(index)
    }

    /// Whether the last frame ended the episode.
    pub fn outcome(&self, level: &Level) -> Option<Outcome> {
        let w = &self.last().world;
        if !w.alive {
            Some(Outcome::Died)
        } else if w.reached_finish(level) {
            Some(Outcome::Finished)
        } else {
            None
        }
    }

    /// Steps the last frame's world with `action` and appends the result.
    pub fn advance(&mut self, level: &Level, action: Action) -> &Frame {
        let prev = self.last();
        let out = step(&prev.world, level, action).expect("a trace is never advanced past death");
        let frame = Frame {
            index: prev.index + 1,
            tick: out.world.tick,
            state_key: StateKey::from(featurize(&out.world, level)),
            action: Some(action),
            rewards: out.rewards,
            cumulative: prev.cumulative + out.rewards,
            events: out.events.into_iter().collect(),
            world: out.world,
        };
        self.frames.push(frame);
        self.last()
    }

    /// Drops every frame after `index`.
    pub fn truncate_after(&mut self, index: usize) {
        self.frames.truncate(index + 1);
    }

    /// Index of the first frame where replaying the recorded actions from the
    /// first frame diverges from the recording, if any.
    pub fn first_divergence(&self, level: &Level) -> Option<usize> {
        let mut replay = EpisodeTrace { frames: self.frames[..1].to_vec() };
        for (i, f) in self.frames.iter().enumerate().skip(1) {
            let Some(a) = f.action else { return Some(i) };
            if !replay.last().world.alive || replay.advance(level, a) != f {
                return Some(i);
            }
        }
        None
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("#trace v{TRACE_FORMAT_VERSION}\n");
        for f in &self.frames {
            out.push_str(&serde_json::to_string(f).expect("frames serialize"));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<EpisodeTrace, FormatError> {
        let mut lines = text.lines().enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or("");
        let version = header
            .strip_prefix("#trace v")
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| FormatError::BadHeader(header.to_string()))?;
        if version != TRACE_FORMAT_VERSION {
            return Err(FormatError::Version { expected: TRACE_FORMAT_VERSION, found: version });
        }
        let mut frames = Vec::new();
        for (i, line) in lines.filter(|(_, l)| !l.is_empty()) {
            let frame: Frame =
                serde_json::from_str(line).map_err(|e| FormatError::Record { line: i + 1, reason: e.to_string() })?;
            if frame.index != frames.len() {
                return Err(FormatError::Record { line: i + 1, reason: "frame index out of sequence".into() });
            }
            frames.push(frame);
        }
        if frames.is_empty() {
            return Err(FormatError::Record { line: 1, reason: "trace has no frames".into() });
        }
        Ok(EpisodeTrace { frames })
    }
}

/// Runs `policy` greedily from the level's spawn until the episode ends or
/// `max_steps` steps have been taken.
pub fn play_episode(level: &Level, policy: &Policy, max_steps: usize) -> (EpisodeTrace, Outcome) {
    let mut trace = EpisodeTrace::start(level, WorldState::spawn(level));
    for _ in 0..max_steps {
        if let Some(outcome) = trace.outcome(level) {
            return (trace, outcome);
        }
        let a = policy.act(&trace.last().state_key);
        trace.advance(level, a);
    }
    let outcome = trace.outcome(level).unwrap_or(Outcome::TimedOut);
    (trace, outcome)
}

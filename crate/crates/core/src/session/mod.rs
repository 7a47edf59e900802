//! The live session: a bot playing one level, its recorded timeline, and the
//! pause/seek/ask/fix workflow on top of it.

mod store;
mod trace;

use serde::{Deserialize, Serialize};

pub use store::{load_session, save_session, MODEL_FILE, LEVEL_FILE, POLICY_FILE, SESSION_FILE, TRACE_FILE};
pub use trace::{play_episode, EpisodeTrace, Frame, Outcome, TRACE_FORMAT_VERSION};

use crate::env::{Level, WorldState};
use crate::error::{PatchError, SessionError};
use crate::explain::{explain, ContrastReport, ExplainConfig, ExplainContext, Explanation, Question};
use crate::mdp::{explore_base, EmpiricalModel, ExploreConfig, Policy, ValueFunction};
use crate::patch::{apply_patch, build_training_env, compute_patch, FixRequest, Patch, PatchParams, TrainingEnv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Running,
    Paused,
    Patching,
}

/// What the agent has learned: its model of the world and the policy solved from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Brain {
    pub model: EmpiricalModel,
    pub policy: Policy,
    pub values: ValueFunction,
    pub gamma: f64,
}

impl Brain {
    pub fn train(level: &Level, config: &ExploreConfig) -> Result<Brain, SessionError> {
        let r = explore_base(level, config)?;
        Ok(Brain { model: r.model, policy: r.policy, values: r.values, gamma: config.solver.gamma })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub explore: ExploreConfig,
    pub patch: PatchParams,
    pub explain: ExplainConfig,
    /// Train a base policy on the session level when none is supplied.
    pub allow_training: bool,
    /// Episodes are cut (and the session paused) at this many frames.
    pub max_frames: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            explore: ExploreConfig::default(),
            patch: PatchParams::default(),
            explain: ExplainConfig::default(),
            allow_training: false,
            max_frames: 600,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    level: Level,
    brain: Brain,
    patches: Vec<Patch>,
    trace: EpisodeTrace,
    mode: Mode,
    current_frame: usize,
    config: SessionConfig,
}

/// Everything a patch computation needs, detached from the session so it can
/// run on another thread while the session keeps serving reads.
#[derive(Debug, Clone)]
pub struct PatchJob {
    pub id: u32,
    pub env: TrainingEnv,
    pub request: FixRequest,
    pub base: Policy,
    pub params: PatchParams,
}

impl PatchJob {
    pub fn run(&self) -> Result<Patch, PatchError> {
        let mut patch = compute_patch(&self.env, &self.request, &self.base, &self.params)?;
        patch.id = self.id;
        Ok(patch)
    }
}

impl Session {
    /// Starts a running session from the level's spawn point.
    pub fn start(level: Level, brain: Option<Brain>, config: SessionConfig) -> Result<Session, SessionError> {
        let brain = match brain {
            Some(b) => b,
            None if config.allow_training => Brain::train(&level, &config.explore)?,
            None => return Err(SessionError::NoPolicy),
        };
        let trace = EpisodeTrace::start(&level, WorldState::spawn(&level));
        Ok(Session { level, brain, patches: Vec::new(), trace, mode: Mode::Running, current_frame: 0, config })
    }

    pub(crate) fn restore(
        level: Level,
        brain: Brain,
        patches: Vec<Patch>,
        trace: EpisodeTrace,
        current_frame: usize,
        config: SessionConfig,
    ) -> Result<Session, SessionError> {
        if current_frame >= trace.len() {
            return Err(SessionError::FrameOutOfRange { index: current_frame, len: trace.len() });
        }
        Ok(Session { level, brain, patches, trace, mode: Mode::Paused, current_frame, config })
    }

    pub fn level(&self) -> &Level {
        &self.level
    }

    pub fn brain(&self) -> &Brain {
        &self.brain
    }

    pub fn policy(&self) -> &Policy {
        &self.brain.policy
    }

    pub fn values(&self) -> &ValueFunction {
        &self.brain.values
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn trace(&self) -> &EpisodeTrace {
        &self.trace
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn current_frame(&self) -> usize {
        self.current_frame
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    /// How the recorded episode ended, if it has.
    pub fn outcome(&self) -> Option<Outcome> {
        self.trace
            .outcome(&self.level)
            .or_else(|| (self.trace.len() >= self.config.max_frames).then_some(Outcome::TimedOut))
    }

    /// Advances the bot one tick while running. Pauses, and returns `None`
    /// from then on, once the episode ends.
    pub fn tick(&mut self) -> Option<Frame> {
        if self.mode != Mode::Running {
            return None;
        }
        if self.outcome().is_some() {
            self.mode = Mode::Paused;
            return None;
        }
        let a = self.brain.policy.act(&self.trace.last().state_key);
        let frame = self.trace.advance(&self.level, a).clone();
        self.current_frame = frame.index;
        if self.outcome().is_some() {
            self.mode = Mode::Paused;
        }
        Some(frame)
    }

    /// Runs until the episode ends or the session is otherwise paused.
    pub fn run_to_end(&mut self) -> Option<Outcome> {
        while self.tick().is_some() {}
        self.outcome()
    }

    pub fn pause(&mut self) -> Result<Mode, SessionError> {
        match self.mode {
            Mode::Patching => Err(SessionError::Busy),
            _ => {
                self.mode = Mode::Paused;
                Ok(self.mode)
            }
        }
    }

    /// Resumes from the current frame. Frames after it are discarded; an
    /// episode that already ended there starts over from the spawn point.
    pub fn resume(&mut self) -> Result<Mode, SessionError> {
        match self.mode {
            Mode::Patching => return Err(SessionError::Busy),
            Mode::Running => return Ok(self.mode),
            Mode::Paused => {}
        }
        self.trace.truncate_after(self.current_frame);
        if self.outcome().is_some() {
            self.trace = EpisodeTrace::start(&self.level, WorldState::spawn(&self.level));
            self.current_frame = 0;
        }
        self.mode = Mode::Running;
        Ok(self.mode)
    }

    pub fn pause_continue(&mut self) -> Result<Mode, SessionError> {
        match self.mode {
            Mode::Running => self.pause(),
            _ => self.resume(),
        }
    }

    pub fn seek(&mut self, index: usize) -> Result<&Frame, SessionError> {
        self.require_paused()?;
        if index >= self.trace.len() {
            return Err(SessionError::FrameOutOfRange { index, len: self.trace.len() });
        }
        self.current_frame = index;
        Ok(&self.trace.frames[index])
    }

    pub fn frame(&self) -> &Frame {
        &self.trace.frames[self.current_frame]
    }

    pub fn ask(&self, question: Question) -> Result<(Explanation, ContrastReport), SessionError> {
        self.require_paused()?;
        let ctx = ExplainContext {
            model: &self.brain.model,
            policy: &self.brain.policy,
            values: &self.brain.values,
            level: &self.level,
            config: ExplainConfig { gamma: self.brain.gamma, ..self.config.explain },
        };
        Ok(explain(&ctx, &self.frame().world, question)?)
    }

    /// Validates a fix against its anchor frame (the current frame unless the
    /// request names one) and switches to patching mode.
    pub fn begin_fix(&mut self, mut request: FixRequest) -> Result<PatchJob, SessionError> {
        self.require_paused()?;
        let index = *request.anchor_frame.get_or_insert(self.current_frame);
        let anchor = self
            .trace
            .get(index)
            .ok_or(SessionError::FrameOutOfRange { index, len: self.trace.len() })?;
        let env = build_training_env(&self.level, &anchor.world, &request, self.config.patch.window)?;
        self.mode = Mode::Patching;
        Ok(PatchJob {
            id: self.patches.len() as u32 + 1,
            env,
            request,
            base: self.brain.policy.clone(),
            params: self.config.patch,
        })
    }

    /// Applies a finished patch computation, or surfaces its error, and
    /// returns to paused mode either way.
    pub fn finish_fix(&mut self, result: Result<Patch, PatchError>) -> Result<&Patch, SessionError> {
        if self.mode != Mode::Patching {
            return Err(SessionError::NotPaused);
        }
        self.mode = Mode::Paused;
        let patch = result?;
        let (policy, values) = apply_patch(&self.brain.policy, &self.brain.values, &patch);
        self.brain.policy = policy;
        self.brain.values = values;
        self.patches.push(patch);
        Ok(self.patches.last().unwrap())
    }

    pub fn submit_fix(&mut self, request: FixRequest) -> Result<&Patch, SessionError> {
        let job = self.begin_fix(request)?;
        self.finish_fix(job.run())
    }

    /// Hash of everything the session would persist plus its mode and cursor.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for text in store::render(self).values() {
            text.hash(&mut h);
        }
        self.mode.hash(&mut h);
        h.finish()
    }

    fn require_paused(&self) -> Result<(), SessionError> {
        match self.mode {
            Mode::Paused => Ok(()),
            Mode::Patching => Err(SessionError::Busy),
            Mode::Running => Err(SessionError::NotPaused),
        }
    }
}

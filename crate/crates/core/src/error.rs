use thiserror::Error;

use crate::env::Action;
use crate::patch::PatchStats;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LevelError {
    #[error("level is empty")]
    Empty,
    #[error("line {line} has {found} tiles, expected {expected}")]
    NotRectangular { line: usize, expected: usize, found: usize },
    #[error("unknown tile character {ch:?} at line {line}, column {column}")]
    UnknownChar { ch: char, line: usize, column: usize },
    #[error("second agent spawn at line {line}, column {column}")]
    DuplicateAgent { line: usize, column: usize },
    #[error("finish marker at line {line}, column {column} disagrees with an earlier one")]
    ConflictingFinish { line: usize, column: usize },
    #[error("level has no agent spawn ('M')")]
    MissingAgent,
    #[error("level has no finish marker ('F')")]
    MissingFinish,
    #[error("spawn at line {line}, column {column} does not rest on a solid tile")]
    UnsupportedSpawn { line: usize, column: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("cannot step a world whose agent is dead")]
    AgentDead,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("cannot solve an empty model")]
    EmptyModel,
    #[error("discount {0} outside [0, 1)")]
    BadDiscount(f64),
    #[error("value iteration did not converge after {sweeps} sweeps (residual {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplainError {
    #[error("state {0} is not in the value function")]
    UnknownState(String),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("state was never visited with {0} and no simulator is available")]
    NoEvidence(Action),
    #[error("the agent is dead; nothing to explain")]
    TerminalState,
    #[error("the policy already performs {0}; ask why instead")]
    SameAsPolicy(Action),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatchError {
    #[error("anchor frame {frame} outside trace of {len} frames")]
    BadAnchor { frame: usize, len: usize },
    #[error("fix request is malformed: {0}")]
    InvalidRequest(String),
    #[error("no training window reproduces the requested features: {0}")]
    InfeasibleFix(String),
    #[error("patch exploration failed: {successes} successes, {failures} failures in {steps} steps", successes = .0.successes, failures = .0.failures, steps = .0.exploration_steps)]
    PatchFailed(PatchStats),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("missing or malformed header: {0}")]
    BadHeader(String),
    #[error("unsupported format version {found} (expected {expected})")]
    Version { expected: u32, found: u32 },
    #[error("line {line}: {reason}")]
    Record { line: usize, reason: String },
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("session already started")]
    AlreadyStarted,
    #[error("session not started")]
    NotStarted,
    #[error("session is busy computing a patch")]
    Busy,
    #[error("session must be paused for this request")]
    NotPaused,
    #[error("frame {index} out of range (trace has {len} frames)")]
    FrameOutOfRange { index: usize, len: usize },
    #[error("no policy available and training is disabled")]
    NoPolicy,
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error(transparent)]
    Explain(#[from] ExplainError),
    #[error(transparent)]
    Patch(#[from] PatchError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

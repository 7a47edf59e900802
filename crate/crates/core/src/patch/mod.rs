//! Turning a user's edited explanation into a policy patch.
//!
//! A fix names a few state features, a goal and an action. The agent is dropped
//! into a small window of the level around the frame the user picked, explores
//! it with a bias toward the suggested action while only the chosen goal is
//! rewarded, and the resulting local policy is merged into the global one on
//! every state that shows the named features.

mod compute;
mod format;
mod merge;
mod request;
mod training;

use serde::{Deserialize, Serialize};

pub use compute::{compute_patch, goal_achieved, select_action_biased, shaped_reward, PatchParams, PatchStats};
pub use format::{read_patches, write_patch};
pub use merge::{apply_patch, relevant_state_set, PATCH_VALUE_WEIGHT};
pub use request::{Assignment, FixRequest, Predicate, MAX_FIX_FEATURES};
pub use training::{build_training_env, TrainingEnv, TRAINING_WINDOW};

use crate::env::{Action, Goal};
use crate::mdp::{Policy, ValueFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Patch {
    pub id: u32,
    pub goal: Goal,
    pub action: Action,
    /// Which global states the patch applies to.
    pub predicate: Predicate,
    pub pi_fix: Policy,
    pub v_fix: ValueFunction,
    pub stats: PatchStats,
}

//! Tile platformer: levels, dynamics, rewards and featurization.

mod action;
mod features;
mod level;
mod reward;
mod world;

pub use action::{Action, UnknownAction};
pub use features::{
    discretize_enemy_distance, featurize, Axis, Distance, FeatureState, FeatureValue, UnknownVariable, Variable,
    DETECTION_RADIUS,
};
pub use level::{Level, Tile};
pub use reward::{
    Component, Goal, NotAGoal, RewardComponents, RewardSelector, COIN_REWARD, DEATH_REWARD, KILL_REWARD,
    PROGRESS_REWARD,
};
pub use world::{step, Enemy, Event, Facing, StepOutcome, WorldState, HORIZON, JUMP_RISE_TICKS, TICKS_PER_SECOND};

//! Explainable, user-repairable tabular agent for a tile platformer.

pub mod env;
pub mod error;
pub mod explain;
pub mod mdp;
pub mod patch;
pub mod scenario;
pub mod session;

//! Tabular empirical MDP, value-iteration solver and persistence.

mod explore;
mod format;
mod key;
mod model;
mod policy;
mod similarity;
mod solver;

pub use explore::{explore_base, ExploreConfig, ExploreResult};
pub use format::{
    parse_policy_record, read_model, read_policy, write_model, write_policy, write_policy_records, PolicyFile,
    MODEL_FORMAT_VERSION, POLICY_FORMAT_VERSION,
};
pub use key::StateKey;
pub use model::{EmpiricalModel, PairStats};
pub use policy::{Policy, ValueFunction, FALLBACK_ACTION};
pub use similarity::{similar_states, similarity_bounds, SIMILARITY_BAND};
pub use solver::{q_value, solve, solve_from, Solution, SolverConfig};

#[cfg(test)]
pub(crate) mod testing {
    use super::StateKey;
    use crate::env::{Distance, FeatureState, Tile};

    /// A distinct valid state per index (up to 4^9), optionally terminal.
    pub fn state(i: usize, dead: bool) -> StateKey {
        let mut boxes = [Tile::Air; 9];
        let mut n = i;
        for b in boxes.iter_mut() {
            *b = Tile::ALL[n % 4];
            n /= 4;
        }
        assert_eq!(n, 0, "index {i} too large");
        StateKey::from(FeatureState {
            boxes,
            can_jump: !dead,
            on_ground: !dead,
            is_dead: dead,
            is_cliff_near: false,
            any_x_progress: false,
            any_y_progress: false,
            enemy_distance_x: Distance::No,
            enemy_distance_y: Distance::No,
        })
    }
}

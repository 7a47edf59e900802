use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::{featurize, step, Action, Level, RewardSelector, WorldState};
use crate::error::SolveError;

use super::{solve_from, EmpiricalModel, Policy, SolverConfig, StateKey, ValueFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct ExploreConfig {
    pub total_steps: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub resolve_every: usize,
    /// Episodes are cut after this many steps.
    pub episode_cap: usize,
    pub solver: SolverConfig,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        ExploreConfig {
            total_steps: 20_000,
            epsilon: 0.2,
            seed: 0,
            resolve_every: 500,
            episode_cap: 300,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExploreResult {
    pub model: EmpiricalModel,
    pub policy: Policy,
    pub values: ValueFunction,
    pub episodes: usize,
    pub action_counts: [u64; Action::COUNT],
}

/// Epsilon-greedy exploration of `level` from its spawn, re-solving the model
/// every `resolve_every` steps. Deterministic for a given seed.
pub fn explore_base(level: &Level, config: &ExploreConfig) -> Result<ExploreResult, SolveError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = EmpiricalModel::new();
    let mut policy = Policy::new();
    let mut values = ValueFunction::new();
    let mut action_counts = [0u64; Action::COUNT];
    let mut episodes = 1;

    let mut world = WorldState::spawn(level);
    let mut episode_steps = 0;
    for t in 1..=config.total_steps {
        let s = StateKey::from(featurize(&world, level));
        let a = if rng.gen::<f64>() < config.epsilon {
            Action::ALL[rng.gen_range(0..Action::COUNT)]
        } else {
            policy.act(&s)
        };
        action_counts[a.index()] += 1;
        let out = step(&world, level, a).expect("exploration never steps a dead world");
        let s2 = StateKey::from(featurize(&out.world, level));
        model.record_transition(&s, a, &s2, &out.rewards);
        episode_steps += 1;

        if out.is_terminal() || episode_steps >= config.episode_cap {
            world = WorldState::spawn(level);
            episode_steps = 0;
            episodes += 1;
        } else {
            world = out.world;
        }

        if t % config.resolve_every == 0 || t == config.total_steps {
            let sol = solve_from(&model, RewardSelector::all(), &config.solver, Some(&values))?;
            policy = sol.policy;
            values = sol.values;
        }
    }
    Ok(ExploreResult { model, policy, values, episodes, action_counts })
}

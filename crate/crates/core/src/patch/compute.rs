use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{featurize, step, Action, Event, Goal, RewardComponents, RewardSelector, StepOutcome};
use crate::error::PatchError;
use crate::mdp::{solve, EmpiricalModel, Policy, SolverConfig, StateKey, ValueFunction};

use super::{FixRequest, Patch, TrainingEnv};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchParams {
    /// Steps at the start of each mini-episode that always take the suggested action.
    pub bias_steps: usize,
    pub psi_start: f64,
    pub psi_increment: f64,
    pub psi_max: f64,
    /// Exploration stops after this many successes...
    pub restart_p: u32,
    /// ...or once failures exceed this.
    pub restart_n: u32,
    pub episode_cap: usize,
    pub step_budget: usize,
    pub window: usize,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl Default for PatchParams {
    fn default() -> Self {
        PatchParams {
            bias_steps: 4,
            psi_start: 0.2,
            psi_increment: 0.05,
            psi_max: 1.0,
            restart_p: 3,
            restart_n: 40,
            episode_cap: 100,
            step_budget: 20_000,
            window: super::TRAINING_WINDOW,
            seed: 0,
            solver: SolverConfig::default(),
        }
    }
}

impl PatchParams {
    /// Exploration rate after `failures` failed mini-episodes.
    pub fn psi(&self, failures: u32) -> f64 {
        (self.psi_start + self.psi_increment * f64::from(failures)).min(self.psi_max)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PatchStats {
    pub successes: u32,
    pub failures: u32,
    pub exploration_steps: usize,
    pub episodes: u32,
    pub final_psi: f64,
    pub wall_time_ms: u64,
}

/// The first `bias_steps` steps of a mini-episode take `a_fix`; after that a
/// uniformly random action with probability `psi`, else the policy's action.
pub fn select_action_biased<R: Rng + ?Sized>(
    step_i: usize,
    bias_steps: usize,
    psi: f64,
    policy: &Policy,
    s: &StateKey,
    a_fix: Action,
    rng: &mut R,
) -> Action {
    if step_i <= bias_steps {
        a_fix
    } else if rng.gen::<f64>() < psi {
        Action::ALL[rng.gen_range(0..Action::COUNT)]
    } else {
        policy.act(s)
    }
}

/// Only the goal's component counts; death included, everything else is zero.
pub fn shaped_reward(components: &RewardComponents, goal: Goal) -> f64 {
    RewardSelector::only(goal).apply(components)
}

pub fn goal_achieved(goal: Goal, out: &StepOutcome) -> bool {
    out.world.alive
        && match goal {
            Goal::KillEnemy => out.events.contains(&Event::KilledEnemy),
            Goal::CollectCoin => out.events.contains(&Event::CollectedCoin),
            Goal::MakeProgressInX => out.events.contains(&Event::ReachedFinish),
        }
}

/// Explores `env` with biased action selection until the goal has been reached
/// `restart_p` times or failures exceed `restart_n`, then solves the collected
/// model under goal-only reward.
///
/// The returned patch keeps only states from which the goal is reachable
/// (positive value); elsewhere the goal-only policy has nothing to say.
pub fn compute_patch(
    env: &TrainingEnv,
    request: &FixRequest,
    base: &Policy,
    params: &PatchParams,
) -> Result<Patch, PatchError> {
    request.validate()?;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut model = EmpiricalModel::new();
    let mut stats = PatchStats { final_psi: params.psi(0), episodes: 1, ..Default::default() };
    let mut world = env.start.clone();
    let mut step_i = 0;

    while stats.exploration_steps < params.step_budget {
        step_i += 1;
        stats.exploration_steps += 1;
        let psi = params.psi(stats.failures);
        let s = StateKey::from(featurize(&world, &env.level));
        let a = select_action_biased(step_i, params.bias_steps, psi, base, &s, request.action, &mut rng);
        let out = step(&world, &env.level, a).expect("mini-episodes restart before stepping a dead world");
        let s2 = StateKey::from(featurize(&out.world, &env.level));
        model.record_transition(&s, a, &s2, &out.rewards);

        let restart = if goal_achieved(request.goal, &out) {
            stats.successes += 1;
            true
        } else if out.is_terminal() || step_i >= params.episode_cap {
            stats.failures += 1;
            true
        } else {
            false
        };
        if stats.successes >= params.restart_p || stats.failures > params.restart_n {
            break;
        }
        if restart {
            world = env.start.clone();
            step_i = 0;
            stats.episodes += 1;
        } else {
            world = out.world;
        }
    }
    stats.final_psi = params.psi(stats.failures);
    stats.wall_time_ms = started.elapsed().as_millis() as u64;
    if stats.successes == 0 {
        return Err(PatchError::PatchFailed(stats));
    }

    let sol = solve(&model, RewardSelector::only(request.goal), &params.solver)?;
    let useful: Vec<(StateKey, f64)> = sol.values.iter().filter(|(_, v)| *v > 0.0).map(|(k, v)| (k.clone(), v)).collect();
    let pi_fix: Policy = useful.iter().filter_map(|(k, _)| sol.policy.get(k).map(|a| (k.clone(), a))).collect();
    let v_fix: ValueFunction = useful.into_iter().collect();
    stats.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(Patch {
        id: 0,
        goal: request.goal,
        action: request.action,
        predicate: request.predicate(),
        pi_fix,
        v_fix,
        stats,
    })
}

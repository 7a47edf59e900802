use crate::env::{featurize, step, Action, Goal, Level, RewardComponents, WorldState};
use crate::error::ExplainError;
use crate::mdp::{Policy, StateKey, ValueFunction};

#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    /// Undiscounted per-component totals.
    pub totals: RewardComponents,
    /// Discounted return, bootstrapped with `V(final)` when the rollout did not end.
    pub discounted: f64,
    pub died: bool,
    /// 1-based step at which the agent died.
    pub death_step: Option<usize>,
    pub steps: usize,
    pub last: WorldState,
}

/// Simulates `horizon` steps: `first` (if any) then the policy. Stops early on
/// death or on reaching the finish.
pub fn rollout(
    level: &Level,
    world: &WorldState,
    first: Option<Action>,
    policy: &Policy,
    horizon: usize,
    gamma: f64,
    values: Option<&ValueFunction>,
) -> Result<Rollout, ExplainError> {
    if !world.alive {
        return Err(ExplainError::TerminalState);
    }
    let mut w = world.clone();
    let mut totals = RewardComponents::default();
    let mut discounted = 0.0;
    let mut discount = 1.0;
    let mut death_step = None;
    let mut ended = false;
    let mut steps = 0;
    for t in 0..horizon {
        let a = match (t, first) {
            (0, Some(a)) => a,
            _ => policy.act(&StateKey::from(featurize(&w, level))),
        };
        let out = step(&w, level, a).expect("rollout only steps living worlds");
        steps += 1;
        totals += out.rewards;
        discounted += discount * out.rewards.total();
        discount *= gamma;
        ended = out.is_terminal();
        w = out.world;
        if !w.alive {
            death_step = Some(t + 1);
        }
        if ended {
            break;
        }
    }
    if !ended {
        if let Some(v) = values {
            discounted += discount * v.get(&StateKey::from(featurize(&w, level))).unwrap_or(0.0);
        }
    }
    Ok(Rollout { totals, discounted, died: death_step.is_some(), death_step, steps, last: w })
}

/// The positive component that accrues most over a policy rollout; ties go to
/// the earlier goal and an all-zero rollout yields `MakeProgressInX`.
pub fn next_subgoal(level: &Level, world: &WorldState, policy: &Policy, horizon: usize) -> Result<Goal, ExplainError> {
    let r = rollout(level, world, None, policy, horizon, 1.0, None)?;
    Ok(dominant_goal(&r.totals))
}

pub fn dominant_goal(totals: &RewardComponents) -> Goal {
    let mut best = Goal::MakeProgressInX;
    let mut best_value = 0.0;
    for g in Goal::ALL {
        if totals.goal(g) > best_value {
            best = g;
            best_value = totals.goal(g);
        }
    }
    best
}

/// Highest near-future total reward among the actions the policy does not take.
pub fn second_best_action(
    level: &Level,
    world: &WorldState,
    policy: &Policy,
    horizon: usize,
) -> Result<Action, ExplainError> {
    let chosen = policy.act(&StateKey::from(featurize(world, level)));
    let mut best: Option<(Action, f64)> = None;
    for a in Action::ALL.into_iter().filter(|a| *a != chosen) {
        let total = rollout(level, world, Some(a), policy, horizon, 1.0, None)?.totals.total();
        if best.is_none_or(|(_, b)| total > b) {
            best = Some((a, total));
        }
    }
    Ok(best.expect("nine alternatives").0)
}

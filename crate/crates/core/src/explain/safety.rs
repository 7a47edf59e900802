use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::env::{Action, Level, WorldState};
use crate::error::ExplainError;
use crate::mdp::{EmpiricalModel, Policy, StateKey};

use super::rollout::rollout;

/// Probability of being in a negative state above which an action is dangerous.
pub const DANGER_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SafetyLabel {
    Safe,
    Dangerous,
}

impl SafetyLabel {
    pub fn word(self) -> &'static str {
        match self {
            SafetyLabel::Safe => "safe",
            SafetyLabel::Dangerous => "dangerous",
        }
    }

    pub fn from_probability(p_negative: f64) -> SafetyLabel {
        if p_negative > DANGER_THRESHOLD {
            SafetyLabel::Dangerous
        } else {
            SafetyLabel::Safe
        }
    }
}

/// Mean, over the `horizon` steps after taking `a` in `s` and then following the
/// policy, of the probability of being in a negative state.
///
/// Uses the learned model when `(s, a)` has been visited: the state
/// distribution is pushed forward through the empirical transitions, with
/// unvisited pairs staying put and terminal states absorbing. Otherwise falls
/// back to a deterministic simulator rollout from `sim`, if given.
pub fn safety_label(
    model: &EmpiricalModel,
    policy: &Policy,
    s: &StateKey,
    a: Action,
    horizon: usize,
    sim: Option<(&Level, &WorldState)>,
) -> Result<(SafetyLabel, f64), ExplainError> {
    let p = if model.visits(s, a) > 0 {
        model_negative_mass(model, policy, s, a, horizon)
    } else if let Some((level, world)) = sim {
        let r = rollout(level, world, Some(a), policy, horizon, 1.0, None)?;
        match r.death_step {
            Some(t) => (horizon + 1 - t) as f64 / horizon as f64,
            None => 0.0,
        }
    } else {
        return Err(ExplainError::NoEvidence(a));
    };
    Ok((SafetyLabel::from_probability(p), p))
}

fn model_negative_mass(model: &EmpiricalModel, policy: &Policy, s: &StateKey, a: Action, horizon: usize) -> f64 {
    let mut dist: BTreeMap<StateKey, f64> = model.successors(s, a).into_iter().collect();
    let mut total = 0.0;
    for t in 1..=horizon {
        total += dist.iter().filter(|(k, _)| model.is_negative(k)).map(|(_, p)| p).sum::<f64>();
        if t == horizon {
            break;
        }
        let mut next = BTreeMap::new();
        for (k, p) in dist {
            let succ = if k.is_terminal() { Vec::new() } else { model.successors(&k, policy.act(&k)) };
            if succ.is_empty() {
                *next.entry(k).or_insert(0.0) += p;
            } else {
                for (k2, q) in succ {
                    *next.entry(k2).or_insert(0.0) += p * q;
                }
            }
        }
        dist = next;
    }
    (total / horizon as f64).clamp(0.0, 1.0)
}

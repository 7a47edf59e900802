//! Value iteration over an [`EmpiricalModel`].
//!
//! Unvisited (state, action) pairs behave as a zero-reward self-loop, so every
//! action has a well-defined value. Terminal states are pinned to zero.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::env::{Action, RewardSelector};
use crate::error::SolveError;

use super::{EmpiricalModel, Policy, StateKey, ValueFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub gamma: f64,
    /// Stop once the largest per-state change in a sweep is below this.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { gamma: 0.95, tolerance: 1e-8, max_sweeps: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub policy: Policy,
    pub values: ValueFunction,
    pub sweeps: usize,
    /// Bellman residual of the returned values.
    pub residual: f64,
}

struct Backup {
    reward: f64,
    successors: Vec<(usize, f64)>,
}

/// Dense, index-based view of a model under one reward selection.
struct Tables {
    keys: Vec<StateKey>,
    terminal: Vec<bool>,
    backups: Vec<[Option<Backup>; Action::COUNT]>,
}

impl Tables {
    fn build(model: &EmpiricalModel, selector: RewardSelector) -> Tables {
        let keys: Vec<StateKey> = model.states().into_iter().collect();
        let index: HashMap<&StateKey, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let terminal = keys.iter().map(StateKey::is_terminal).collect();
        let mut backups: Vec<[Option<Backup>; Action::COUNT]> =
            (0..keys.len()).map(|_| std::array::from_fn(|_| None)).collect();
        for ((s, a), stats) in model.pairs() {
            let n = stats.visits as f64;
            let successors = stats.successors.iter().map(|(k, c)| (index[k], *c as f64 / n)).collect();
            backups[index[s]][a.index()] = Some(Backup { reward: selector.apply(&stats.mean_reward), successors });
        }
        Tables { keys, terminal, backups }
    }

    fn q(&self, i: usize, a: usize, v: &[f64], gamma: f64) -> f64 {
        match &self.backups[i][a] {
            Some(b) => b.reward + gamma * b.successors.iter().map(|(j, p)| p * v[*j]).sum::<f64>(),
            None => gamma * v[i],
        }
    }

    fn best(&self, i: usize, v: &[f64], gamma: f64) -> (usize, f64) {
        let mut best = (0, self.q(i, 0, v, gamma));
        for a in 1..Action::COUNT {
            let q = self.q(i, a, v, gamma);
            // Strict comparison keeps the earliest action on ties.
            if q > best.1 {
                best = (a, q);
            }
        }
        best
    }
}

pub fn solve(model: &EmpiricalModel, selector: RewardSelector, config: &SolverConfig) -> Result<Solution, SolveError> {
    solve_from(model, selector, config, None)
}

/// Like [`solve`], starting from `initial` values where available.
pub fn solve_from(
    model: &EmpiricalModel,
    selector: RewardSelector,
    config: &SolverConfig,
    initial: Option<&ValueFunction>,
) -> Result<Solution, SolveError> {
    if model.is_empty() {
        return Err(SolveError::EmptyModel);
    }
    if !(0.0..1.0).contains(&config.gamma) {
        return Err(SolveError::BadDiscount(config.gamma));
    }
    let t = Tables::build(model, selector);
    let n = t.keys.len();
    let mut v: Vec<f64> = match initial {
        Some(init) => t
            .keys
            .iter()
            .zip(&t.terminal)
            .map(|(k, term)| if *term { 0.0 } else { init.get(k).unwrap_or(0.0) })
            .collect(),
        None => vec![0.0; n],
    };
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut sweeps = 0;
    while sweeps < config.max_sweeps {
        sweeps += 1;
        residual = 0.0;
        for i in 0..n {
            next[i] = if t.terminal[i] { 0.0 } else { t.best(i, &v, config.gamma).1 };
            residual = f64::max(residual, (next[i] - v[i]).abs());
        }
        std::mem::swap(&mut v, &mut next);
        if residual < config.tolerance {
            break;
        }
    }
    if residual >= config.tolerance {
        return Err(SolveError::NotConverged { sweeps, residual });
    }

    let mut policy = Policy::new();
    let mut values = ValueFunction::new();
    let mut final_residual: f64 = 0.0;
    for i in 0..n {
        let (a, q) = t.best(i, &v, config.gamma);
        let backed_up = if t.terminal[i] { 0.0 } else { q };
        final_residual = final_residual.max((backed_up - v[i]).abs());
        policy.insert(t.keys[i].clone(), Action::ALL[a]);
        values.insert(t.keys[i].clone(), v[i]);
    }
    Ok(Solution { policy, values, sweeps, residual: final_residual })
}

/// Q(s, a) under the model and a value function, using the solver's conventions.
pub fn q_value(
    model: &EmpiricalModel,
    selector: RewardSelector,
    gamma: f64,
    values: &ValueFunction,
    s: &StateKey,
    a: Action,
) -> f64 {
    let v = |k: &StateKey| values.get(k).unwrap_or(0.0);
    match model.stats(s, a) {
        Some(stats) => {
            let n = stats.visits as f64;
            selector.apply(&stats.mean_reward)
                + gamma * stats.successors.iter().map(|(k, c)| *c as f64 / n * v(k)).sum::<f64>()
        }
        None => gamma * v(s),
    }
}

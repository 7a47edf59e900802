//! Independent reference implementations.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use patchbot_core::env::{Action, Goal, RewardComponents, RewardSelector, Tile};
use patchbot_core::mdp::{solve, EmpiricalModel, Policy, SolverConfig, StateKey, ValueFunction};
use patchbot_core::patch::{apply_patch, Assignment, Patch, PatchStats, Predicate};
use patchbot_core::env::{FeatureValue, Variable};

use super::state;

const GAMMA: f64 = 0.95;

pub fn random_model(seed: u64) -> EmpiricalModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=8);
    let keys: Vec<StateKey> = (0..n).map(|i| state(i, i > 0 && rng.gen_bool(0.15))).collect();
    let mut model = EmpiricalModel::new();
    for s in keys.iter().filter(|k| !k.is_terminal()) {
        for a in Action::ALL {
            if !rng.gen_bool(0.6) {
                continue;
            }
            for _ in 0..rng.gen_range(1..=5) {
                let next = &keys[rng.gen_range(0..n)];
                let r = RewardComponents {
                    make_progress_in_x: rng.gen_range(-3.0..3.0),
                    kill_enemy: if rng.gen_bool(0.1) { 5.0 } else { 0.0 },
                    ..Default::default()
                };
                model.record_transition(s, a, next, &r);
            }
        }
    }
    model
}

/// Expected reward and successor distribution of (s, a) rebuilt from raw
/// counts; unvisited pairs stay put with no reward.
fn dynamics(model: &EmpiricalModel, keys: &[StateKey], i: usize, a: Action) -> (f64, DVector<f64>) {
    let n = keys.len();
    let mut p = DVector::zeros(n);
    match model.stats(&keys[i], a) {
        None => {
            p[i] = 1.0;
            (0.0, p)
        }
        Some(stats) => {
            let visits = stats.visits as f64;
            for (k, c) in &stats.successors {
                let j = keys.iter().position(|x| x == k).unwrap();
                p[j] += *c as f64 / visits;
            }
            (stats.mean_reward.total(), p)
        }
    }
}

/// Howard policy iteration with exact linear solves.
pub fn policy_iteration(model: &EmpiricalModel) -> (Vec<StateKey>, Vec<f64>, Vec<Action>) {
    let keys: Vec<StateKey> = model.states().into_iter().collect();
    let n = keys.len();
    let mut pi = vec![Action::ALL[0]; n];
    for _ in 0..200 {
        let mut m = DMatrix::identity(n, n);
        let mut rhs = DVector::zeros(n);
        for i in 0..n {
            if keys[i].is_terminal() {
                continue;
            }
            let (r, p) = dynamics(model, &keys, i, pi[i]);
            for j in 0..n {
                m[(i, j)] -= GAMMA * p[j];
            }
            rhs[i] = r;
        }
        let v = m.lu().solve(&rhs).expect("I - gamma P is invertible");
        let q = |i: usize, a: Action| {
            let (r, p) = dynamics(model, &keys, i, a);
            r + GAMMA * p.dot(&v)
        };
        let mut next = pi.clone();
        for (i, slot) in next.iter_mut().enumerate() {
            let best = Action::ALL.iter().map(|a| q(i, *a)).fold(f64::NEG_INFINITY, f64::max);
            // Earliest action within rounding of the best.
            let canonical = Action::ALL.into_iter().find(|a| q(i, *a) >= best - 1e-9).unwrap();
            if q(i, *slot) < best - 1e-9 || canonical.index() < slot.index() {
                *slot = canonical;
            }
        }
        if next == pi {
            let values = (0..n).map(|i| v[i]).collect();
            return (keys, values, pi);
        }
        pi = next;
    }
    panic!("policy iteration did not settle");
}

pub fn check_solver(seed: u64) -> Result<(), String> {
    let model = random_model(seed);
    let sol = solve(&model, RewardSelector::all(), &SolverConfig::default()).map_err(|e| e.to_string())?;
    let (keys, values, pi) = policy_iteration(&model);
    if sol.policy.len() != keys.len() {
        return Err(format!("seed {seed}: {} policy entries for {} states", sol.policy.len(), keys.len()));
    }
    for (i, k) in keys.iter().enumerate() {
        let v = sol.values.get(k).unwrap();
        if (v - values[i]).abs() > 1e-6 {
            return Err(format!("seed {seed}: V({i}) = {v}, oracle {}", values[i]));
        }
        if sol.policy.get(k) != Some(pi[i]) {
            return Err(format!("seed {seed}: pi({i}) = {:?}, oracle {:?}", sol.policy.get(k), pi[i]));
        }
    }
    Ok(())
}

fn random_patch(rng: &mut ChaCha8Rng, predicate: Predicate, pool: usize) -> Patch {
    let mut pi_fix = Policy::new();
    let mut v_fix = ValueFunction::new();
    for _ in 0..rng.gen_range(0..pool) {
        let k = state(rng.gen_range(0..pool * 2), false);
        pi_fix.insert(k.clone(), Action::ALL[rng.gen_range(0..Action::COUNT)]);
        v_fix.insert(k, rng.gen_range(0.1..20.0));
    }
    Patch { id: 1, goal: Goal::KillEnemy, action: Action::JumpRight, predicate, pi_fix, v_fix, stats: PatchStats::default() }
}

/// Box1 is air for indices divisible by 4, Box2 is pipe when (i / 4) % 4 == 2.
fn predicate() -> Predicate {
    Predicate(vec![
        Assignment::new(Variable::Box1Type, FeatureValue::Tile(Tile::Air)),
        Assignment::new(Variable::Box2Type, FeatureValue::Tile(Tile::Pipe)),
    ])
}

pub fn check_merge(seed: u64, n: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let policy: Policy = (0..n).map(|i| (state(i, false), Action::ALL[rng.gen_range(0..Action::COUNT)])).collect();
    let values: ValueFunction = (0..n).map(|i| (state(i, false), rng.gen_range(-20.0..20.0))).collect();
    let patch = random_patch(&mut rng, predicate(), n);
    let (p2, v2) = apply_patch(&policy, &values, &patch);

    let matches = |k: &StateKey| {
        let f = k.features().unwrap();
        f.boxes[0] == Tile::Air && f.boxes[1] == Tile::Pipe
    };
    let relevant: BTreeSet<StateKey> =
        policy.keys().chain(patch.pi_fix.keys()).filter(|k| matches(k)).cloned().collect();
    let all: BTreeSet<StateKey> = policy.keys().chain(p2.keys()).cloned().collect();
    for k in &all {
        let inside = relevant.contains(k);
        let want_action = match (inside, patch.pi_fix.get(k)) {
            (true, Some(a)) => Some(a),
            _ => policy.get(k),
        };
        if p2.get(k) != want_action {
            return Err(format!("action at {k}: {:?} vs {want_action:?}", p2.get(k)));
        }
        let want_value = match (inside, patch.v_fix.get(k)) {
            (true, Some(vf)) => Some(values.get(k).unwrap_or(0.0) + 0.1 * vf),
            _ => values.get(k),
        };
        match (v2.get(k), want_value) {
            (Some(a), Some(b)) if (a - b).abs() <= 1e-12 => {}
            (None, None) => {}
            (a, b) => return Err(format!("value at {k}: {a:?} vs {b:?}")),
        }
    }
    let changed: BTreeSet<StateKey> = all
        .iter()
        .filter(|k| p2.get(k) != policy.get(k) || v2.get(k) != values.get(k))
        .cloned()
        .collect();
    if !changed.is_subset(&relevant) {
        return Err("changes outside the relevant set".into());
    }
    Ok(())
}


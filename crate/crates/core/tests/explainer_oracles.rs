mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use patchbot_core::env::{featurize, step, Action, Distance, FeatureState, FeatureValue, Level, Tile, Variable, WorldState, HORIZON};
use patchbot_core::explain::{
    counterfactual_feature, dynamics_words, relevant_features, second_best_action, CertaintyWord, RelevanceMode,
    RelevantFeature,
};
use patchbot_core::mdp::{similar_states, Policy, StateKey, ValueFunction};
use patchbot_core::scenario::{SCENARIOS, TRAINING_LEVEL};

use common::features;

// Word table.

fn expected_word(p: f64) -> CertaintyWord {
    use CertaintyWord::*;
    match p {
        p if p > 0.9 => Certain,
        p if p > 0.75 => AlmostCertain,
        p if p > 0.55 => Probable,
        p if p > 0.45 => ChancesAreEven,
        p if p > 0.25 => ProbablyNot,
        p if p > 0.10 => AlmostCertainlyNot,
        _ => Impossible,
    }
}

#[test]
fn word_table_boundaries() {
    use CertaintyWord::*;
    let table = [
        (0.0, Impossible, Impossible),
        (0.10, Impossible, AlmostCertainlyNot),
        (0.25, AlmostCertainlyNot, ProbablyNot),
        (0.45, ProbablyNot, ChancesAreEven),
        (0.55, ChancesAreEven, Probable),
        (0.75, Probable, AlmostCertain),
        (0.9, AlmostCertain, Certain),
    ];
    for (b, at, above) in table {
        assert_eq!(dynamics_words(b).unwrap(), at, "p = {b}");
        assert_eq!(dynamics_words(b + 1e-9).unwrap(), above, "p = {b} + 1e-9");
        if b > 0.0 {
            assert_eq!(dynamics_words(b - 1e-9).unwrap(), at, "p = {b} - 1e-9");
        }
    }
    assert_eq!(dynamics_words(1.0).unwrap(), Certain);
    assert_eq!(dynamics_words(1.0 - 1e-9).unwrap(), Certain);
    assert!(dynamics_words(1.0 + 1e-9).is_err());
    assert!(dynamics_words(-1e-9).is_err());
}

#[test]
fn word_texts() {
    let texts: Vec<&str> = CertaintyWord::ALL.iter().map(|w| w.text()).collect();
    assert_eq!(
        texts,
        ["certain", "almost certain", "probable", "changes are even", "probably not", "almost certainly not", "impossible"]
    );
}

proptest! {
    #[test]
    fn words_partition_the_unit_interval(p in 0.0f64..=1.0) {
        prop_assert_eq!(dynamics_words(p).unwrap(), expected_word(p));
    }
}

// Similarity band.

fn in_band(v_ref: f64, v: f64) -> bool {
    let mut values = ValueFunction::new();
    let r = StateKey::from(features(0, false));
    let k = StateKey::from(features(1, false));
    values.insert(r.clone(), v_ref);
    values.insert(k.clone(), v);
    similar_states(&values, &r).unwrap().contains(&k)
}

#[test]
fn similarity_band_edges() {
    let eps = 1e-9;
    for v_ref in [1.0, 10.0, 37.5, 250.0, -1.0, -10.0, -42.0] {
        let (lo, hi) = if v_ref > 0.0 { (1.0 - 0.05, 1.0 + 0.05) } else { (1.0 + 0.05, 1.0 - 0.05) };
        assert!(in_band(v_ref, v_ref * lo), "{v_ref}: lower edge");
        assert!(in_band(v_ref, v_ref * hi), "{v_ref}: upper edge");
        let (lo_out, hi_out) =
            if v_ref > 0.0 { (1.0 - (0.05 + eps), 1.0 + 0.05 + eps) } else { (1.0 + 0.05 + eps, 1.0 - (0.05 + eps)) };
        assert!(!in_band(v_ref, v_ref * lo_out), "{v_ref}: below");
        assert!(!in_band(v_ref, v_ref * hi_out), "{v_ref}: above");
    }
    for v_ref in [0.0, 0.5, -0.5, 0.99] {
        assert!(in_band(v_ref, v_ref - 0.05) && in_band(v_ref, v_ref + 0.05), "{v_ref}");
        assert!(!in_band(v_ref, v_ref - 0.05 - eps) && !in_band(v_ref, v_ref + 0.05 + eps), "{v_ref}");
    }
}

// Relevant features.

/// States that differ from a base state in a few variables only.
fn toy_state(box6: usize, dx: usize, can_jump: bool) -> FeatureState {
    let mut f = features(0, false);
    f.boxes[5] = Tile::ALL[box6];
    f.enemy_distance_x = Distance::ALL[dx];
    f.can_jump = can_jump;
    f
}

fn toy_world(seed: u64) -> (StateKey, Policy, ValueFunction) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = [10.0, 10.3, 9.6, 9.4, 11.0, 0.02, 0.0];
    let mut policy = Policy::new();
    let mut values = ValueFunction::new();
    let mut keys = Vec::new();
    for _ in 0..rng.gen_range(1..20) {
        let f = toy_state(rng.gen_range(0..4), rng.gen_range(0..7), rng.gen_bool(0.5));
        let k = StateKey::from(f);
        policy.insert(k.clone(), if rng.gen_bool(0.6) { Action::RunRight } else { Action::WalkLeft });
        values.insert(k.clone(), pool[rng.gen_range(0..pool.len())]);
        keys.push(k);
    }
    let s = keys[rng.gen_range(0..keys.len())].clone();
    (s, policy, values)
}

fn relevance_oracle(s: &StateKey, values: &ValueFunction, policy: &Policy, informative: bool) -> Vec<RelevantFeature> {
    let own = s.features().unwrap();
    let v_ref = values.get(s).unwrap();
    let half_width = if v_ref.abs() < 1.0 { 0.05 } else { 0.05 * v_ref.abs() };
    let band: Vec<(FeatureState, Action)> = values
        .iter()
        .filter(|(_, v)| (v - v_ref).abs() <= half_width + 1e-12)
        .map(|(k, _)| (k.features().unwrap(), policy.act(k)))
        .collect();
    let action = policy.act(s);
    let mut out: Vec<RelevantFeature> = Vec::new();
    let universal = |v: Variable| band.iter().all(|(f, _)| f.get(v) == own.get(v));
    let n_universal = Variable::ALL.iter().filter(|v| universal(**v)).count();
    for var in Variable::ALL {
        if informative && 17 - n_universal >= 2 && universal(var) {
            continue;
        }
        let count = band.iter().filter(|(f, a)| *a == action && f.get(var) == own.get(var)).count();
        out.push(RelevantFeature { variable: var, value: own.get(var), count });
    }
    // Selection by hand: highest count, earliest variable on ties.
    let mut picked = Vec::new();
    for _ in 0..2 {
        let best = out.iter().map(|r| r.count).max().unwrap();
        let i = out.iter().position(|r| r.count == best).unwrap();
        picked.push(out.remove(i));
    }
    picked
}

#[test]
fn relevance_matches_brute_force() {
    for seed in 0..300 {
        let (s, policy, values) = toy_world(seed);
        for (mode, informative) in [(RelevanceMode::Literal, false), (RelevanceMode::Informative, true)] {
            let got = relevant_features(&s, &values, &policy, mode).unwrap();
            assert_eq!(got.to_vec(), relevance_oracle(&s, &values, &policy, informative), "seed {seed} {mode:?}");
        }
    }
}

proptest! {
    #[test]
    fn relevance_returns_two_ranked_entries(seed in any::<u64>()) {
        let (s, policy, values) = toy_world(seed);
        let [a, b] = relevant_features(&s, &values, &policy, RelevanceMode::Informative).unwrap();
        prop_assert!(a.count >= b.count);
        prop_assert!(a.count >= 1);
        prop_assert_ne!(a.variable, b.variable);
        let own = s.features().unwrap();
        prop_assert_eq!(own.get(a.variable), a.value);
        prop_assert_eq!(own.get(b.variable), b.value);
    }
}

// Counterfactual.

fn counterfactual_oracle(s: &StateKey, a_user: Action, policy: &Policy) -> Option<(Variable, FeatureValue)> {
    let own = s.features().unwrap();
    let mut hits = Vec::new();
    for (vi, var) in Variable::ALL.into_iter().enumerate() {
        for (di, val) in var.domain().into_iter().enumerate() {
            if val == own.get(var) {
                continue;
            }
            if policy.get(&StateKey::from(own.with(var, val).unwrap())) == Some(a_user) {
                hits.push(((vi, di), (var, val)));
            }
        }
    }
    hits.into_iter().min_by_key(|(order, _)| *order).map(|(_, hit)| hit)
}

proptest! {
    #[test]
    fn counterfactual_matches_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = StateKey::from(toy_state(0, 0, true));
        let own = s.features().unwrap();
        let mut policy = Policy::new();
        policy.insert(s.clone(), Action::RunRight);
        // One- and two-variable mutations with random actions.
        for _ in 0..rng.gen_range(0..12) {
            let mut f = own;
            for _ in 0..rng.gen_range(1..=2) {
                let var = Variable::ALL[rng.gen_range(0..17)];
                let dom = var.domain();
                f = f.with(var, dom[rng.gen_range(0..dom.len())]).unwrap();
            }
            let a = [Action::JumpRight, Action::WalkLeft, Action::RunRight][rng.gen_range(0..3)];
            policy.insert(StateKey::from(f), a);
        }
        for a in [Action::JumpRight, Action::WalkLeft] {
            prop_assert_eq!(counterfactual_feature(&s, a, &policy), counterfactual_oracle(&s, a, &policy));
        }
    }
}

// Second best action.

/// Total reward of taking `first` then following `policy`, `horizon` steps in
/// all, ending early on death or at the finish.
fn near_future(level: &Level, world: &WorldState, first: Action, policy: &Policy, horizon: usize) -> f64 {
    let mut w = world.clone();
    let mut total = 0.0;
    let mut a = first;
    for _ in 0..horizon {
        let out = step(&w, level, a).unwrap();
        total += out.rewards.kill_enemy + out.rewards.collect_coin + out.rewards.make_progress_in_x + out.rewards.die;
        if !out.world.alive || out.world.reached_finish(level) {
            break;
        }
        w = out.world;
        a = policy.act(&StateKey::from(featurize(&w, level)));
    }
    total
}

/// A random policy over states met on a random walk, and a world from that walk.
fn probe(level: &Level, seed: u64) -> (WorldState, Policy) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = WorldState::spawn(level);
    let mut policy = Policy::new();
    let mut visited = vec![w.clone()];
    for _ in 0..60 {
        let k = StateKey::from(featurize(&w, level));
        if !policy.contains(&k) {
            policy.insert(k.clone(), Action::ALL[rng.gen_range(0..Action::COUNT)]);
        }
        let out = step(&w, level, policy.act(&k)).unwrap();
        if !out.world.alive || out.world.reached_finish(level) {
            break;
        }
        w = out.world;
        visited.push(w.clone());
    }
    (visited[rng.gen_range(0..visited.len())].clone(), policy)
}

fn levels() -> Vec<Level> {
    let mut out = vec![Level::parse(TRAINING_LEVEL).unwrap()];
    out.extend(SCENARIOS.iter().map(|s| s.level()));
    out
}

#[test]
fn second_best_matches_exhaustive_rollouts() {
    for (li, level) in levels().iter().enumerate() {
        for seed in 0..40 {
            let (w, policy) = probe(level, seed);
            let chosen = policy.act(&StateKey::from(featurize(&w, level)));
            let scores: Vec<(Action, f64)> =
                Action::ALL.into_iter().map(|a| (a, near_future(level, &w, a, &policy, HORIZON))).collect();
            let mut expected = None;
            for (a, r) in scores.iter().filter(|(a, _)| *a != chosen) {
                if expected.is_none_or(|(_, best)| *r > best) {
                    expected = Some((*a, *r));
                }
            }
            let got = second_best_action(level, &w, &policy, HORIZON).unwrap();
            assert_eq!(got, expected.unwrap().0, "level {li} seed {seed}: {scores:?}");
            assert_ne!(got, chosen);
        }
    }
}

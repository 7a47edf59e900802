use std::collections::{BTreeMap, BTreeSet};

use crate::env::{Action, RewardComponents};

use super::StateKey;

/// Counts and reward means for one (state, action) pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairStats {
    pub visits: u64,
    pub successors: BTreeMap<StateKey, u64>,
    /// Running per-component mean of observed rewards.
    pub mean_reward: RewardComponents,
}

/// Tabular model learned from interaction: transition counts realize T,
/// per-component reward means realize R.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmpiricalModel {
    pairs: BTreeMap<(StateKey, Action), PairStats>,
    /// States entered with a negative total reward.
    negative: BTreeSet<StateKey>,
}

impl EmpiricalModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn record_transition(&mut self, s: &StateKey, a: Action, next: &StateKey, r: &RewardComponents) {
        let stats = self.pairs.entry((s.clone(), a)).or_default();
        stats.visits += 1;
        *stats.successors.entry(next.clone()).or_insert(0) += 1;
        let n = stats.visits as f64;
        let mut mean = stats.mean_reward.as_array();
        for (m, x) in mean.iter_mut().zip(r.as_array()) {
            *m += (x - *m) / n;
        }
        stats.mean_reward = RewardComponents::from_array(mean);
        if r.total() < 0.0 {
            self.negative.insert(next.clone());
        }
    }

    pub fn stats(&self, s: &StateKey, a: Action) -> Option<&PairStats> {
        self.pairs.get(&(s.clone(), a))
    }

    pub fn visits(&self, s: &StateKey, a: Action) -> u64 {
        self.stats(s, a).map_or(0, |p| p.visits)
    }

    pub fn transition_prob(&self, s: &StateKey, a: Action, next: &StateKey) -> f64 {
        match self.stats(s, a) {
            Some(p) => *p.successors.get(next).unwrap_or(&0) as f64 / p.visits as f64,
            None => 0.0,
        }
    }

    /// Successors of (s, a) with their empirical probabilities.
    pub fn successors(&self, s: &StateKey, a: Action) -> Vec<(StateKey, f64)> {
        match self.stats(s, a) {
            Some(p) => p.successors.iter().map(|(k, c)| (k.clone(), *c as f64 / p.visits as f64)).collect(),
            None => Vec::new(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&(StateKey, Action), &PairStats)> {
        self.pairs.iter()
    }

    /// Every state seen as a source or successor, in key order.
    pub fn states(&self) -> BTreeSet<StateKey> {
        let mut out = BTreeSet::new();
        for ((s, _), p) in &self.pairs {
            out.insert(s.clone());
            out.extend(p.successors.keys().cloned());
        }
        out
    }

    /// Undesirable states: entered with negative reward, or terminal.
    pub fn is_negative(&self, s: &StateKey) -> bool {
        self.negative.contains(s) || s.is_terminal()
    }

    pub fn negative_states(&self) -> &BTreeSet<StateKey> {
        &self.negative
    }

    /// Used by persistence to restore a model verbatim.
    pub(crate) fn insert_pair(&mut self, s: StateKey, a: Action, stats: PairStats) {
        self.pairs.insert((s, a), stats);
    }

    pub(crate) fn mark_negative(&mut self, s: StateKey) {
        self.negative.insert(s);
    }
}

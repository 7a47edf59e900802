use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::env::Action;

use super::StateKey;

/// Action taken in states the policy has never seen: keep running forward.
pub const FALLBACK_ACTION: Action = Action::RunRight;

/// Deterministic map from state to action.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy(BTreeMap<StateKey, Action>);

impl Policy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, s: &StateKey) -> Option<Action> {
        self.0.get(s).copied()
    }

    /// The action to execute in `s`, falling back to [`FALLBACK_ACTION`].
    pub fn act(&self, s: &StateKey) -> Action {
        self.get(s).unwrap_or(FALLBACK_ACTION)
    }

    pub fn insert(&mut self, s: StateKey, a: Action) -> Option<Action> {
        self.0.insert(s, a)
    }

    pub fn contains(&self, s: &StateKey) -> bool {
        self.0.contains_key(s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateKey, Action)> {
        self.0.iter().map(|(k, a)| (k, *a))
    }

    pub fn keys(&self) -> impl Iterator<Item = &StateKey> {
        self.0.keys()
    }
}

impl FromIterator<(StateKey, Action)> for Policy {
    fn from_iter<I: IntoIterator<Item = (StateKey, Action)>>(iter: I) -> Self {
        Policy(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValueFunction(BTreeMap<StateKey, f64>);

impl ValueFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, s: &StateKey) -> Option<f64> {
        self.0.get(s).copied()
    }

    pub fn insert(&mut self, s: StateKey, v: f64) -> Option<f64> {
        self.0.insert(s, v)
    }

    pub fn contains(&self, s: &StateKey) -> bool {
        self.0.contains_key(s)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&StateKey, f64)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }
}

impl FromIterator<(StateKey, f64)> for ValueFunction {
    fn from_iter<I: IntoIterator<Item = (StateKey, f64)>>(iter: I) -> Self {
        ValueFunction(iter.into_iter().collect())
    }
}

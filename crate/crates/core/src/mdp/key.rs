use std::fmt;

use serde::{Deserialize, Serialize};

use crate::env::{FeatureState, FeatureValue, Variable};

/// Canonical text form of a [`FeatureState`]: the 17 values comma-joined in
/// variable order. Ordering of keys is plain string ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateKey(String);

impl StateKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn parse(text: &str) -> Option<StateKey> {
        let key = StateKey(text.to_string());
        key.features().map(|_| key)
    }

    pub fn features(&self) -> Option<FeatureState> {
        let parts: Vec<&str> = self.0.split(',').collect();
        if parts.len() != Variable::ALL.len() {
            return None;
        }
        // Start from any state and overwrite every variable.
        let mut state = FeatureState {
            boxes: [crate::env::Tile::Air; 9],
            can_jump: false,
            on_ground: false,
            is_dead: false,
            is_cliff_near: false,
            any_x_progress: false,
            any_y_progress: false,
            enemy_distance_x: crate::env::Distance::No,
            enemy_distance_y: crate::env::Distance::No,
        };
        for (var, text) in Variable::ALL.into_iter().zip(parts) {
            let value = var.domain().into_iter().find(|v| v.name() == text)?;
            state = state.with(var, value)?;
        }
        Some(state)
    }

    /// Terminal states are exactly those with `isDead=yes`.
    pub fn is_terminal(&self) -> bool {
        self.value(Variable::IsDead) == Some(FeatureValue::Flag(true))
    }

    pub fn value(&self, var: Variable) -> Option<FeatureValue> {
        self.features().map(|f| f.get(var))
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&FeatureState> for StateKey {
    fn from(f: &FeatureState) -> StateKey {
        let parts: Vec<&str> = f.values().iter().map(|v| v.name()).collect();
        StateKey(parts.join(","))
    }
}

impl From<FeatureState> for StateKey {
    fn from(f: FeatureState) -> StateKey {
        StateKey::from(&f)
    }
}

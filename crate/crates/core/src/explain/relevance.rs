use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::env::{FeatureValue, Variable};
use crate::error::ExplainError;
use crate::mdp::{similar_states, Policy, StateKey, ValueFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevantFeature {
    pub variable: Variable,
    pub value: FeatureValue,
    pub count: usize,
}

/// How assignments are ranked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceMode {
    /// Plain match counts.
    Literal,
    /// Match counts, skipping assignments that every state in the value band
    /// shares whatever its action. Such assignments (the agent's own cell,
    /// `IsDead=no`) say nothing about why this action was chosen. Falls back to
    /// plain counts when fewer than two assignments survive.
    #[default]
    Informative,
}

/// The two assignments of `s` that appear most often among same-valued states
/// the policy treats like `s`. Ties go to the earlier variable.
pub fn relevant_features(
    s: &StateKey,
    values: &ValueFunction,
    policy: &Policy,
    mode: RelevanceMode,
) -> Result<[RelevantFeature; 2], ExplainError> {
    let own = s.features().ok_or_else(|| ExplainError::UnknownState(s.to_string()))?;
    let band = similar_states(values, s)?;
    let band: Vec<_> = band.iter().filter_map(StateKey::features).collect();
    let action = policy.act(s);
    let same_action: Vec<_> = band.iter().filter(|f| policy.act(&StateKey::from(*f)) == action).collect();

    let mut ranked: Vec<RelevantFeature> = Variable::ALL
        .into_iter()
        .map(|variable| {
            let value = own.get(variable);
            let count = same_action.iter().filter(|f| f.get(variable) == value).count();
            RelevantFeature { variable, value, count }
        })
        .collect();
    if mode == RelevanceMode::Informative {
        let universal: BTreeSet<Variable> = Variable::ALL
            .into_iter()
            .filter(|v| band.iter().all(|f| f.get(*v) == own.get(*v)))
            .collect();
        if Variable::ALL.len() - universal.len() >= 2 {
            ranked.retain(|r| !universal.contains(&r.variable));
        }
    }
    // Stable sort keeps variable order among equal counts.
    ranked.sort_by(|a, b| b.count.cmp(&a.count));
    Ok([ranked[0], ranked[1]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Action, Distance, FeatureState, Tile};

    fn base() -> FeatureState {
        FeatureState {
            boxes: [Tile::Air; 9],
            can_jump: true,
            on_ground: true,
            is_dead: false,
            is_cliff_near: false,
            any_x_progress: false,
            any_y_progress: false,
            enemy_distance_x: Distance::No,
            enemy_distance_y: Distance::No,
        }
    }

    #[test]
    fn singleton_band_gives_first_two_variables() {
        let s = StateKey::from(base());
        let values: ValueFunction = [(s.clone(), 10.0)].into_iter().collect();
        let policy: Policy = [(s.clone(), Action::RunRight)].into_iter().collect();
        for mode in [RelevanceMode::Literal, RelevanceMode::Informative] {
            let [a, b] = relevant_features(&s, &values, &policy, mode).unwrap();
            assert_eq!((a.variable, a.count), (Variable::Box1Type, 1));
            assert_eq!((b.variable, b.count), (Variable::Box2Type, 1));
        }
    }

    #[test]
    fn unknown_state_is_an_error() {
        let s = StateKey::from(base());
        let err = relevant_features(&s, &ValueFunction::new(), &Policy::new(), RelevanceMode::Literal);
        assert!(matches!(err, Err(ExplainError::UnknownState(_))));
    }

    #[test]
    fn other_actions_do_not_count() {
        let s = StateKey::from(base());
        let mut other = base();
        other.boxes[0] = Tile::Platform;
        let other = StateKey::from(other);
        let values: ValueFunction = [(s.clone(), 10.0), (other.clone(), 10.0)].into_iter().collect();
        let policy: Policy = [(s.clone(), Action::RunRight), (other, Action::JumpRight)].into_iter().collect();
        let [a, _] = relevant_features(&s, &values, &policy, RelevanceMode::Literal).unwrap();
        assert_eq!(a.count, 1);
    }
}

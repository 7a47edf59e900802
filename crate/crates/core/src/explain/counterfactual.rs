use crate::env::{Action, FeatureValue, Variable};
use crate::mdp::{Policy, StateKey};

/// First single-variable change to `s` (variables in canonical order, values in
/// declared order) that lands on a known state where the policy picks `a_user`.
pub fn counterfactual_feature(s: &StateKey, a_user: Action, policy: &Policy) -> Option<(Variable, FeatureValue)> {
    let own = s.features()?;
    for var in Variable::ALL {
        for value in var.domain() {
            if value == own.get(var) {
                continue;
            }
            let Some(mutated) = own.with(var, value) else { continue };
            if policy.get(&StateKey::from(mutated)) == Some(a_user) {
                return Some((var, value));
            }
        }
    }
    None
}

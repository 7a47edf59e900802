use std::collections::BTreeSet;

use crate::mdp::{Policy, StateKey, ValueFunction};

use super::{Patch, Predicate};

/// Weight of the patch values when merged into the global value function.
pub const PATCH_VALUE_WEIGHT: f64 = 0.1;

/// Keys of `policy` whose state satisfies every assignment of `predicate`.
pub fn relevant_state_set(policy: &Policy, predicate: &Predicate) -> BTreeSet<StateKey> {
    policy.keys().filter(|k| predicate.matches_key(k)).cloned().collect()
}

impl Patch {
    /// States the patch applies to: matching states of the global policy plus
    /// matching states the patch itself discovered, which the global policy may
    /// never have seen.
    pub fn relevant_states(&self, global: &Policy) -> BTreeSet<StateKey> {
        let mut out = relevant_state_set(global, &self.predicate);
        out.extend(relevant_state_set(&self.pi_fix, &self.predicate));
        out
    }
}

/// Overwrites the policy with the patch's action on every relevant state the
/// patch knows, and adds a tenth of the patch value to the value there. Missing
/// global values count as zero.
pub fn apply_patch(policy: &Policy, values: &ValueFunction, patch: &Patch) -> (Policy, ValueFunction) {
    let mut policy = policy.clone();
    let mut values = values.clone();
    for s in patch.relevant_states(&policy) {
        if let Some(a) = patch.pi_fix.get(&s) {
            policy.insert(s.clone(), a);
        }
        if let Some(v_fix) = patch.v_fix.get(&s) {
            let v = values.get(&s).unwrap_or(0.0);
            values.insert(s, v + PATCH_VALUE_WEIGHT * v_fix);
        }
    }
    (policy, values)
}

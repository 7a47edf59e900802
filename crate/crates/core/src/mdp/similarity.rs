use std::collections::BTreeSet;

use crate::error::ExplainError;

use super::{StateKey, ValueFunction};

/// Relative half-width of the similarity band.
pub const SIMILARITY_BAND: f64 = 0.05;

/// Closed interval of values considered similar to `v_ref`: `v_ref * (1 ± 0.05)`,
/// or `v_ref ± 0.05` when `|v_ref| < 1`.
pub fn similarity_bounds(v_ref: f64) -> (f64, f64) {
    if v_ref.abs() < 1.0 {
        (v_ref - SIMILARITY_BAND, v_ref + SIMILARITY_BAND)
    } else {
        let a = v_ref * (1.0 - SIMILARITY_BAND);
        let b = v_ref * (1.0 + SIMILARITY_BAND);
        (a.min(b), a.max(b))
    }
}

/// All states whose value falls in the band around `V(s_ref)`; always contains `s_ref`.
pub fn similar_states(values: &ValueFunction, s_ref: &StateKey) -> Result<BTreeSet<StateKey>, ExplainError> {
    let v_ref = values.get(s_ref).ok_or_else(|| ExplainError::UnknownState(s_ref.to_string()))?;
    let (lo, hi) = similarity_bounds(v_ref);
    let mut out: BTreeSet<StateKey> =
        values.iter().filter(|(_, v)| (lo..=hi).contains(v)).map(|(k, _)| k.clone()).collect();
    out.insert(s_ref.clone());
    Ok(out)
}

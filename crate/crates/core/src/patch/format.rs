//! Patch records appended to a policy file.
//!
//! Each patch is a header `#patch <id> <goal> <action> <predicate>`, an optional
//! `#stats` line, then its policy/value records in the policy-file format.

use std::fmt::Write as _;

use crate::env::{Action, Goal};
use crate::error::FormatError;
use crate::mdp::{parse_policy_record, write_policy_records, Policy, ValueFunction};

use super::{Patch, PatchStats, Predicate};

pub fn write_patch(out: &mut String, patch: &Patch) {
    let predicate = patch.predicate.to_text();
    writeln!(out, "#patch {} {} {} {}", patch.id, patch.goal, patch.action, predicate).unwrap();
    let s = &patch.stats;
    writeln!(
        out,
        "#stats successes={} failures={} steps={} episodes={} psi={} wall_ms={}",
        s.successes, s.failures, s.exploration_steps, s.episodes, s.final_psi, s.wall_time_ms
    )
    .unwrap();
    write_policy_records(out, &patch.pi_fix, &patch.v_fix);
}

/// Reads every patch section of a policy file, in file order.
pub fn read_patches(text: &str) -> Result<Vec<Patch>, FormatError> {
    let mut patches: Vec<Patch> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let bad = |reason: &str| FormatError::Record { line: lineno, reason: reason.to_string() };
        if let Some(rest) = line.strip_prefix("#patch ") {
            patches.push(parse_header(rest).ok_or_else(|| bad("malformed patch header"))?);
            continue;
        }
        let Some(current) = patches.last_mut() else { continue };
        if let Some(rest) = line.strip_prefix("#stats ") {
            current.stats = parse_stats(rest).ok_or_else(|| bad("malformed patch stats"))?;
        } else if !line.is_empty() {
            let (key, action, value) = parse_policy_record(line, lineno)?;
            if let Some(a) = action {
                current.pi_fix.insert(key.clone(), a);
            }
            if let Some(v) = value {
                current.v_fix.insert(key, v);
            }
        }
    }
    Ok(patches)
}

fn parse_header(rest: &str) -> Option<Patch> {
    let mut words = rest.splitn(4, ' ');
    let id = words.next()?.parse().ok()?;
    let goal: Goal = words.next()?.parse().ok()?;
    let action: Action = words.next()?.parse().ok()?;
    let predicate = Predicate::parse(words.next().unwrap_or(""))?;
    Some(Patch {
        id,
        goal,
        action,
        predicate,
        pi_fix: Policy::new(),
        v_fix: ValueFunction::new(),
        stats: PatchStats::default(),
    })
}

fn parse_stats(rest: &str) -> Option<PatchStats> {
    let mut stats = PatchStats::default();
    for field in rest.split(' ') {
        let (name, value) = field.split_once('=')?;
        match name {
            "successes" => stats.successes = value.parse().ok()?,
            "failures" => stats.failures = value.parse().ok()?,
            "steps" => stats.exploration_steps = value.parse().ok()?,
            "episodes" => stats.episodes = value.parse().ok()?,
            "psi" => stats.final_psi = value.parse().ok()?,
            "wall_ms" => stats.wall_time_ms = value.parse().ok()?,
            _ => return None,
        }
    }
    Some(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Distance, FeatureValue, Tile, Variable};
    use crate::mdp::{read_policy, testing::state, write_policy};
    use crate::patch::Assignment;

    fn sample(id: u32) -> Patch {
        Patch {
            id,
            goal: Goal::KillEnemy,
            action: Action::JumpRight,
            predicate: Predicate(vec![
                Assignment::new(Variable::EnemyDistanceX, FeatureValue::Distance(Distance::F3)),
                Assignment::new(Variable::Box6Type, FeatureValue::Tile(Tile::Air)),
            ]),
            pi_fix: [(state(3, false), Action::JumpRight)].into_iter().collect(),
            v_fix: [(state(3, false), 4.5), (state(7, false), 0.25)].into_iter().collect(),
            stats: PatchStats {
                successes: 3,
                failures: 2,
                exploration_steps: 140,
                episodes: 5,
                final_psi: 0.30000000000000004,
                wall_time_ms: 12,
            },
        }
    }

    #[test]
    fn patches_round_trip_after_policy() {
        let policy: Policy = [(state(1, false), Action::RunRight)].into_iter().collect();
        let values: ValueFunction = [(state(1, false), 1.5)].into_iter().collect();
        let mut text = write_policy(&policy, &values, 0.95);
        write_patch(&mut text, &sample(1));
        write_patch(&mut text, &sample(2));
        assert!(text.contains("#patch 1 KillEnemy JumpRight EnemyDistanceX=f3;Box6Type=air\n"));
        assert_eq!(read_policy(&text).unwrap().policy, policy);
        let patches = read_patches(&text).unwrap();
        assert_eq!(patches, vec![sample(1), sample(2)]);
    }

    #[test]
    fn malformed_header() {
        let err = read_patches("#patch one KillEnemy JumpRight Box6Type=air\n").unwrap_err();
        assert!(matches!(err, FormatError::Record { line: 1, .. }));
    }
}

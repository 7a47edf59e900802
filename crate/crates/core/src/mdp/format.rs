//! Line-oriented text persistence for policies and models.
//!
//! Policy files start with `#policy v<N> gamma=<g>` and hold one
//! `StateKey<TAB>action<TAB>value` record per line, sorted by key. Anything from
//! the first `#patch` line on belongs to patch records and is skipped here.
//!
//! Model files start with `#model v<N>`; each pair is one line
//! `key<TAB>action<TAB>visits<TAB>r1,r2,r3,r4<TAB>succ:count;succ:count`, and each
//! negative state is `#negative<TAB>key`.

use std::fmt::Write as _;

use crate::env::{Action, RewardComponents};
use crate::error::FormatError;

use super::{EmpiricalModel, PairStats, Policy, StateKey, ValueFunction};

pub const POLICY_FORMAT_VERSION: u32 = 1;
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyFile {
    pub gamma: f64,
    pub policy: Policy,
    pub values: ValueFunction,
}

pub fn write_policy(policy: &Policy, values: &ValueFunction, gamma: f64) -> String {
    let mut out = format!("#policy v{POLICY_FORMAT_VERSION} gamma={gamma}\n");
    write_policy_records(&mut out, policy, values);
    out
}

/// Appends records for every key of `policy` and `values`. A key present in only
/// one of them gets `-` in the missing column.
pub fn write_policy_records(out: &mut String, policy: &Policy, values: &ValueFunction) {
    let mut keys: Vec<&StateKey> = policy.keys().chain(values.iter().map(|(k, _)| k)).collect();
    keys.sort();
    keys.dedup();
    for k in keys {
        let action = policy.get(k).map_or("-", Action::name);
        match values.get(k) {
            Some(v) => writeln!(out, "{k}\t{action}\t{v}").unwrap(),
            None => writeln!(out, "{k}\t{action}\t-").unwrap(),
        }
    }
}

pub fn parse_policy_record(line: &str, lineno: usize) -> Result<(StateKey, Option<Action>, Option<f64>), FormatError> {
    let bad = |reason: String| FormatError::Record { line: lineno, reason };
    let fields: Vec<&str> = line.split('\t').collect();
    let [key, action, value] = fields[..] else {
        return Err(bad(format!("expected 3 tab-separated fields, found {}", fields.len())));
    };
    let key = StateKey::parse(key).ok_or_else(|| bad(format!("malformed state key {key:?}")))?;
    let action = match action {
        "-" => None,
        a => Some(a.parse::<Action>().map_err(|e| bad(e.to_string()))?),
    };
    let value = match value {
        "-" => None,
        v => Some(v.parse::<f64>().map_err(|_| bad(format!("malformed value {v:?}")))?),
    };
    Ok((key, action, value))
}

pub fn read_policy(text: &str) -> Result<PolicyFile, FormatError> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).unwrap_or("");
    let gamma = parse_policy_header(header)?;
    let mut policy = Policy::new();
    let mut values = ValueFunction::new();
    let mut previous: Option<StateKey> = None;
    for (i, line) in lines {
        if line.starts_with("#patch") {
            break;
        }
        if line.is_empty() {
            continue;
        }
        let (key, action, value) = parse_policy_record(line, i + 1)?;
        if previous.as_ref().is_some_and(|p| p >= &key) {
            return Err(FormatError::Record { line: i + 1, reason: "records not sorted by state key".into() });
        }
        previous = Some(key.clone());
        if let Some(a) = action {
            policy.insert(key.clone(), a);
        }
        if let Some(v) = value {
            values.insert(key, v);
        }
    }
    Ok(PolicyFile { gamma, policy, values })
}

fn parse_version(word: Option<&str>, expected: u32, header: &str) -> Result<(), FormatError> {
    let found = word
        .and_then(|w| w.strip_prefix('v'))
        .and_then(|n| n.parse::<u32>().ok())
        .ok_or_else(|| FormatError::BadHeader(header.to_string()))?;
    if found != expected {
        return Err(FormatError::Version { expected, found });
    }
    Ok(())
}

fn parse_policy_header(header: &str) -> Result<f64, FormatError> {
    let mut words = header.split(' ');
    if words.next() != Some("#policy") {
        return Err(FormatError::BadHeader(header.to_string()));
    }
    parse_version(words.next(), POLICY_FORMAT_VERSION, header)?;
    words
        .next()
        .and_then(|w| w.strip_prefix("gamma="))
        .and_then(|g| g.parse::<f64>().ok())
        .ok_or_else(|| FormatError::BadHeader(header.to_string()))
}

pub fn write_model(model: &EmpiricalModel) -> String {
    let mut out = format!("#model v{MODEL_FORMAT_VERSION}\n");
    for ((s, a), stats) in model.pairs() {
        let r = stats.mean_reward.as_array();
        let succ: Vec<String> = stats.successors.iter().map(|(k, c)| format!("{k}:{c}")).collect();
        writeln!(out, "{s}\t{a}\t{}\t{},{},{},{}\t{}", stats.visits, r[0], r[1], r[2], r[3], succ.join(";")).unwrap();
    }
    for k in model.negative_states() {
        writeln!(out, "#negative\t{k}").unwrap();
    }
    out
}

pub fn read_model(text: &str) -> Result<EmpiricalModel, FormatError> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).unwrap_or("");
    let mut words = header.split(' ');
    if words.next() != Some("#model") {
        return Err(FormatError::BadHeader(header.to_string()));
    }
    parse_version(words.next(), MODEL_FORMAT_VERSION, header)?;

    let mut model = EmpiricalModel::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let bad = |reason: &str| FormatError::Record { line: lineno, reason: reason.to_string() };
        let key = |text: &str| StateKey::parse(text).ok_or_else(|| bad("malformed state key"));
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#negative\t") {
            model.mark_negative(key(rest)?);
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [s, a, visits, rewards, succ] = fields[..] else {
            return Err(bad("expected 5 tab-separated fields"));
        };
        let a: Action = a.parse().map_err(|_| bad("unknown action"))?;
        let visits: u64 = visits.parse().map_err(|_| bad("malformed visit count"))?;
        let r: Vec<f64> = rewards.split(',').map(str::parse).collect::<Result<_, _>>().map_err(|_| bad("malformed reward"))?;
        let r: [f64; 4] = r.try_into().map_err(|_| bad("expected 4 reward components"))?;
        let mut stats = PairStats { visits, mean_reward: RewardComponents::from_array(r), ..Default::default() };
        for entry in succ.split(';') {
            let (k, c) = entry.rsplit_once(':').ok_or_else(|| bad("malformed successor"))?;
            let c: u64 = c.parse().map_err(|_| bad("malformed successor count"))?;
            stats.successors.insert(key(k)?, c);
        }
        if stats.successors.values().sum::<u64>() != visits {
            return Err(bad("successor counts do not sum to visits"));
        }
        model.insert_pair(key(s)?, a, stats);
    }
    Ok(model)
}

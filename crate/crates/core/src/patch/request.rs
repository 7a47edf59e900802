use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::env::{Action, FeatureState, FeatureValue, Goal, Variable};
use crate::error::PatchError;
use crate::mdp::StateKey;

pub const MAX_FIX_FEATURES: usize = 7;

/// One `variable = value` pair. Serialized as `{"var": "Box6Type", "val": "air"}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawAssignment", into = "RawAssignment")]
pub struct Assignment {
    pub var: Variable,
    pub val: FeatureValue,
}

#[derive(Serialize, Deserialize)]
struct RawAssignment {
    var: String,
    val: String,
}

impl TryFrom<RawAssignment> for Assignment {
    type Error = String;

    fn try_from(raw: RawAssignment) -> Result<Self, Self::Error> {
        let var: Variable = raw.var.parse().map_err(|e: crate::env::UnknownVariable| e.to_string())?;
        let val = var.parse_value(&raw.val).ok_or_else(|| format!("{:?} is not a value of {var}", raw.val))?;
        Ok(Assignment { var, val })
    }
}

impl From<Assignment> for RawAssignment {
    fn from(a: Assignment) -> Self {
        RawAssignment { var: a.var.title().to_string(), val: a.val.name().to_string() }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.var.title(), self.val)
    }
}

impl Assignment {
    pub fn new(var: Variable, val: FeatureValue) -> Self {
        Assignment { var, val }
    }

    /// Parses `Var=value`.
    pub fn parse(text: &str) -> Option<Assignment> {
        let (var, val) = text.split_once('=')?;
        let var: Variable = var.trim().parse().ok()?;
        Some(Assignment { var, val: var.parse_value(val.trim())? })
    }
}

/// Conjunction of assignments; empty matches everything.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Predicate(pub Vec<Assignment>);

impl Predicate {
    pub fn matches(&self, f: &FeatureState) -> bool {
        self.0.iter().all(|a| f.get(a.var) == a.val)
    }

    pub fn matches_key(&self, k: &StateKey) -> bool {
        k.features().is_some_and(|f| self.matches(&f))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `Var=value;Var=value`, the form used in patch headers.
    pub fn to_text(&self) -> String {
        self.0.iter().map(Assignment::to_string).collect::<Vec<_>>().join(";")
    }

    pub fn parse(text: &str) -> Option<Predicate> {
        if text.is_empty() {
            return Some(Predicate::default());
        }
        text.split(';').map(Assignment::parse).collect::<Option<Vec<_>>>().map(Predicate)
    }
}

/// A user's edited explanation: in states like these, take this action to
/// achieve this goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixRequest {
    pub features: Vec<Assignment>,
    pub goal: Goal,
    pub action: Action,
    /// Trace frame the fix was made at. Scripts may leave it out and let the
    /// runner pick the first frame matching `features`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_frame: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_state: Option<StateKey>,
}

impl FixRequest {
    pub fn new(features: Vec<Assignment>, goal: Goal, action: Action) -> Self {
        FixRequest { features, goal, action, anchor_frame: None, anchor_state: None }
    }

    pub fn validate(&self) -> Result<(), PatchError> {
        if self.features.is_empty() || self.features.len() > MAX_FIX_FEATURES {
            return Err(PatchError::InvalidRequest(format!(
                "expected 1 to {MAX_FIX_FEATURES} features, got {}",
                self.features.len()
            )));
        }
        let distinct: BTreeSet<Variable> = self.features.iter().map(|a| a.var).collect();
        if distinct.len() != self.features.len() {
            return Err(PatchError::InvalidRequest("a variable appears more than once".into()));
        }
        Ok(())
    }

    pub fn predicate(&self) -> Predicate {
        Predicate(self.features.clone())
    }
}

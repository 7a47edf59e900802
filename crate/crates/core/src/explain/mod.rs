//! Answers "why" and "why not" questions about the agent's chosen action.
//!
//! An answer has two parts. The [`Explanation`] names the two most telling
//! features of the state, how safe the chosen action is and the goal it serves.
//! The [`ContrastReport`] compares the chosen action against an alternative by
//! simulating both for two seconds.

mod counterfactual;
mod relevance;
mod render;
mod rollout;
mod safety;
mod words;

use std::borrow::Cow;

use serde::{Deserialize, Serialize};

pub use counterfactual::counterfactual_feature;
pub use relevance::{relevant_features, RelevanceMode, RelevantFeature};
pub use render::{render_contrast, render_explanation};
pub use rollout::{dominant_goal, next_subgoal, rollout, second_best_action, Rollout};
pub use safety::{safety_label, SafetyLabel, DANGER_THRESHOLD};
pub use words::{dynamics_words, CertaintyWord};

use crate::env::{featurize, Action, FeatureValue, Goal, Level, Variable, WorldState, HORIZON};
use crate::error::ExplainError;
use crate::mdp::{EmpiricalModel, Policy, StateKey, ValueFunction};

/// Band, as a fraction of the baseline's magnitude, within which two long-run
/// returns count as similar.
pub const LONG_RUN_BAND: f64 = 0.05;
/// Difference in danger probability below which death risk counts as similar.
pub const DEATH_RISK_BAND: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "action", rename_all = "lowercase")]
pub enum Question {
    Why,
    WhyNot(Action),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeathRisk {
    MoreLikelyToDie,
    Similar,
    LessLikely,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LongRun {
    Worse,
    Similar,
    Better,
}

impl LongRun {
    pub fn compare(baseline: f64, other: f64) -> LongRun {
        let band = LONG_RUN_BAND * baseline.abs();
        if other < baseline - band {
            LongRun::Worse
        } else if other > baseline + band {
            LongRun::Better
        } else {
            LongRun::Similar
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub state: StateKey,
    pub relevant_features: [RelevantFeature; 2],
    pub certainty: CertaintyWord,
    /// Probability of the labeled outcome that `certainty` verbalizes.
    pub certainty_probability: f64,
    pub safety: SafetyLabel,
    pub p_negative: f64,
    pub chosen_action: Action,
    pub subgoal: Goal,
    pub rendered_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    pub question: Question,
    pub chosen_action: Action,
    pub compared_action: Action,
    /// Goals that accrue strictly less under the compared action.
    pub lost_goals: Vec<Goal>,
    /// Goals that accrue strictly more under the compared action.
    pub gained_goals: Vec<Goal>,
    pub compared_dies: bool,
    pub death_risk: DeathRisk,
    pub long_run: LongRun,
    pub chosen_return: f64,
    pub compared_return: f64,
    pub counterfactual: Option<(Variable, FeatureValue)>,
    pub rendered_text: String,
}

impl ContrastReport {
    pub fn similar_results(&self) -> bool {
        self.lost_goals.is_empty() && self.gained_goals.is_empty() && self.long_run == LongRun::Similar
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplainConfig {
    pub horizon: usize,
    pub gamma: f64,
    pub relevance: RelevanceMode,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig { horizon: HORIZON, gamma: 0.95, relevance: RelevanceMode::default() }
    }
}

/// Read-only view of everything an explanation draws on.
#[derive(Debug, Clone, Copy)]
pub struct ExplainContext<'a> {
    pub model: &'a EmpiricalModel,
    pub policy: &'a Policy,
    pub values: &'a ValueFunction,
    pub level: &'a Level,
    pub config: ExplainConfig,
}

pub fn explain(
    ctx: &ExplainContext<'_>,
    world: &WorldState,
    question: Question,
) -> Result<(Explanation, ContrastReport), ExplainError> {
    if !world.alive {
        return Err(ExplainError::TerminalState);
    }
    let cfg = ctx.config;
    let s = StateKey::from(featurize(world, ctx.level));
    let chosen = ctx.policy.act(&s);
    let compared = match question {
        Question::WhyNot(a) if a == chosen => return Err(ExplainError::SameAsPolicy(a)),
        Question::WhyNot(a) => a,
        Question::Why => second_best_action(ctx.level, world, ctx.policy, cfg.horizon)?,
    };

    // A state never seen has the value the solver gives every unvisited state.
    let values: Cow<ValueFunction> = if ctx.values.contains(&s) {
        Cow::Borrowed(ctx.values)
    } else {
        let mut v = ctx.values.clone();
        v.insert(s.clone(), 0.0);
        Cow::Owned(v)
    };
    let relevant = relevant_features(&s, &values, ctx.policy, cfg.relevance)?;
    let sim = Some((ctx.level, world));
    let (safety, p_negative) = safety_label(ctx.model, ctx.policy, &s, chosen, cfg.horizon, sim)?;
    let certainty_probability = match safety {
        SafetyLabel::Safe => 1.0 - p_negative,
        SafetyLabel::Dangerous => p_negative,
    };
    let subgoal = next_subgoal(ctx.level, world, ctx.policy, cfg.horizon)?;
    let mut explanation = Explanation {
        state: s.clone(),
        relevant_features: relevant,
        certainty: dynamics_words(certainty_probability)?,
        certainty_probability,
        safety,
        p_negative,
        chosen_action: chosen,
        subgoal,
        rendered_text: String::new(),
    };
    explanation.rendered_text = render_explanation(&explanation);

    let base = rollout(ctx.level, world, Some(chosen), ctx.policy, cfg.horizon, cfg.gamma, Some(&values))?;
    let other = rollout(ctx.level, world, Some(compared), ctx.policy, cfg.horizon, cfg.gamma, Some(&values))?;
    let (_, p_other) = safety_label(ctx.model, ctx.policy, &s, compared, cfg.horizon, sim)?;
    let death_risk = if p_other > p_negative + DEATH_RISK_BAND {
        DeathRisk::MoreLikelyToDie
    } else if p_other < p_negative - DEATH_RISK_BAND {
        DeathRisk::LessLikely
    } else {
        DeathRisk::Similar
    };
    let mut contrast = ContrastReport {
        question,
        chosen_action: chosen,
        compared_action: compared,
        lost_goals: Goal::ALL.into_iter().filter(|g| other.totals.goal(*g) < base.totals.goal(*g)).collect(),
        gained_goals: Goal::ALL.into_iter().filter(|g| other.totals.goal(*g) > base.totals.goal(*g)).collect(),
        compared_dies: other.died,
        death_risk,
        long_run: LongRun::compare(base.discounted, other.discounted),
        chosen_return: base.discounted,
        compared_return: other.discounted,
        counterfactual: match question {
            Question::Why => None,
            Question::WhyNot(a) => counterfactual_feature(&s, a, ctx.policy),
        },
        rendered_text: String::new(),
    };
    contrast.rendered_text = render_contrast(&contrast);
    Ok((explanation, contrast))
}

use crate::env::{featurize, Level, WorldState};
use crate::error::PatchError;
use crate::mdp::StateKey;

use super::FixRequest;

/// Default width of the training window, in tiles.
pub const TRAINING_WINDOW: usize = 16;

/// A slice of the original level plus the world to restart every mini-episode from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingEnv {
    pub level: Level,
    pub start: WorldState,
    /// Column of the original level at which the window begins.
    pub offset: usize,
}

/// Cuts a `width`-tile window around the agent at `anchor` and checks that the
/// agent's state there still shows every requested feature. The centered
/// window is tried first, then windows shifted progressively further from it.
pub fn build_training_env(
    level: &Level,
    anchor: &WorldState,
    request: &FixRequest,
    width: usize,
) -> Result<TrainingEnv, PatchError> {
    request.validate()?;
    if !anchor.alive {
        return Err(PatchError::InfeasibleFix("the anchor frame shows a dead agent".into()));
    }
    if let Some(expected) = &request.anchor_state {
        let actual = StateKey::from(featurize(anchor, level));
        if &actual != expected {
            return Err(PatchError::InvalidRequest(format!("anchor state {expected} does not match the frame ({actual})")));
        }
    }
    let predicate = request.predicate();
    let width = width.min(level.width);
    let max_start = (level.width - width) as i64;
    let ax = anchor.agent_x as i64;
    let centered = (ax - width as i64 / 2).clamp(0, max_start);
    let mut tried = Vec::new();
    for shift in 0..=max_start {
        for start in [centered + shift, centered - shift] {
            if !(0..=max_start).contains(&start) || tried.contains(&start) || !(start..start + width as i64).contains(&ax) {
                continue;
            }
            tried.push(start);
            let env = cut(level, anchor, start as usize, width);
            if predicate.matches(&featurize(&env.start, &env.level)) {
                return Ok(env);
            }
        }
    }
    let unmet: Vec<String> = request
        .features
        .iter()
        .filter(|a| featurize(anchor, level).get(a.var) != a.val)
        .map(ToString::to_string)
        .collect();
    Err(PatchError::InfeasibleFix(if unmet.is_empty() {
        "no window around the anchor keeps all requested features".into()
    } else {
        format!("the anchor frame does not show {}", unmet.join(", "))
    }))
}

fn cut(level: &Level, anchor: &WorldState, start: usize, width: usize) -> TrainingEnv {
    let end = start + width;
    let shift = start as i32;
    let finish = if (start..end).contains(&level.finish_column) { level.finish_column - start } else { width - 1 };
    let agent = ((anchor.agent_x - shift) as usize, anchor.agent_y.max(0) as usize);
    let window = level.window(start, end, agent, finish);
    let mut w = anchor.clone();
    w.agent_x -= shift;
    w.max_x_reached = (w.max_x_reached - shift).max(w.agent_x);
    w.enemies.retain(|e| (shift..end as i32).contains(&e.x));
    for e in &mut w.enemies {
        e.x -= shift;
    }
    w.coins_collected = w
        .coins_collected
        .iter()
        .filter(|(x, _)| (shift..end as i32).contains(x))
        .map(|&(x, y)| (x - shift, y))
        .collect();
    TrainingEnv { level: window, start: w, offset: start }
}

//! The 17-variable discrete agent state.
//!
//! Nine terrain boxes form a 3x3 window whose columns are the agent column and
//! the two ahead of it, and whose rows are the row above the agent, the agent
//! row and the row below. Boxes are numbered row-major from the top-left, so
//! `Box4` is the agent's own cell and `Box6` is two tiles ahead at agent height.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::level::{Level, Tile};
use super::world::{WorldState, HORIZON};

/// Enemies further than this many tiles on either axis are not detected.
pub const DETECTION_RADIUS: i32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Distance {
    B3,
    B2,
    B1,
    F1,
    F2,
    F3,
    No,
}

impl Distance {
    pub const ALL: [Distance; 7] =
        [Distance::B3, Distance::B2, Distance::B1, Distance::F1, Distance::F2, Distance::F3, Distance::No];

    pub fn name(self) -> &'static str {
        match self {
            Distance::B3 => "b3",
            Distance::B2 => "b2",
            Distance::B1 => "b1",
            Distance::F1 => "f1",
            Distance::F2 => "f2",
            Distance::F3 => "f3",
            Distance::No => "no",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Bands: |d| in 0..=2 -> 1, 3..=5 -> 2, 6..=8 -> 3, otherwise `no`.
/// Negative offsets (behind on x, above on y) take the `b` prefix; zero is `f1`.
/// The axis only fixes the meaning of the sign; both axes share the table.
pub fn discretize_enemy_distance(delta: i32, _axis: Axis) -> Distance {
    let band = match delta.unsigned_abs() {
        0..=2 => 1,
        3..=5 => 2,
        6..=8 => 3,
        _ => return Distance::No,
    };
    match (delta < 0, band) {
        (true, 1) => Distance::B1,
        (true, 2) => Distance::B2,
        (true, _) => Distance::B3,
        (false, 1) => Distance::F1,
        (false, 2) => Distance::F2,
        (false, _) => Distance::F3,
    }
}

/// One of the 17 state variables, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variable {
    Box1Type,
    Box2Type,
    Box3Type,
    Box4Type,
    Box5Type,
    Box6Type,
    Box7Type,
    Box8Type,
    Box9Type,
    CanJump,
    OnGround,
    IsDead,
    IsCliffNear,
    AnyXProgress,
    AnyYProgress,
    EnemyDistanceX,
    EnemyDistanceY,
}

impl Variable {
    pub const ALL: [Variable; 17] = [
        Variable::Box1Type,
        Variable::Box2Type,
        Variable::Box3Type,
        Variable::Box4Type,
        Variable::Box5Type,
        Variable::Box6Type,
        Variable::Box7Type,
        Variable::Box8Type,
        Variable::Box9Type,
        Variable::CanJump,
        Variable::OnGround,
        Variable::IsDead,
        Variable::IsCliffNear,
        Variable::AnyXProgress,
        Variable::AnyYProgress,
        Variable::EnemyDistanceX,
        Variable::EnemyDistanceY,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Name as written in explanations, e.g. `Box6Type`, `EnemyDistanceX`.
    pub fn title(self) -> &'static str {
        match self {
            Variable::Box1Type => "Box1Type",
            Variable::Box2Type => "Box2Type",
            Variable::Box3Type => "Box3Type",
            Variable::Box4Type => "Box4Type",
            Variable::Box5Type => "Box5Type",
            Variable::Box6Type => "Box6Type",
            Variable::Box7Type => "Box7Type",
            Variable::Box8Type => "Box8Type",
            Variable::Box9Type => "Box9Type",
            Variable::CanJump => "CanJump",
            Variable::OnGround => "OnGround",
            Variable::IsDead => "IsDead",
            Variable::IsCliffNear => "IsCliffNear",
            Variable::AnyXProgress => "AnyXProgress",
            Variable::AnyYProgress => "AnyYProgress",
            Variable::EnemyDistanceX => "EnemyDistanceX",
            Variable::EnemyDistanceY => "EnemyDistanceY",
        }
    }

    /// Identifier form with a lower-case first letter, e.g. `box6Type`.
    pub fn ident(self) -> String {
        let title = self.title();
        let mut out = title[..1].to_ascii_lowercase();
        out.push_str(&title[1..]);
        out
    }

    /// Every value this variable can take, in declared order.
    pub fn domain(self) -> Vec<FeatureValue> {
        match self.box_index() {
            Some(_) => Tile::ALL.into_iter().map(FeatureValue::Tile).collect(),
            None if matches!(self, Variable::EnemyDistanceX | Variable::EnemyDistanceY) => {
                Distance::ALL.into_iter().map(FeatureValue::Distance).collect()
            }
            None => vec![FeatureValue::Flag(true), FeatureValue::Flag(false)],
        }
    }

    pub fn box_index(self) -> Option<usize> {
        (self.index() < 9).then_some(self.index())
    }

    pub fn parse_value(self, text: &str) -> Option<FeatureValue> {
        // "ground" is an alias some explanation texts use for a platform tile.
        let text = if self.box_index().is_some() && text.eq_ignore_ascii_case("ground") { "platform" } else { text };
        self.domain().into_iter().find(|v| v.name().eq_ignore_ascii_case(text))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown state variable {0:?}")]
pub struct UnknownVariable(pub String);

impl FromStr for Variable {
    type Err = UnknownVariable;

    /// Case-insensitive; accepts the misspelled `anYProgress` too.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("anyprogress") {
            return Ok(Variable::AnyYProgress);
        }
        Variable::ALL
            .into_iter()
            .find(|v| v.title().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownVariable(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureValue {
    Tile(Tile),
    Flag(bool),
    Distance(Distance),
}

impl FeatureValue {
    pub fn name(self) -> &'static str {
        match self {
            FeatureValue::Tile(t) => t.name(),
            FeatureValue::Flag(true) => "yes",
            FeatureValue::Flag(false) => "no",
            FeatureValue::Distance(d) => d.name(),
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureState {
    pub boxes: [Tile; 9],
    pub can_jump: bool,
    pub on_ground: bool,
    pub is_dead: bool,
    pub is_cliff_near: bool,
    pub any_x_progress: bool,
    pub any_y_progress: bool,
    pub enemy_distance_x: Distance,
    pub enemy_distance_y: Distance,
}

impl FeatureState {
    pub fn get(&self, var: Variable) -> FeatureValue {
        match var {
            Variable::CanJump => FeatureValue::Flag(self.can_jump),
            Variable::OnGround => FeatureValue::Flag(self.on_ground),
            Variable::IsDead => FeatureValue::Flag(self.is_dead),
            Variable::IsCliffNear => FeatureValue::Flag(self.is_cliff_near),
            Variable::AnyXProgress => FeatureValue::Flag(self.any_x_progress),
            Variable::AnyYProgress => FeatureValue::Flag(self.any_y_progress),
            Variable::EnemyDistanceX => FeatureValue::Distance(self.enemy_distance_x),
            Variable::EnemyDistanceY => FeatureValue::Distance(self.enemy_distance_y),
            box_var => FeatureValue::Tile(self.boxes[box_var.index()]),
        }
    }

    /// Returns a copy with `var` set to `value`, or `None` if the value is not
    /// in the variable's domain.
    pub fn with(&self, var: Variable, value: FeatureValue) -> Option<FeatureState> {
        let mut s = *self;
        match (var, value) {
            (v, FeatureValue::Tile(t)) if v.box_index().is_some() => s.boxes[v.index()] = t,
            (Variable::CanJump, FeatureValue::Flag(b)) => s.can_jump = b,
            (Variable::OnGround, FeatureValue::Flag(b)) => s.on_ground = b,
            (Variable::IsDead, FeatureValue::Flag(b)) => s.is_dead = b,
            (Variable::IsCliffNear, FeatureValue::Flag(b)) => s.is_cliff_near = b,
            (Variable::AnyXProgress, FeatureValue::Flag(b)) => s.any_x_progress = b,
            (Variable::AnyYProgress, FeatureValue::Flag(b)) => s.any_y_progress = b,
            (Variable::EnemyDistanceX, FeatureValue::Distance(d)) => s.enemy_distance_x = d,
            (Variable::EnemyDistanceY, FeatureValue::Distance(d)) => s.enemy_distance_y = d,
            _ => return None,
        }
        Some(s)
    }

    pub fn values(&self) -> [FeatureValue; 17] {
        Variable::ALL.map(|v| self.get(v))
    }

    pub fn satisfies(&self, predicate: &[(Variable, FeatureValue)]) -> bool {
        predicate.iter().all(|(var, val)| self.get(*var) == *val)
    }
}

/// Featurizes a world. Defined for every world, dead ones included.
pub fn featurize(world: &WorldState, level: &Level) -> FeatureState {
    let (ax, ay) = (world.agent_x, world.agent_y);
    let mut boxes = [Tile::Platform; 9];
    for (row, dy) in (-1..=1).enumerate() {
        for (col, dx) in (0..=2).enumerate() {
            // Out-of-level cells read as platform.
            boxes[row * 3 + col] = world.tile_at(level, ax + dx, ay + dy).unwrap_or(Tile::Platform);
        }
    }

    let (enemy_distance_x, enemy_distance_y) = match closest_enemy(world) {
        Some((dx, dy)) => (discretize_enemy_distance(dx, Axis::X), discretize_enemy_distance(dy, Axis::Y)),
        None => (Distance::No, Distance::No),
    };

    let recent_progress = world.last_progress_tick.is_some_and(|t| world.tick - t < HORIZON as u64);

    FeatureState {
        boxes,
        can_jump: world.alive && world.on_ground,
        on_ground: world.alive && world.on_ground,
        is_dead: !world.alive,
        is_cliff_near: cliff_near(world, level),
        any_x_progress: recent_progress,
        any_y_progress: world.alive && ay < world.ground_y,
        enemy_distance_x,
        enemy_distance_y,
    }
}

/// Offset to the closest living enemy inside the detection square, by
/// Euclidean distance with ties broken by lower x.
fn closest_enemy(world: &WorldState) -> Option<(i32, i32)> {
    world
        .enemies
        .iter()
        .filter(|e| e.alive)
        .map(|e| (e.x - world.agent_x, e.y - world.agent_y, e.x))
        .filter(|(dx, dy, _)| dx.abs() <= DETECTION_RADIUS && dy.abs() <= DETECTION_RADIUS)
        .min_by_key(|&(dx, dy, x)| (dx * dx + dy * dy, x))
        .map(|(dx, dy, _)| (dx, dy))
}

/// A cliff is any of the three columns ahead with no solid tile in the two rows
/// at and below the agent's ground level. Columns past the level edge count as
/// walls; rows below the level count as open.
fn cliff_near(world: &WorldState, level: &Level) -> bool {
    let floor = world.ground_y + 1;
    (1..=3).map(|dx| world.agent_x + dx).any(|x| {
        x < level.width as i32 && !(floor..floor + 2).any(|y| level.is_solid(x, y))
    })
}

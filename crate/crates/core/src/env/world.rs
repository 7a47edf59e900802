//! Deterministic tile-resolution dynamics.
//!
//! One call to [`step`] is one decision tick (10 ticks per simulated second).
//! Per tick the agent resolves vertical motion first, then horizontal motion one
//! tile at a time, then enemies move and contacts are checked.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::action::Action;
use super::level::{Level, Tile};
use super::reward::{RewardComponents, DEATH_REWARD, KILL_REWARD, COIN_REWARD, PROGRESS_REWARD};
use crate::error::StepError;

pub const TICKS_PER_SECOND: u32 = 10;
/// Rollout horizon of two simulated seconds.
pub const HORIZON: usize = 20;
pub const JUMP_RISE_TICKS: u32 = 3;
/// Enemies advance one tile every this many ticks.
pub const ENEMY_PERIOD: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Facing {
    Left,
    Right,
}

impl Facing {
    pub fn sign(self) -> i32 {
        match self {
            Facing::Left => -1,
            Facing::Right => 1,
        }
    }

    fn reversed(self) -> Facing {
        match self {
            Facing::Left => Facing::Right,
            Facing::Right => Facing::Left,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Enemy {
    pub x: i32,
    pub y: i32,
    pub alive: bool,
    pub direction: Facing,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorldState {
    pub agent_x: i32,
    pub agent_y: i32,
    /// -1 rising, +1 falling, 0 level.
    pub agent_vy: i32,
    pub facing: Facing,
    pub jump_ticks_remaining: u32,
    pub on_ground: bool,
    pub alive: bool,
    pub max_x_reached: i32,
    /// Tick of the last step that raised `max_x_reached`.
    pub last_progress_tick: Option<u64>,
    /// Row the agent last stood on.
    pub ground_y: i32,
    pub enemies: Vec<Enemy>,
    pub coins_collected: BTreeSet<(i32, i32)>,
    pub tick: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Event {
    Progressed,
    KilledEnemy,
    CollectedCoin,
    Died,
    ReachedFinish,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub world: WorldState,
    pub rewards: RewardComponents,
    pub events: BTreeSet<Event>,
}

impl StepOutcome {
    pub fn is_terminal(&self) -> bool {
        self.events.contains(&Event::Died) || self.events.contains(&Event::ReachedFinish)
    }
}

impl WorldState {
    pub fn spawn(level: &Level) -> WorldState {
        let (x, y) = (level.agent_spawn.0 as i32, level.agent_spawn.1 as i32);
        WorldState {
            agent_x: x,
            agent_y: y,
            agent_vy: 0,
            facing: Facing::Right,
            jump_ticks_remaining: 0,
            on_ground: true,
            alive: true,
            max_x_reached: x,
            last_progress_tick: None,
            ground_y: y,
            enemies: level
                .enemy_spawns
                .iter()
                .map(|&(ex, ey)| Enemy { x: ex as i32, y: ey as i32, alive: true, direction: Facing::Left })
                .collect(),
            coins_collected: BTreeSet::new(),
            tick: 0,
        }
    }

    /// Tile as currently seen: collected coins read as air.
    pub fn tile_at(&self, level: &Level, x: i32, y: i32) -> Option<Tile> {
        level.tile(x, y).map(|t| match t {
            Tile::Coin if self.coins_collected.contains(&(x, y)) => Tile::Air,
            t => t,
        })
    }

    pub fn reached_finish(&self, level: &Level) -> bool {
        self.alive && self.agent_x >= level.finish_column as i32
    }

    fn enemy_at(&self, x: i32, y: i32) -> Option<usize> {
        self.enemies.iter().position(|e| e.alive && e.x == x && e.y == y)
    }
}

/// Advances `world` by one tick under `action`.
pub fn step(world: &WorldState, level: &Level, action: Action) -> Result<StepOutcome, StepError> {
    if !world.alive {
        return Err(StepError::AgentDead);
    }
    let mut w = world.clone();
    let mut rewards = RewardComponents::default();
    let mut events = BTreeSet::new();
    w.tick += 1;

    let dx = action.dx();
    if dx < 0 {
        w.facing = Facing::Left;
    } else if dx > 0 {
        w.facing = Facing::Right;
    }
    if action.is_jump() && w.on_ground {
        w.jump_ticks_remaining = JUMP_RISE_TICKS;
    }

    // Vertical.
    if w.jump_ticks_remaining > 0 {
        if level.is_solid(w.agent_x, w.agent_y - 1) {
            // Ceiling: remaining rise is cancelled.
            w.jump_ticks_remaining = 0;
            w.agent_vy = 0;
        } else {
            w.agent_y -= 1;
            w.jump_ticks_remaining -= 1;
            w.agent_vy = -1;
            collect_coin(&mut w, level, &mut rewards, &mut events);
        }
    } else if !level.is_solid(w.agent_x, w.agent_y + 1) {
        if let Some(i) = w.enemy_at(w.agent_x, w.agent_y + 1) {
            w.enemies[i].alive = false;
            rewards.kill_enemy += KILL_REWARD;
            events.insert(Event::KilledEnemy);
            w.agent_vy = 0;
        } else {
            w.agent_y += 1;
            w.agent_vy = 1;
            if w.agent_y >= level.height as i32 {
                kill_agent(&mut w, &mut rewards, &mut events);
            } else {
                collect_coin(&mut w, level, &mut rewards, &mut events);
            }
        }
    } else {
        w.agent_vy = 0;
    }

    // Horizontal, one tile at a time.
    if w.alive {
        for _ in 0..dx.abs() {
            let nx = w.agent_x + dx.signum();
            if nx < 0 || nx >= level.width as i32 || level.is_solid(nx, w.agent_y) {
                break;
            }
            w.agent_x = nx;
            if w.enemy_at(nx, w.agent_y).is_some() {
                kill_agent(&mut w, &mut rewards, &mut events);
                break;
            }
            collect_coin(&mut w, level, &mut rewards, &mut events);
        }
    }

    if w.agent_x > w.max_x_reached {
        rewards.make_progress_in_x += PROGRESS_REWARD * f64::from(w.agent_x - w.max_x_reached);
        w.max_x_reached = w.agent_x;
        w.last_progress_tick = Some(w.tick);
        events.insert(Event::Progressed);
    }

    w.on_ground = w.alive && w.jump_ticks_remaining == 0 && level.is_solid(w.agent_x, w.agent_y + 1);
    if w.on_ground {
        w.ground_y = w.agent_y;
    }

    if w.tick % ENEMY_PERIOD == 0 {
        for e in w.enemies.iter_mut().filter(|e| e.alive) {
            let nx = e.x + e.direction.sign();
            let blocked = nx < 0 || nx >= level.width as i32 || level.is_solid(nx, e.y);
            let ledge = !level.is_solid(nx, e.y + 1);
            if blocked || ledge {
                e.direction = e.direction.reversed();
            } else {
                e.x = nx;
            }
        }
    }

    if w.alive && w.enemy_at(w.agent_x, w.agent_y).is_some() {
        kill_agent(&mut w, &mut rewards, &mut events);
    }

    if w.reached_finish(level) {
        events.insert(Event::ReachedFinish);
    }
    Ok(StepOutcome { world: w, rewards, events })
}

fn kill_agent(w: &mut WorldState, rewards: &mut RewardComponents, events: &mut BTreeSet<Event>) {
    w.alive = false;
    w.on_ground = false;
    w.jump_ticks_remaining = 0;
    rewards.die += DEATH_REWARD;
    events.insert(Event::Died);
}

fn collect_coin(w: &mut WorldState, level: &Level, rewards: &mut RewardComponents, events: &mut BTreeSet<Event>) {
    let pos = (w.agent_x, w.agent_y);
    if w.tile_at(level, pos.0, pos.1) == Some(Tile::Coin) {
        w.coins_collected.insert(pos);
        rewards.collect_coin += COIN_REWARD;
        events.insert(Event::CollectedCoin);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(text: &str) -> Level {
        Level::parse(text).unwrap()
    }

    #[test]
    fn running_into_adjacent_enemy_kills_agent() {
        let lv = level("------F\nME-----\nXXXXXXX");
        let w = WorldState::spawn(&lv);
        let out = step(&w, &lv, Action::RunRight).unwrap();
        assert!(!out.world.alive);
        assert_eq!(out.rewards.die, -10.0);
        assert!(out.events.contains(&Event::Died));
        assert_eq!(out.rewards.kill_enemy, 0.0);
    }

    #[test]
    fn landing_on_enemy_stomps_it() {
        let lv = level("------F\nM-E----\nXXXXXXX");
        let mut w = WorldState::spawn(&lv);
        // Place the agent directly above the enemy, mid-fall.
        w.agent_x = 2;
        w.agent_y = 0;
        w.on_ground = false;
        let out = step(&w, &lv, Action::DoNothing).unwrap();
        assert!(out.world.alive);
        assert!(!out.world.enemies[0].alive);
        assert_eq!(out.rewards.kill_enemy, 5.0);
        assert_eq!(out.rewards.die, 0.0);
    }

    #[test]
    fn walking_and_running_distances() {
        let lv = level("---------F\nM---------\nXXXXXXXXXX");
        let w = WorldState::spawn(&lv);
        let walk = step(&w, &lv, Action::WalkRight).unwrap();
        assert_eq!(walk.world.agent_x, 1);
        assert_eq!(walk.rewards.make_progress_in_x, 1.0);
        let run = step(&walk.world, &lv, Action::RunRight).unwrap();
        assert_eq!(run.world.agent_x, 3);
        assert_eq!(run.rewards.make_progress_in_x, 2.0);
        let back = step(&run.world, &lv, Action::RunLeft).unwrap();
        assert_eq!(back.world.agent_x, 1);
        assert_eq!(back.rewards.make_progress_in_x, 0.0);
        assert_eq!(back.world.max_x_reached, 3);
    }

    #[test]
    fn solid_tiles_block_horizontal_motion() {
        let lv = level("-----F\nM-P---\nXXXXXX");
        let w = WorldState::spawn(&lv);
        let out = step(&w, &lv, Action::RunRight).unwrap();
        assert_eq!(out.world.agent_x, 1);
    }

    #[test]
    fn jump_arc_rises_three_then_falls() {
        let lv = level("---------F\n----------\n----------\n----------\nM---------\nXXXXXXXXXX");
        let mut w = WorldState::spawn(&lv);
        let mut heights = Vec::new();
        for i in 0..7 {
            let a = if i == 0 { Action::NeutralJump } else { Action::DoNothing };
            w = step(&w, &lv, a).unwrap().world;
            heights.push(w.agent_y);
        }
        assert_eq!(heights, vec![3, 2, 1, 2, 3, 4, 4]);
        assert!(w.on_ground);
    }

    #[test]
    fn ceiling_cancels_rise() {
        let lv = level("---------F\n----------\nXXX-------\n----------\nM---------\nXXXXXXXXXX");
        let mut w = WorldState::spawn(&lv);
        w = step(&w, &lv, Action::NeutralJump).unwrap().world;
        assert_eq!(w.agent_y, 3);
        w = step(&w, &lv, Action::DoNothing).unwrap().world;
        assert_eq!(w.agent_y, 3);
        assert_eq!(w.jump_ticks_remaining, 0);
        w = step(&w, &lv, Action::DoNothing).unwrap().world;
        assert_eq!(w.agent_y, 4);
    }

    #[test]
    fn falling_out_of_level_is_death() {
        let lv = level("-----F\nM-----\nX-XXXX");
        let mut w = WorldState::spawn(&lv);
        w = step(&w, &lv, Action::WalkRight).unwrap().world;
        assert!(w.alive);
        w = step(&w, &lv, Action::DoNothing).unwrap().world;
        assert!(w.alive);
        assert_eq!(w.agent_y, 2);
        let out = step(&w, &lv, Action::DoNothing).unwrap();
        assert!(!out.world.alive);
        assert_eq!(out.rewards.die, -10.0);
    }

    #[test]
    fn coins_are_collected_once() {
        let lv = level("-----F\nMoo---\nXXXXXX");
        let w = WorldState::spawn(&lv);
        let out = step(&w, &lv, Action::RunRight).unwrap();
        assert_eq!(out.rewards.collect_coin, 4.0);
        let back = step(&out.world, &lv, Action::RunLeft).unwrap();
        assert_eq!(back.rewards.collect_coin, 0.0);
        assert_eq!(back.world.tile_at(&lv, 1, 1), Some(Tile::Air));
    }

    #[test]
    fn enemies_patrol_and_turn_at_walls_and_ledges() {
        let lv = level("-------F\nM---E-X-\nXXXXXX-X");
        let mut w = WorldState::spawn(&lv);
        w.enemies[0].direction = Facing::Right;
        let mut xs = Vec::new();
        for _ in 0..6 {
            w = step(&w, &lv, Action::DoNothing).unwrap().world;
            xs.push(w.enemies[0].x);
        }
        // moves on even ticks: 5, blocked by wall at 6 -> reverse, then 4.
        assert_eq!(xs, vec![4, 5, 5, 5, 5, 4]);
    }

    #[test]
    fn stepping_dead_world_is_an_error() {
        let lv = level("--F\nM--\nXXX");
        let mut w = WorldState::spawn(&lv);
        w.alive = false;
        assert_eq!(step(&w, &lv, Action::DoNothing).unwrap_err(), StepError::AgentDead);
    }

    #[test]
    fn finish_event() {
        let lv = level("--F\nM--\nXXX");
        let w = WorldState::spawn(&lv);
        let out = step(&w, &lv, Action::RunRight).unwrap();
        assert!(out.events.contains(&Event::ReachedFinish));
        assert!(out.is_terminal());
    }
}

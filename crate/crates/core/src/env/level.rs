//! Level geometry and the plain-text level format.
//!
//! One character per tile, rows top to bottom:
//!
//! | char | meaning                         |
//! |------|---------------------------------|
//! | `-`  | air                             |
//! | `X`  | platform                        |
//! | `P`  | pipe                            |
//! | `o`  | coin                            |
//! | `E`  | enemy spawn (tile is air)       |
//! | `M`  | agent spawn (tile is air)       |
//! | `F`  | finish column marker (air)      |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::LevelError;

/// Kind of a single level tile. Declaration order is the canonical value order
/// used when enumerating feature values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tile {
    Air,
    Platform,
    Pipe,
    Coin,
}

impl Tile {
    pub const ALL: [Tile; 4] = [Tile::Air, Tile::Platform, Tile::Pipe, Tile::Coin];

    /// Platforms and pipes block movement; coins and air do not.
    pub fn is_solid(self) -> bool {
        matches!(self, Tile::Platform | Tile::Pipe)
    }

    pub fn name(self) -> &'static str {
        match self {
            Tile::Air => "air",
            Tile::Platform => "platform",
            Tile::Pipe => "pipe",
            Tile::Coin => "coin",
        }
    }

    pub fn from_name(name: &str) -> Option<Tile> {
        Tile::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub width: usize,
    pub height: usize,
    /// Row-major, `height` rows of `width` tiles.
    pub tiles: Vec<Tile>,
    pub enemy_spawns: Vec<(usize, usize)>,
    pub agent_spawn: (usize, usize),
    pub finish_column: usize,
}

impl Level {
    /// Parses the text format. Trailing newline is optional; `\r\n` is rejected
    /// as an unknown character so that files stay byte-stable.
    pub fn parse(text: &str) -> Result<Level, LevelError> {
        let rows: Vec<&str> = text.strip_suffix('\n').unwrap_or(text).split('\n').collect();
        if rows.is_empty() || rows[0].is_empty() {
            return Err(LevelError::Empty);
        }
        let width = rows[0].chars().count();
        let height = rows.len();
        let mut tiles = Vec::with_capacity(width * height);
        let mut enemy_spawns = Vec::new();
        let mut agent_spawn = None;
        let mut finish_column = None;

        for (row, line) in rows.iter().enumerate() {
            let len = line.chars().count();
            if len != width {
                return Err(LevelError::NotRectangular { line: row + 1, expected: width, found: len });
            }
            for (col, ch) in line.chars().enumerate() {
                let tile = match ch {
                    '-' => Tile::Air,
                    'X' => Tile::Platform,
                    'P' => Tile::Pipe,
                    'o' => Tile::Coin,
                    'E' => {
                        enemy_spawns.push((col, row));
                        Tile::Air
                    }
                    'M' => {
                        if agent_spawn.replace((col, row)).is_some() {
                            return Err(LevelError::DuplicateAgent { line: row + 1, column: col + 1 });
                        }
                        Tile::Air
                    }
                    'F' => {
                        match finish_column {
                            Some(c) if c != col => {
                                return Err(LevelError::ConflictingFinish { line: row + 1, column: col + 1 })
                            }
                            _ => finish_column = Some(col),
                        }
                        Tile::Air
                    }
                    other => {
                        return Err(LevelError::UnknownChar { ch: other, line: row + 1, column: col + 1 })
                    }
                };
                tiles.push(tile);
            }
        }

        let agent_spawn = agent_spawn.ok_or(LevelError::MissingAgent)?;
        let finish_column = finish_column.ok_or(LevelError::MissingFinish)?;
        let level = Level { width, height, tiles, enemy_spawns, agent_spawn, finish_column };

        let (ax, ay) = level.agent_spawn;
        if !level.is_solid(ax as i32, ay as i32 + 1) {
            return Err(LevelError::UnsupportedSpawn { line: ay + 1, column: ax + 1 });
        }
        for &(ex, ey) in &level.enemy_spawns {
            if !level.is_solid(ex as i32, ey as i32 + 1) {
                return Err(LevelError::UnsupportedSpawn { line: ey + 1, column: ex + 1 });
            }
        }
        Ok(level)
    }

    /// Renders back to the text format, terminated by a newline.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let ch = if (x, y) == self.agent_spawn {
                    'M'
                } else if self.enemy_spawns.contains(&(x, y)) {
                    'E'
                } else {
                    match self.tiles[y * self.width + x] {
                        Tile::Air if x == self.finish_column && !self.finish_marker_elsewhere(x, y) => 'F',
                        Tile::Air => '-',
                        Tile::Platform => 'X',
                        Tile::Pipe => 'P',
                        Tile::Coin => 'o',
                    }
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }

    // The finish marker is written once, on the top-most plain air tile of its column.
    fn finish_marker_elsewhere(&self, x: usize, y: usize) -> bool {
        (0..y).any(|yy| {
            self.tiles[yy * self.width + x] == Tile::Air
                && (x, yy) != self.agent_spawn
                && !self.enemy_spawns.contains(&(x, yy))
        })
    }

    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    pub fn tile(&self, x: i32, y: i32) -> Option<Tile> {
        self.in_bounds(x, y).then(|| self.tiles[y as usize * self.width + x as usize])
    }

    /// Out-of-level cells are not solid here; callers decide how to treat borders.
    pub fn is_solid(&self, x: i32, y: i32) -> bool {
        self.tile(x, y).is_some_and(Tile::is_solid)
    }

    /// Copy of columns `[start, end)`, keeping enemies inside the window.
    /// The agent spawn and finish column are supplied in window coordinates.
    pub fn window(&self, start: usize, end: usize, agent_spawn: (usize, usize), finish_column: usize) -> Level {
        let width = end - start;
        let mut tiles = Vec::with_capacity(width * self.height);
        for y in 0..self.height {
            tiles.extend_from_slice(&self.tiles[y * self.width + start..y * self.width + end]);
        }
        let enemy_spawns = self
            .enemy_spawns
            .iter()
            .filter(|(x, _)| (start..end).contains(x))
            .map(|&(x, y)| (x - start, y))
            .collect();
        Level { width, height: self.height, tiles, enemy_spawns, agent_spawn, finish_column }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_level() {
        let level = Level::parse("---\nM-F\nXXX").unwrap();
        assert_eq!(level.width, 3);
        assert_eq!(level.height, 3);
        assert_eq!(level.agent_spawn, (0, 1));
        assert_eq!(level.finish_column, 2);
        assert_eq!(level.tile(0, 2), Some(Tile::Platform));
        assert_eq!(level.tile(2, 1), Some(Tile::Air));
    }

    #[test]
    fn unknown_character_reports_position() {
        let err = Level::parse("----\nM-?F\nXXXX").unwrap_err();
        assert_eq!(err, LevelError::UnknownChar { ch: '?', line: 2, column: 3 });
        assert!(err.to_string().contains("line 2, column 3"));
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = Level::parse("---\nM-F-\nXXX").unwrap_err();
        assert!(matches!(err, LevelError::NotRectangular { line: 2, .. }));
    }

    #[test]
    fn requires_agent_and_finish() {
        assert_eq!(Level::parse("--F\nXXX").unwrap_err(), LevelError::MissingAgent);
        assert_eq!(Level::parse("M--\nXXX").unwrap_err(), LevelError::MissingFinish);
    }

    #[test]
    fn spawns_must_rest_on_solid_ground() {
        assert!(matches!(
            Level::parse("M-F\n-XX").unwrap_err(),
            LevelError::UnsupportedSpawn { line: 1, column: 1 }
        ));
        assert!(Level::parse("M-F\nPXX").is_ok());
    }

    #[test]
    fn text_round_trip() {
        let text = "-------F\n--oo----\nM--E-P--\nXXXXXPXX\n";
        let level = Level::parse(text).unwrap();
        assert_eq!(level.enemy_spawns, vec![(3, 2)]);
        assert_eq!(level.to_text(), text);
    }

    #[test]
    fn window_shifts_enemies() {
        let level = Level::parse("-------F\nM--E-E--\nXXXXXXXX").unwrap();
        let w = level.window(2, 6, (0, 1), 3);
        assert_eq!(w.width, 4);
        assert_eq!(w.enemy_spawns, vec![(1, 1), (3, 1)]);
        assert_eq!(w.tile(0, 2), Some(Tile::Platform));
    }
}

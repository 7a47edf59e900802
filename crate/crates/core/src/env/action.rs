use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The ten agent actions. Declaration order is canonical: it breaks ties in
/// argmax selections and fixes the serialized order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    WalkLeft,
    WalkRight,
    RunLeft,
    RunRight,
    JumpLeft,
    JumpRight,
    FastJumpLeft,
    FastJumpRight,
    DoNothing,
    NeutralJump,
}

impl Action {
    pub const ALL: [Action; 10] = [
        Action::WalkLeft,
        Action::WalkRight,
        Action::RunLeft,
        Action::RunRight,
        Action::JumpLeft,
        Action::JumpRight,
        Action::FastJumpLeft,
        Action::FastJumpRight,
        Action::DoNothing,
        Action::NeutralJump,
    ];

    pub const COUNT: usize = 10;

    pub fn index(self) -> usize {
        self as usize
    }

    /// Horizontal tiles moved per tick, signed.
    pub fn dx(self) -> i32 {
        match self {
            Action::WalkLeft | Action::JumpLeft => -1,
            Action::WalkRight | Action::JumpRight => 1,
            Action::RunLeft | Action::FastJumpLeft => -2,
            Action::RunRight | Action::FastJumpRight => 2,
            Action::DoNothing | Action::NeutralJump => 0,
        }
    }

    pub fn is_jump(self) -> bool {
        matches!(
            self,
            Action::JumpLeft | Action::JumpRight | Action::FastJumpLeft | Action::FastJumpRight | Action::NeutralJump
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::WalkLeft => "WalkLeft",
            Action::WalkRight => "WalkRight",
            Action::RunLeft => "RunLeft",
            Action::RunRight => "RunRight",
            Action::JumpLeft => "JumpLeft",
            Action::JumpRight => "JumpRight",
            Action::FastJumpLeft => "FastJumpLeft",
            Action::FastJumpRight => "FastJumpRight",
            Action::DoNothing => "DoNothing",
            Action::NeutralJump => "NeutralJump",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown action {0:?}")]
pub struct UnknownAction(pub String);

impl FromStr for Action {
    type Err = UnknownAction;

    /// Accepts the canonical names case-insensitively, ignoring spaces, so that
    /// "Run Right" and "runright" both parse. "Down" is accepted as DoNothing.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let squashed: String = s.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
        if squashed.eq_ignore_ascii_case("down") {
            return Ok(Action::DoNothing);
        }
        Action::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(&squashed))
            .ok_or_else(|| UnknownAction(s.to_string()))
    }
}

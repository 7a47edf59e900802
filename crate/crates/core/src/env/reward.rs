use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const PROGRESS_REWARD: f64 = 1.0;
pub const KILL_REWARD: f64 = 5.0;
pub const COIN_REWARD: f64 = 2.0;
pub const DEATH_REWARD: f64 = -10.0;

/// A named reward component, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    MakeProgressInX,
    KillEnemy,
    CollectCoin,
    Die,
}

impl Component {
    pub const ALL: [Component; 4] =
        [Component::MakeProgressInX, Component::KillEnemy, Component::CollectCoin, Component::Die];

    pub fn name(self) -> &'static str {
        match self {
            Component::MakeProgressInX => "MakeProgressInX",
            Component::KillEnemy => "KillEnemy",
            Component::CollectCoin => "CollectCoin",
            Component::Die => "Die",
        }
    }
}

/// The positive components: the only ones a user can pick as a goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Goal {
    MakeProgressInX,
    KillEnemy,
    CollectCoin,
}

impl Goal {
    pub const ALL: [Goal; 3] = [Goal::MakeProgressInX, Goal::KillEnemy, Goal::CollectCoin];

    pub fn component(self) -> Component {
        match self {
            Goal::MakeProgressInX => Component::MakeProgressInX,
            Goal::KillEnemy => Component::KillEnemy,
            Goal::CollectCoin => Component::CollectCoin,
        }
    }

    pub fn name(self) -> &'static str {
        self.component().name()
    }

    /// Title used in the plan sentence ("to achieve goal ...").
    pub fn title(self) -> &'static str {
        match self {
            Goal::MakeProgressInX => "Make Progress in X",
            Goal::KillEnemy => "Kill an Enemy",
            Goal::CollectCoin => "Collect a Coin",
        }
    }

    /// Verb phrase used in contrasts ("I won't ...").
    pub fn phrase(self) -> &'static str {
        match self {
            Goal::MakeProgressInX => "make progress in X",
            Goal::KillEnemy => "kill an enemy",
            Goal::CollectCoin => "collect a coin",
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0:?} is not a goal (expected MakeProgressInX, KillEnemy or CollectCoin)")]
pub struct NotAGoal(pub String);

impl FromStr for Goal {
    type Err = NotAGoal;

    /// Accepts component names and titles, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let squash = |t: &str| -> String {
            t.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
        };
        let wanted = squash(s);
        Goal::ALL
            .into_iter()
            .find(|g| squash(g.name()) == wanted || squash(g.title()) == wanted)
            .ok_or_else(|| NotAGoal(s.to_string()))
    }
}

/// Per-step reward split by component. Total reward is the plain sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardComponents {
    pub make_progress_in_x: f64,
    pub kill_enemy: f64,
    pub collect_coin: f64,
    pub die: f64,
}

impl RewardComponents {
    pub fn get(&self, c: Component) -> f64 {
        match c {
            Component::MakeProgressInX => self.make_progress_in_x,
            Component::KillEnemy => self.kill_enemy,
            Component::CollectCoin => self.collect_coin,
            Component::Die => self.die,
        }
    }

    pub fn get_mut(&mut self, c: Component) -> &mut f64 {
        match c {
            Component::MakeProgressInX => &mut self.make_progress_in_x,
            Component::KillEnemy => &mut self.kill_enemy,
            Component::CollectCoin => &mut self.collect_coin,
            Component::Die => &mut self.die,
        }
    }

    pub fn goal(&self, g: Goal) -> f64 {
        self.get(g.component())
    }

    pub fn total(&self) -> f64 {
        self.make_progress_in_x + self.kill_enemy + self.collect_coin + self.die
    }

    pub fn scaled(&self, k: f64) -> RewardComponents {
        RewardComponents {
            make_progress_in_x: self.make_progress_in_x * k,
            kill_enemy: self.kill_enemy * k,
            collect_coin: self.collect_coin * k,
            die: self.die * k,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.make_progress_in_x, self.kill_enemy, self.collect_coin, self.die]
    }

    pub fn from_array(v: [f64; 4]) -> RewardComponents {
        RewardComponents { make_progress_in_x: v[0], kill_enemy: v[1], collect_coin: v[2], die: v[3] }
    }
}

impl Add for RewardComponents {
    type Output = RewardComponents;

    fn add(mut self, rhs: RewardComponents) -> RewardComponents {
        self += rhs;
        self
    }
}

impl AddAssign for RewardComponents {
    fn add_assign(&mut self, rhs: RewardComponents) {
        self.make_progress_in_x += rhs.make_progress_in_x;
        self.kill_enemy += rhs.kill_enemy;
        self.collect_coin += rhs.collect_coin;
        self.die += rhs.die;
    }
}

/// Which components count toward the reward a solver maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewardSelector {
    enabled: [bool; 4],
}

impl RewardSelector {
    pub fn all() -> Self {
        RewardSelector { enabled: [true; 4] }
    }

    /// Goal-only shaping: every other component, death included, is dropped.
    pub fn only(goal: Goal) -> Self {
        let mut enabled = [false; 4];
        enabled[goal.component() as usize] = true;
        RewardSelector { enabled }
    }

    pub fn includes(&self, c: Component) -> bool {
        self.enabled[c as usize]
    }

    pub fn apply(&self, r: &RewardComponents) -> f64 {
        Component::ALL.iter().filter(|c| self.includes(**c)).map(|c| r.get(*c)).sum()
    }
}

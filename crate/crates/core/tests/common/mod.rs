#![allow(dead_code)]

pub mod oracles;

use patchbot_core::env::{
    featurize, Action, Distance, FeatureState, FeatureValue, Level, RewardComponents, Tile, Variable, WorldState,
};
use patchbot_core::mdp::{EmpiricalModel, Policy, StateKey, ValueFunction};
use patchbot_core::scenario::SCENARIOS;
use patchbot_core::session::play_episode;

/// A distinct valid state per index (up to 4^9), optionally terminal.
pub fn state(i: usize, dead: bool) -> StateKey {
    StateKey::from(features(i, dead))
}

pub fn features(i: usize, dead: bool) -> FeatureState {
    let mut boxes = [Tile::Air; 9];
    let mut n = i;
    for b in boxes.iter_mut() {
        *b = Tile::ALL[n % 4];
        n /= 4;
    }
    assert_eq!(n, 0, "index {i} too large");
    FeatureState {
        boxes,
        can_jump: !dead,
        on_ground: !dead,
        is_dead: dead,
        is_cliff_near: false,
        any_x_progress: false,
        any_y_progress: false,
        enemy_distance_x: Distance::No,
        enemy_distance_y: Distance::No,
    }
}

/// The B1 question frame with a hand-built model and policy that reproduce the
/// faulty behaviour: running right at an enemy three tiles away.
pub struct B1Fixture {
    pub level: Level,
    pub world: WorldState,
    pub frame_index: usize,
    pub model: EmpiricalModel,
    pub policy: Policy,
    pub values: ValueFunction,
}

pub fn b1_fixture() -> B1Fixture {
    let level = SCENARIOS[0].level();
    let (trace, _) = play_episode(&level, &Policy::new(), 100);
    let frame = trace
        .frames
        .iter()
        .find(|f| {
            let x = f.state_key.features().unwrap();
            x.get(Variable::Box6Type) == FeatureValue::Tile(Tile::Air)
                && x.get(Variable::EnemyDistanceX) == FeatureValue::Distance(Distance::F3)
        })
        .expect("the fallback run passes the enemy at range f3");
    let s = frame.state_key.clone();
    let f = s.features().unwrap();

    let mut policy = Policy::new();
    let mut values = ValueFunction::new();
    let mut model = EmpiricalModel::new();
    policy.insert(s.clone(), Action::RunRight);
    values.insert(s.clone(), 10.0);

    // Neighbours that run right too. Each differs from s in a different group
    // of variables, so only Box6Type and EnemyDistanceX are shared by all.
    let groups: [&[(Variable, FeatureValue)]; 3] = [
        &[
            (Variable::Box1Type, FeatureValue::Tile(Tile::Air)),
            (Variable::Box2Type, FeatureValue::Tile(Tile::Air)),
            (Variable::Box3Type, FeatureValue::Tile(Tile::Air)),
            (Variable::AnyXProgress, FeatureValue::Flag(false)),
        ],
        &[
            (Variable::Box4Type, FeatureValue::Tile(Tile::Coin)),
            (Variable::Box5Type, FeatureValue::Tile(Tile::Coin)),
            (Variable::EnemyDistanceY, FeatureValue::Distance(Distance::F2)),
        ],
        &[
            (Variable::Box7Type, FeatureValue::Tile(Tile::Air)),
            (Variable::Box8Type, FeatureValue::Tile(Tile::Air)),
            (Variable::Box9Type, FeatureValue::Tile(Tile::Air)),
            (Variable::CanJump, FeatureValue::Flag(false)),
            (Variable::OnGround, FeatureValue::Flag(false)),
            (Variable::IsCliffNear, FeatureValue::Flag(true)),
            (Variable::AnyYProgress, FeatureValue::Flag(true)),
        ],
    ];
    for group in groups {
        let mut g = f;
        for (var, val) in group {
            g = g.with(*var, *val).unwrap();
        }
        let k = StateKey::from(g);
        policy.insert(k.clone(), Action::RunRight);
        values.insert(k.clone(), 10.2);
        let progress = RewardComponents { make_progress_in_x: 2.0, ..Default::default() };
        model.record_transition(&s, Action::RunRight, &k, &progress);
    }
    // Same value, other action: keeps Box6Type and EnemyDistanceX from being
    // shared by the whole band.
    for (var, val) in [
        (Variable::Box6Type, FeatureValue::Tile(Tile::Platform)),
        (Variable::EnemyDistanceX, FeatureValue::Distance(Distance::F1)),
    ] {
        let k = StateKey::from(f.with(var, val).unwrap());
        policy.insert(k.clone(), Action::WalkLeft);
        values.insert(k, 9.8);
    }
    let pipe = StateKey::from(f.with(Variable::Box6Type, FeatureValue::Tile(Tile::Pipe)).unwrap());
    policy.insert(pipe.clone(), Action::JumpRight);
    values.insert(pipe, 6.0);

    assert_eq!(StateKey::from(featurize(&frame.world, &level)), s);
    B1Fixture { level, world: frame.world.clone(), frame_index: frame.index, model, policy, values }
}

pub const B1_EXPLANATION: &str = "Because Box6Type is air and EnemyDistanceX is f3, it is certain that it's safe \
performing action RunRight. Therefore, my plan is taking action RunRight to achieve goal Make Progress in X.";
pub const B1_WHYNOT_JUMPRIGHT: &str =
    "If I perform action JumpRight in the long-run is a better option. However, if variable box6Type is pipe I'd perform the suggested action.";
pub const B1_WHY: &str = "The second best option is doing FastJumpLeft.";

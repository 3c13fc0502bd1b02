//! Getout: walk along the ground, pick up the key, reach the door, and jump
//! over a patrolling enemy.
//!
//! The player moves one unit per step. `jump` launches an eight-frame arc
//! that keeps the current facing; left/right still steer while airborne.
//! The enemy patrols the ground at a quarter of the player's speed and
//! turns at the walls or at random.

use super::EnvConfig;
use crate::state::{LogicalState, MapExtent, ObjectRef, ObjectState, Roster};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PLAYER: usize = 0;
pub const KEY: usize = 1;
pub const DOOR: usize = 2;
pub const ENEMY: usize = 3;

const LEFT: usize = 0;
const RIGHT: usize = 1;
const JUMP: usize = 2;

/// Player height on each airborne frame.
const ARC: [f64; 8] = [2.0, 3.25, 4.0, 4.5, 4.5, 4.0, 3.25, 2.0];
const ENEMY_SPEED: f64 = 0.25;
const ENEMY_TURN_PROB: f64 = 0.02;
/// Objects touch when both axis gaps are below this.
const REACH: f64 = 1.0;
/// The teacher jumps when the enemy is ahead and at most this far away.
pub const JUMP_BAND: f64 = 3.5;

pub fn roster() -> Roster {
    Roster::new(vec![
        ObjectRef::new("player", "player"),
        ObjectRef::new("key", "key"),
        ObjectRef::new("door", "door"),
        ObjectRef::new("enemy", "enemy"),
    ])
}

#[derive(Debug, Clone, Default)]
pub struct Getout {
    /// 0 on the ground, 1..=8 while airborne.
    phase: usize,
    facing: f64,
    velocity: f64,
    enemy_dir: f64,
}

fn touching(a: &ObjectState, b: &ObjectState) -> bool {
    a.exists && b.exists && (a.x - b.x).abs() < REACH && (a.y - b.y).abs() < REACH
}

impl Getout {
    pub fn reset(&mut self, map: MapExtent, rng: &mut ChaCha8Rng) -> LogicalState {
        let max = map.width.floor() as i64 - 1;
        let cell = |rng: &mut ChaCha8Rng| rng.gen_range(1..=max) as f64;
        let player = cell(rng);
        let key = loop {
            let k = cell(rng);
            if (k - player).abs() >= 3.0 {
                break k;
            }
        };
        let door = loop {
            let d = cell(rng);
            if (d - player).abs() >= 3.0 && (d - key).abs() >= 3.0 {
                break d;
            }
        };
        let enemy = loop {
            let e = cell(rng);
            if (e - player).abs() >= 8.0 {
                break e;
            }
        };
        self.phase = 0;
        self.facing = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        self.velocity = 0.0;
        self.enemy_dir = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        LogicalState::new(
            vec![
                ObjectState::at(player, 0.0),
                ObjectState::at(key, 0.0),
                ObjectState::at(door, 0.0),
                ObjectState::at(enemy, 0.0),
            ],
            map,
        )
    }

    pub fn step(
        &mut self,
        state: &mut LogicalState,
        action: usize,
        rng: &mut ChaCha8Rng,
        config: &EnvConfig,
    ) -> (f64, bool) {
        let width = state.map.width;
        let mut reward = config.reward("step");

        // player
        match action {
            LEFT => {
                self.facing = -1.0;
                self.velocity = -1.0;
            }
            RIGHT => {
                self.facing = 1.0;
                self.velocity = 1.0;
            }
            JUMP if self.phase == 0 => {
                self.phase = 1;
                self.velocity = self.facing;
            }
            _ => {}
        }
        let p = &mut state.objects[PLAYER];
        p.x = (p.x + self.velocity).clamp(0.0, width);
        if self.phase > 0 {
            if self.phase > ARC.len() {
                self.phase = 0;
                p.y = 0.0;
            } else {
                p.y = ARC[self.phase - 1];
                self.phase += 1;
            }
        }
        if self.phase == 0 {
            self.velocity = 0.0;
        }

        // enemy patrol
        let e = &mut state.objects[ENEMY];
        if rng.gen_bool(ENEMY_TURN_PROB) {
            self.enemy_dir = -self.enemy_dir;
        }
        let next = e.x + self.enemy_dir * ENEMY_SPEED;
        if !(0.0..=width).contains(&next) {
            self.enemy_dir = -self.enemy_dir;
        }
        e.x = (e.x + self.enemy_dir * ENEMY_SPEED).clamp(0.0, width);

        let player = state.objects[PLAYER];
        if touching(&player, &state.objects[ENEMY]) {
            return (reward + config.reward("death"), true);
        }
        if touching(&player, &state.objects[KEY]) {
            state.objects[KEY].exists = false;
            reward += config.reward("key");
        }
        if !state.objects[KEY].exists && touching(&player, &state.objects[DOOR]) {
            return (reward + config.reward("door"), true);
        }
        (reward, false)
    }
}

pub fn oracle(state: &LogicalState) -> usize {
    let p = state.objects[PLAYER];
    let key = state.objects[KEY];
    let target = if key.exists { key } else { state.objects[DOOR] };
    let dx = target.x - p.x;
    let toward = if dx < 0.0 { LEFT } else { RIGHT };
    if p.y > 0.0 {
        return toward;
    }
    let enemy = state.objects[ENEMY];
    if enemy.exists {
        let de = enemy.x - p.x;
        let ahead = de != 0.0 && (de < 0.0) == (dx < 0.0);
        let target_first = dx.abs() <= 1.0 && dx.abs() < de.abs();
        if ahead && de.abs() <= JUMP_BAND && !target_first {
            return JUMP;
        }
    }
    toward
}

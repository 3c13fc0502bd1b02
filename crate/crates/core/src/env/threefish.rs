//! Threefish: the player fish eats the smaller prey and avoids the bigger
//! predator. Both other fish drift at random. Eaten prey respawns away from
//! the player; being eaten ends the episode.

use super::loot::{distinct_cells, move_on_grid};
use super::{direction_deg, sector_action, EnvConfig};
use crate::state::{LogicalState, MapExtent, ObjectRef, ObjectState, Roster};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PLAYER: usize = 0;
pub const PREY: usize = 1;
pub const PREDATOR: usize = 2;

const NOOP: usize = 4;
const PREY_MOVE_PROB: f64 = 0.5;
const PREDATOR_MOVE_PROB: f64 = 0.5;
/// Reset keeps the predator further than this from the player (Manhattan).
const SAFE_START: f64 = 4.0;
/// The teacher flees when the predator is this close (Manhattan).
pub const FLEE_RANGE: f64 = 2.0;

const PLAYER_SIZE: u8 = 2;
const PREY_SIZES: [u8; 1] = [1];
const PREDATOR_SIZES: [u8; 2] = [3, 4];

pub fn roster() -> Roster {
    Roster::new(vec![
        ObjectRef::new("player", "fish"),
        ObjectRef::new("prey", "fish"),
        ObjectRef::new("predator", "fish"),
    ])
}

#[derive(Debug, Clone, Default)]
pub struct Threefish {
    sizes: [u8; 3],
}

fn manhattan(a: &ObjectState, b: &ObjectState) -> f64 {
    (a.x - b.x).abs() + (a.y - b.y).abs()
}

fn same_cell(a: &ObjectState, b: &ObjectState) -> bool {
    a.x == b.x && a.y == b.y
}

impl Threefish {
    pub fn reset(&mut self, map: MapExtent, rng: &mut ChaCha8Rng) -> LogicalState {
        self.sizes = [
            PLAYER_SIZE,
            PREY_SIZES[rng.gen_range(0..PREY_SIZES.len())],
            PREDATOR_SIZES[rng.gen_range(0..PREDATOR_SIZES.len())],
        ];
        debug_assert!(self.sizes[PREY] < self.sizes[PLAYER] && self.sizes[PREDATOR] > self.sizes[PLAYER]);
        loop {
            let pos = distinct_cells(3, map, rng);
            let objects: Vec<ObjectState> = pos.iter().map(|&(x, y)| ObjectState::at(x, y)).collect();
            if manhattan(&objects[PLAYER], &objects[PREDATOR]) > SAFE_START {
                return LogicalState::new(objects, map);
            }
        }
    }

    fn respawn_prey(state: &mut LogicalState, rng: &mut ChaCha8Rng) {
        let map = state.map;
        loop {
            let (x, y) = distinct_cells(1, map, rng)[0];
            let c = ObjectState::at(x, y);
            if manhattan(&c, &state.objects[PLAYER]) >= 4.0 && !same_cell(&c, &state.objects[PREDATOR]) {
                state.objects[PREY] = c;
                return;
            }
        }
    }

    /// Applies eating after any movement; true when the player was eaten.
    fn resolve(state: &mut LogicalState, rng: &mut ChaCha8Rng, config: &EnvConfig, reward: &mut f64) -> bool {
        let p = state.objects[PLAYER];
        if same_cell(&p, &state.objects[PREDATOR]) {
            *reward += config.reward("eaten");
            return true;
        }
        if same_cell(&p, &state.objects[PREY]) {
            *reward += config.reward("eat");
            Self::respawn_prey(state, rng);
        }
        false
    }

    pub fn step(
        &mut self,
        state: &mut LogicalState,
        action: usize,
        rng: &mut ChaCha8Rng,
        config: &EnvConfig,
    ) -> (f64, bool) {
        let map = state.map;
        let mut reward = config.reward("step");
        move_on_grid(&mut state.objects[PLAYER], action, map);
        if Self::resolve(state, rng, config, &mut reward) {
            return (reward, true);
        }

        if rng.gen_bool(PREY_MOVE_PROB) {
            let dir = rng.gen_range(0..4);
            move_on_grid(&mut state.objects[PREY], dir, map);
        }
        if rng.gen_bool(PREDATOR_MOVE_PROB) {
            let dir = rng.gen_range(0..4);
            move_on_grid(&mut state.objects[PREDATOR], dir, map);
        }
        let done = Self::resolve(state, rng, config, &mut reward);
        (reward, done)
    }
}

pub fn oracle(state: &LogicalState) -> usize {
    let p = state.objects[PLAYER];
    let prey = state.objects[PREY];
    let pred = state.objects[PREDATOR];
    let d_pred = manhattan(&p, &pred);
    let d_prey = manhattan(&p, &prey);
    if d_pred <= FLEE_RANGE {
        // the move that gets furthest from the predator, then closest to prey
        return (0..5)
            .map(|a| {
                let mut q = p;
                move_on_grid(&mut q, a, state.map);
                (a, manhattan(&q, &pred), manhattan(&q, &prey))
            })
            .fold(None::<(usize, f64, f64)>, |best, cand| match best {
                Some(b) if b.1 > cand.1 || (b.1 == cand.1 && b.2 <= cand.2) => Some(b),
                _ => Some(cand),
            })
            .map(|b| b.0)
            .unwrap_or(NOOP);
    }
    let toward_prey = sector_action(direction_deg((p.x, p.y), (prey.x, prey.y)));
    let toward_pred = sector_action(direction_deg((p.x, p.y), (pred.x, pred.y)));
    if toward_pred == toward_prey && d_pred < d_prey {
        return NOOP;
    }
    toward_prey
}

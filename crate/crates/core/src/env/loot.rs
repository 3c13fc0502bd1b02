//! Loot: a grid with one or two numbered key/lock pairs. A key only opens
//! the lock with the same number; the episode ends when no lock remains.

use super::{direction_deg, sector_action, EnvConfig};
use crate::state::{LogicalState, MapExtent, ObjectRef, ObjectState, Roster};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const PLAYER: usize = 0;
/// `(key, lock)` slots per pair, in priority order.
pub const PAIRS: [(usize, usize); 2] = [(1, 2), (3, 4)];

pub fn roster() -> Roster {
    Roster::new(vec![
        ObjectRef::new("player", "player"),
        ObjectRef::new("key1", "key"),
        ObjectRef::new("lock1", "lock"),
        ObjectRef::new("key2", "key"),
        ObjectRef::new("lock2", "lock"),
    ])
}

#[derive(Debug, Clone, Default)]
pub struct Loot;

fn cells(map: MapExtent) -> (i64, i64) {
    (map.width as i64, map.height as i64)
}

fn same_cell(a: &ObjectState, b: &ObjectState) -> bool {
    a.exists && b.exists && a.x == b.x && a.y == b.y
}

/// Moves the object one cell; 0 left, 1 right, 2 up, 3 down.
pub(super) fn move_on_grid(o: &mut ObjectState, action: usize, map: MapExtent) {
    let (w, h) = cells(map);
    match action {
        0 => o.x -= 1.0,
        1 => o.x += 1.0,
        2 => o.y += 1.0,
        3 => o.y -= 1.0,
        _ => {}
    }
    o.x = o.x.clamp(0.0, (w - 1) as f64);
    o.y = o.y.clamp(0.0, (h - 1) as f64);
}

/// Distinct random cells.
pub(super) fn distinct_cells(n: usize, map: MapExtent, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let (w, h) = cells(map);
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(n);
    while out.len() < n {
        let c = (rng.gen_range(0..w) as f64, rng.gen_range(0..h) as f64);
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

impl Loot {
    pub fn reset(&mut self, map: MapExtent, rng: &mut ChaCha8Rng) -> LogicalState {
        let pairs = if rng.gen_bool(0.5) { 1 } else { 2 };
        let pos = distinct_cells(1 + 2 * pairs, map, rng);
        let mut objects: Vec<ObjectState> = pos.iter().map(|&(x, y)| ObjectState::at(x, y)).collect();
        objects.resize(5, ObjectState::absent());
        LogicalState::new(objects, map)
    }

    pub fn step(
        &mut self,
        state: &mut LogicalState,
        action: usize,
        _rng: &mut ChaCha8Rng,
        config: &EnvConfig,
    ) -> (f64, bool) {
        let map = state.map;
        move_on_grid(&mut state.objects[PLAYER], action, map);
        let player = state.objects[PLAYER];
        let mut reward = config.reward("step");
        for (key, lock) in PAIRS {
            if same_cell(&player, &state.objects[key]) {
                state.objects[key].exists = false;
            }
            if !state.objects[key].exists && same_cell(&player, &state.objects[lock]) {
                state.objects[lock].exists = false;
                reward += config.reward("lock");
            }
        }
        let done = PAIRS.iter().all(|&(_, lock)| !state.objects[lock].exists);
        (reward, done)
    }
}

pub fn oracle(state: &LogicalState) -> usize {
    let p = state.objects[PLAYER];
    for (key, lock) in PAIRS {
        if !state.objects[lock].exists {
            continue;
        }
        let target = if state.objects[key].exists {
            state.objects[key]
        } else {
            state.objects[lock]
        };
        return sector_action(direction_deg((p.x, p.y), (target.x, target.y)));
    }
    // no lock left: the episode is over and the teacher is never asked
    0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{Env, EnvConfig, EnvId};

    fn layout(objs: [Option<(f64, f64)>; 5]) -> LogicalState {
        LogicalState::new(
            objs.iter()
                .map(|o| match o {
                    Some((x, y)) => ObjectState::at(*x, *y),
                    None => ObjectState::absent(),
                })
                .collect(),
            MapExtent::new(10.0, 10.0),
        )
    }

    #[test]
    fn reset_places_one_or_two_pairs() {
        let mut env = Env::new(EnvConfig::new(EnvId::Loot));
        let mut counts = [0; 3];
        for seed in 0..50 {
            let s = env.reset_seeded(seed);
            let pairs = PAIRS.iter().filter(|&&(k, l)| s.objects[k].exists && s.objects[l].exists).count();
            assert!(pairs == 1 || pairs == 2);
            counts[pairs] += 1;
        }
        assert!(counts[1] > 0 && counts[2] > 0);
    }

    #[test]
    fn key_opens_only_its_lock() {
        let mut env = Env::new(EnvConfig::new(EnvId::Loot));
        env.state = layout([Some((0.0, 0.0)), Some((5.0, 5.0)), Some((6.0, 6.0)), Some((1.0, 0.0)), Some((2.0, 0.0))]);
        // pick key2 then walk onto lock2
        let t = env.step(1).unwrap();
        assert!(!t.state.objects[3].exists);
        let t = env.step(1).unwrap();
        assert!(!t.state.objects[4].exists);
        assert!((t.reward - (3.0 - 0.02)).abs() < 1e-12);
        assert!(!t.done);
    }

    #[test]
    fn lock_without_key_stays_closed() {
        let mut env = Env::new(EnvConfig::new(EnvId::Loot));
        env.state = layout([Some((0.0, 0.0)), Some((5.0, 5.0)), Some((1.0, 0.0)), None, None]);
        let t = env.step(1).unwrap();
        assert!(t.state.objects[2].exists);
        assert!(!t.done);
    }

    #[test]
    fn last_lock_ends_episode() {
        let mut env = Env::new(EnvConfig::new(EnvId::Loot));
        env.state = layout([Some((0.0, 0.0)), None, Some((0.0, 1.0)), None, None]);
        let t = env.step(2).unwrap();
        assert!(t.done);
    }

    #[test]
    fn oracle_follows_pair_order() {
        // key1 above the player, key2 to the right
        let s = layout([Some((5.0, 5.0)), Some((5.0, 8.0)), Some((0.0, 0.0)), Some((9.0, 5.0)), Some((9.0, 9.0))]);
        assert_eq!(oracle(&s), 2);
        // key1 collected: head for lock1 at the lower left
        let s = layout([Some((5.0, 5.0)), None, Some((0.0, 1.0)), Some((9.0, 5.0)), Some((9.0, 9.0))]);
        assert_eq!(oracle(&s), 0);
        // pair 1 done
        let s = layout([Some((5.0, 5.0)), None, None, Some((5.0, 1.0)), Some((9.0, 9.0))]);
        assert_eq!(oracle(&s), 3);
    }
}

#![allow(dead_code)]

use nesy::env::EnvId;
use nesy::fol::{Atom, BoundObject, PhysicalConcept, Predicate, ReferenceRange};
use nesy::search::base_language;
use nesy::state::{LogicalState, MapExtent, ObjectState, Roster};
use rand::Rng;

pub const WIDTH: f64 = 40.0;
pub const HEIGHT: f64 = 8.0;

/// A crisp predicate described independently of the library types.
#[derive(Debug, Clone)]
pub enum Spec {
    Dist { a: usize, b: usize, lo: f64, hi: f64 },
    Dir { a: usize, b: usize, lo: f64, hi: f64 },
    Gone { o: usize },
}

pub fn roster() -> Roster {
    base_language(EnvId::Getout).roster().clone()
}

fn bound(roster: &Roster, slot: usize) -> BoundObject {
    BoundObject {
        slot,
        object: roster.objects()[slot].clone(),
    }
}

impl Spec {
    pub fn atom(&self, roster: &Roster) -> Atom {
        match *self {
            Spec::Dist { a, b, lo, hi } => Atom::new(Predicate::range(
                ReferenceRange::new(PhysicalConcept::distance(), lo, hi).unwrap(),
                bound(roster, a),
                bound(roster, b),
            )),
            Spec::Dir { a, b, lo, hi } => Atom::new(Predicate::range(
                ReferenceRange::new(PhysicalConcept::direction(), lo, hi).unwrap(),
                bound(roster, a),
                bound(roster, b),
            )),
            Spec::Gone { o } => Atom::new(Predicate::not_exist(bound(roster, o))),
        }
    }

    /// Truth value computed straight from coordinates.
    pub fn holds(&self, s: &LogicalState) -> bool {
        let o = &s.objects;
        match *self {
            Spec::Dist { a, b, lo, hi } => {
                if !(o[a].exists && o[b].exists) {
                    return false;
                }
                let dx = o[a].x - o[b].x;
                let dy = o[a].y - o[b].y;
                let d = (dx * dx + dy * dy).sqrt() / (WIDTH * WIDTH + HEIGHT * HEIGHT).sqrt();
                lo <= d && d < hi
            }
            Spec::Dir { a, b, lo, hi } => {
                if !(o[a].exists && o[b].exists) {
                    return false;
                }
                let mut deg = (o[a].y - o[b].y).atan2(o[a].x - o[b].x) * 180.0 / std::f64::consts::PI;
                if deg < 0.0 {
                    deg += 360.0;
                }
                if deg >= 360.0 {
                    deg = 0.0;
                }
                lo <= deg && deg < hi
            }
            Spec::Gone { o: i } => !o[i].exists,
        }
    }
}

/// Getout-shaped state on an integer grid, so ties and exact bin edges occur.
pub fn random_state(rng: &mut impl Rng) -> LogicalState {
    let objects = (0..4)
        .map(|i| {
            if i > 0 && rng.gen_bool(0.15) {
                ObjectState::absent()
            } else {
                ObjectState::at(rng.gen_range(0..=40) as f64, rng.gen_range(0..=8) as f64)
            }
        })
        .collect();
    LogicalState::new(objects, MapExtent::new(WIDTH, HEIGHT))
}

fn pair(rng: &mut impl Rng) -> (usize, usize) {
    let a = rng.gen_range(1..4);
    if rng.gen_bool(0.8) {
        (a, 0)
    } else {
        let b = (a + rng.gen_range(1..4)) % 4;
        (a, b)
    }
}

pub fn random_spec(rng: &mut impl Rng) -> Spec {
    match rng.gen_range(0..5) {
        0 | 1 => {
            let (a, b) = pair(rng);
            let n = rng.gen_range(1..=100);
            let i = rng.gen_range(0..n);
            Spec::Dist {
                a,
                b,
                lo: i as f64 / n as f64,
                hi: (i + 1) as f64 / n as f64,
            }
        }
        2 | 3 => {
            let (a, b) = pair(rng);
            let n = rng.gen_range(1..=90);
            let i = rng.gen_range(0..n);
            Spec::Dir {
                a,
                b,
                lo: i as f64 * 360.0 / n as f64,
                hi: (i + 1) as f64 * 360.0 / n as f64,
            }
        }
        _ => Spec::Gone { o: rng.gen_range(1..4) },
    }
}

/// Direction bins of one object around the player.
pub fn dir_bins(roster: &Roster, object: usize, n: usize) -> Vec<Atom> {
    (0..n)
        .map(|i| {
            Atom::new(Predicate::range(
                ReferenceRange::bin(PhysicalConcept::direction(), i, n),
                bound(roster, object),
                bound(roster, 0),
            ))
        })
        .collect()
}

//! Soft truth values of atoms and clause bodies on a single state.
//!
//! Conjunction is the product of atom valuations and disjunction (for
//! invented predicates) is the maximum. On crisp atoms both reduce to
//! ordinary boolean logic.

use super::{Atom, BoundObject, Clause, ConceptTag, FolError, PhysicalConcept, Predicate};
use crate::state::{LogicalState, ObjectState};

fn object<'s>(state: &'s LogicalState, o: &BoundObject) -> Result<&'s ObjectState, FolError> {
    state.object(o.slot).ok_or(FolError::RosterSlot {
        slot: o.slot,
        len: state.objects.len(),
    })
}

/// Concept value of `a` relative to `b`.
///
/// Distance is Euclidean distance over the map diagonal. Direction is the
/// angle of the displacement `a - b`, counter-clockwise from the positive
/// x-axis, in degrees within `[0, 360)`.
pub fn measure(concept: PhysicalConcept, a: &ObjectState, b: &ObjectState, state: &LogicalState) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    match concept.tag {
        ConceptTag::Distance => dx.hypot(dy) / state.map.diagonal(),
        ConceptTag::Direction => {
            let deg = dy.atan2(dx).to_degrees();
            let deg = if deg < 0.0 { deg + 360.0 } else { deg };
            // -tiny + 360 can round up to exactly 360
            if deg >= 360.0 {
                0.0
            } else {
                deg
            }
        }
    }
}

pub fn eval_atom(atom: &Atom, state: &LogicalState) -> Result<f64, FolError> {
    match &*atom.predicate {
        Predicate::Range { range, pair } => {
            let a = object(state, &pair.0)?;
            let b = object(state, &pair.1)?;
            if !(a.exists && b.exists) {
                return Ok(0.0);
            }
            let v = measure(range.concept, a, b, state);
            Ok(if range.contains(v) { 1.0 } else { 0.0 })
        }
        Predicate::NotExist { object: o } => {
            Ok(if object(state, o)?.exists { 0.0 } else { 1.0 })
        }
        Predicate::Invented { explanations, .. } => {
            let mut best: f64 = 0.0;
            for body in explanations {
                best = best.max(eval_body(body, state)?);
                if best >= 1.0 {
                    break;
                }
            }
            Ok(best)
        }
        Predicate::Action { .. } => Err(FolError::UnknownPredicate(atom.predicate.name())),
    }
}

/// Product of atom valuations; the empty body is true.
pub fn eval_body(body: &[Atom], state: &LogicalState) -> Result<f64, FolError> {
    let mut v = 1.0;
    for atom in body {
        v *= eval_atom(atom, state)?;
        if v == 0.0 {
            break;
        }
    }
    Ok(v)
}

pub fn eval_clause_body(clause: &Clause, state: &LogicalState) -> Result<f64, FolError> {
    eval_body(clause.body(), state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{ReferenceRange, PhysicalConcept};
    use crate::state::{MapExtent, ObjectRef, Roster};

    fn roster() -> Roster {
        Roster::new(vec![
            ObjectRef::new("player", "player"),
            ObjectRef::new("enemy", "enemy"),
            ObjectRef::new("key", "key"),
        ])
    }

    fn bound(name: &str) -> BoundObject {
        BoundObject::resolve(&roster(), name).unwrap()
    }

    fn range_atom(concept: PhysicalConcept, lo: f64, hi: f64, a: &str, b: &str) -> Atom {
        Atom::new(Predicate::range(
            ReferenceRange::new(concept, lo, hi).unwrap(),
            bound(a),
            bound(b),
        ))
    }

    fn state(objs: &[(bool, f64, f64)], w: f64, h: f64) -> LogicalState {
        LogicalState::new(
            objs.iter()
                .map(|&(exists, x, y)| ObjectState { exists, x, y })
                .collect(),
            MapExtent::new(w, h),
        )
    }

    #[test]
    fn distance_three_four_five() {
        // diagonal of a 6x8 map is 10
        let s = state(&[(true, 0.0, 0.0), (true, 3.0, 4.0), (true, 0.0, 0.0)], 6.0, 8.0);
        let d = measure(PhysicalConcept::distance(), &s.objects[1], &s.objects[0], &s);
        assert_eq!(d, 0.5);
    }

    #[test]
    fn direction_axis_convention() {
        let s = state(&[(true, 5.0, 5.0), (true, 7.0, 5.0), (true, 5.0, 9.0)], 10.0, 10.0);
        let dir = PhysicalConcept::direction();
        assert_eq!(measure(dir, &s.objects[1], &s.objects[0], &s), 0.0);
        assert_eq!(measure(dir, &s.objects[2], &s.objects[0], &s), 90.0);
        assert_eq!(measure(dir, &s.objects[0], &s.objects[1], &s), 180.0);
        assert_eq!(measure(dir, &s.objects[0], &s.objects[2], &s), 270.0);
    }

    #[test]
    fn direction_never_reaches_360() {
        let s = state(&[(true, 5.0, 5.0), (true, 6.0, 5.0 - 1e-300), (true, 0.0, 0.0)], 10.0, 10.0);
        let v = measure(PhysicalConcept::direction(), &s.objects[1], &s.objects[0], &s);
        assert!((0.0..360.0).contains(&v));
    }

    #[test]
    fn self_distance_is_in_first_bin() {
        let s = state(&[(true, 2.0, 1.0), (true, 9.0, 9.0), (true, 0.0, 0.0)], 10.0, 10.0);
        let a = range_atom(PhysicalConcept::distance(), 0.0, 0.01, "player", "player");
        assert_eq!(eval_atom(&a, &s).unwrap(), 1.0);
    }

    #[test]
    fn enemy_distance_bin() {
        // |(4.5, 0)| / 100 = 0.045 on a 60x80 map
        let s = state(&[(true, 10.0, 0.0), (true, 14.5, 0.0), (true, 0.0, 0.0)], 60.0, 80.0);
        let a = range_atom(PhysicalConcept::distance(), 0.04, 0.05, "enemy", "player");
        assert_eq!(eval_atom(&a, &s).unwrap(), 1.0);
        let b = range_atom(PhysicalConcept::distance(), 0.05, 0.06, "enemy", "player");
        assert_eq!(eval_atom(&b, &s).unwrap(), 0.0);
    }

    #[test]
    fn absent_objects_falsify_ranges() {
        let s = state(&[(true, 1.0, 1.0), (false, 1.0, 1.0), (true, 0.0, 0.0)], 10.0, 10.0);
        let a = range_atom(PhysicalConcept::distance(), 0.0, 0.01, "enemy", "player");
        assert_eq!(eval_atom(&a, &s).unwrap(), 0.0);
    }

    #[test]
    fn not_exist() {
        let s = state(&[(true, 1.0, 1.0), (true, 1.0, 1.0), (true, 0.0, 0.0)], 10.0, 10.0);
        let a = Atom::new(Predicate::not_exist(bound("key")));
        assert_eq!(eval_atom(&a, &s).unwrap(), 0.0);
        let mut s2 = s.clone();
        s2.objects[2].exists = false;
        assert_eq!(eval_atom(&a, &s2).unwrap(), 1.0);
    }

    #[test]
    fn missing_slot_is_a_roster_error() {
        let s = state(&[(true, 1.0, 1.0)], 10.0, 10.0);
        let a = Atom::new(Predicate::not_exist(bound("key")));
        assert!(matches!(eval_atom(&a, &s), Err(FolError::RosterSlot { .. })));
    }

    #[test]
    fn conjunction_and_disjunction() {
        let s = state(&[(true, 0.0, 0.0), (true, 1.0, 0.0), (false, 0.0, 0.0)], 10.0, 10.0);
        let head = Atom::new(Predicate::action("jump", 0));
        let t = Atom::new(Predicate::not_exist(bound("key")));
        let f = Atom::new(Predicate::not_exist(bound("enemy")));
        let dir0 = range_atom(PhysicalConcept::direction(), 0.0, 4.0, "enemy", "player");

        let empty = Clause::init(head.clone()).unwrap();
        assert_eq!(eval_clause_body(&empty, &s).unwrap(), 1.0);
        let mixed = Clause::new(head.clone(), vec![t.clone(), f.clone()]).unwrap();
        assert_eq!(eval_clause_body(&mixed, &s).unwrap(), 0.0);
        let all = Clause::new(head, vec![t.clone(), dir0.clone(), range_atom(PhysicalConcept::distance(), 0.0, 0.5, "enemy", "player")]).unwrap();
        assert_eq!(eval_clause_body(&all, &s).unwrap(), 1.0);

        let inv = Atom::new(Predicate::invented("InvP1", vec![vec![f.clone()], vec![dir0]]).unwrap());
        assert_eq!(eval_atom(&inv, &s).unwrap(), 1.0);
        let inv_false = Atom::new(Predicate::invented("InvP2", vec![vec![f]]).unwrap());
        assert_eq!(eval_atom(&inv_false, &s).unwrap(), 0.0);
    }
}

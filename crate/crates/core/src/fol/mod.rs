//! First-order vocabulary for action rules.
//!
//! Atoms never contain object variables: every object argument is a roster
//! constant, and the only variable is the trailing state variable `X`. That
//! makes an atom fully determined by its predicate, so [`Atom`] is a thin
//! handle over a shared [`Predicate`].

mod eval;
mod syntax;

pub use eval::{eval_atom, eval_body, eval_clause_body, measure};
pub use syntax::{
    format_clause, is_invented_name, parse_clause, parse_rule_file, write_rule_file, RuleFile,
    Statement,
};

use crate::state::{ObjectRef, Roster};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Name of the state variable that ends every atom.
pub const STATE_VAR: &str = "X";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FolError {
    #[error("object `{0}` is not in the roster")]
    UnknownObject(String),
    #[error("roster slot {slot} out of range for a state with {len} objects")]
    RosterSlot { slot: usize, len: usize },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("predicate `{name}` expects {expected} arguments, got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid reference range [{lo},{hi}) for {concept}")]
    InvalidRange { lo: f64, hi: f64, concept: String },
    #[error("duplicate atom `{0}` in clause body")]
    DuplicateAtom(String),
    #[error("clause head `{0}` is not an action")]
    NotActionHead(String),
    #[error("invented predicate `{0}` needs at least one explanation clause")]
    EmptyExplanation(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConceptTag {
    Distance,
    Direction,
}

/// A measurable relation between two objects, with its normalization bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConcept {
    pub tag: ConceptTag,
    pub max_value: f64,
}

impl PhysicalConcept {
    /// Distance normalized by the map diagonal, so values lie in [0, 1].
    pub fn distance() -> Self {
        Self {
            tag: ConceptTag::Distance,
            max_value: 1.0,
        }
    }

    /// Direction in degrees.
    pub fn direction() -> Self {
        Self {
            tag: ConceptTag::Direction,
            max_value: 360.0,
        }
    }

    pub fn from_tag(tag: ConceptTag) -> Self {
        match tag {
            ConceptTag::Distance => Self::distance(),
            ConceptTag::Direction => Self::direction(),
        }
    }

    /// Predicate name prefix, e.g. `Dist` in `Dist_[0,0.01)`.
    pub fn prefix(&self) -> &'static str {
        match self.tag {
            ConceptTag::Distance => "Dist",
            ConceptTag::Direction => "Dir",
        }
    }

    pub fn from_prefix(prefix: &str) -> Option<Self> {
        match prefix {
            "Dist" => Some(Self::distance()),
            "Dir" => Some(Self::direction()),
            _ => None,
        }
    }
}

/// Half-open interval `[lo, hi)` of a concept value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRange {
    pub lo: f64,
    pub hi: f64,
    pub concept: PhysicalConcept,
}

impl ReferenceRange {
    pub fn new(concept: PhysicalConcept, lo: f64, hi: f64) -> Result<Self, FolError> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= concept.max_value)
        {
            return Err(FolError::InvalidRange {
                lo,
                hi,
                concept: concept.prefix().to_string(),
            });
        }
        Ok(Self { lo, hi, concept })
    }

    /// The `index`-th of `n_bins` equal-width bins over `[0, max_value)`.
    pub fn bin(concept: PhysicalConcept, index: usize, n_bins: usize) -> Self {
        assert!(n_bins >= 1 && index < n_bins);
        let lo = index as f64 * concept.max_value / n_bins as f64;
        let hi = (index + 1) as f64 * concept.max_value / n_bins as f64;
        Self { lo, hi, concept }
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lo <= value && value < self.hi
    }

    /// Canonical predicate name, e.g. `Dir_[4,8)`.
    pub fn predicate_name(&self) -> String {
        format!("{}_[{},{})", self.concept.prefix(), self.lo, self.hi)
    }
}

/// An object constant resolved to its roster slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundObject {
    pub slot: usize,
    pub object: ObjectRef,
}

impl BoundObject {
    pub fn resolve(roster: &Roster, name: &str) -> Result<Self, FolError> {
        let slot = roster
            .slot_of(name)
            .ok_or_else(|| FolError::UnknownObject(name.to_string()))?;
        Ok(Self {
            slot,
            object: roster.objects()[slot].clone(),
        })
    }

    pub fn name(&self) -> &str {
        &self.object.name
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredicateKind {
    Action,
    RangeState,
    Existence,
    InventedSufficiency,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// Head predicate for an action, e.g. `Jump`.
    Action { action: String, index: usize },
    /// True when the concept value of `(pair.0, pair.1)` lies in `range`.
    Range {
        range: ReferenceRange,
        pair: (BoundObject, BoundObject),
    },
    /// `NotExist(o, X)`: true when `o` is absent.
    NotExist { object: BoundObject },
    /// Disjunction of its explanation bodies.
    Invented {
        name: String,
        explanations: Vec<Vec<Atom>>,
    },
}

impl Predicate {
    pub fn action(action: &str, index: usize) -> Self {
        Predicate::Action {
            action: action.to_string(),
            index,
        }
    }

    pub fn range(range: ReferenceRange, a: BoundObject, b: BoundObject) -> Self {
        Predicate::Range {
            range,
            pair: (a, b),
        }
    }

    pub fn not_exist(object: BoundObject) -> Self {
        Predicate::NotExist { object }
    }

    /// Bodies are canonicalized and deduplicated; at least one is required.
    pub fn invented(name: impl Into<String>, explanations: Vec<Vec<Atom>>) -> Result<Self, FolError> {
        let name = name.into();
        let mut bodies: Vec<Vec<Atom>> = explanations
            .into_iter()
            .map(|mut b| {
                b.sort();
                b.dedup();
                b
            })
            .collect();
        bodies.sort();
        bodies.dedup();
        if bodies.is_empty() {
            return Err(FolError::EmptyExplanation(name));
        }
        Ok(Predicate::Invented {
            name,
            explanations: bodies,
        })
    }

    pub fn name(&self) -> String {
        match self {
            Predicate::Action { action, .. } => action_predicate_name(action),
            Predicate::Range { range, .. } => range.predicate_name(),
            Predicate::NotExist { .. } => "NotExist".to_string(),
            Predicate::Invented { name, .. } => name.clone(),
        }
    }

    pub fn kind(&self) -> PredicateKind {
        match self {
            Predicate::Action { .. } => PredicateKind::Action,
            Predicate::Range { .. } => PredicateKind::RangeState,
            Predicate::NotExist { .. } => PredicateKind::Existence,
            Predicate::Invented { .. } => PredicateKind::InventedSufficiency,
        }
    }

    /// Number of arguments including the trailing state variable.
    pub fn arity(&self) -> usize {
        match self {
            Predicate::Action { .. } | Predicate::Invented { .. } => 1,
            Predicate::Range { .. } => 3,
            Predicate::NotExist { .. } => 2,
        }
    }

    /// Object constants, in argument order.
    pub fn objects(&self) -> Vec<&BoundObject> {
        match self {
            Predicate::Range { pair, .. } => vec![&pair.0, &pair.1],
            Predicate::NotExist { object } => vec![object],
            _ => Vec::new(),
        }
    }
}

/// `left` becomes `Left`.
pub fn action_predicate_name(action: &str) -> String {
    let mut chars = action.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// A predicate applied to its constants and the state variable.
#[derive(Debug, Clone)]
pub struct Atom {
    pub predicate: Arc<Predicate>,
}

impl Atom {
    pub fn new(predicate: Predicate) -> Self {
        Self {
            predicate: Arc::new(predicate),
        }
    }

    pub fn from_arc(predicate: Arc<Predicate>) -> Self {
        Self { predicate }
    }

    /// Argument names, ending with the state variable.
    pub fn args(&self) -> Vec<&str> {
        let mut args: Vec<&str> = self.predicate.objects().into_iter().map(|o| o.name()).collect();
        args.push(STATE_VAR);
        args
    }

    fn key(&self) -> (String, Vec<&str>) {
        (self.predicate.name(), self.args())
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.predicate, &other.predicate) || self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Atom {}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl std::hash::Hash for Atom {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.predicate.name(), self.args().join(","))
    }
}

/// `Head(X):-B1,...,Bn.` with an action head and a canonically sorted body.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    head: Atom,
    body: Vec<Atom>,
}

impl Clause {
    pub fn new(head: Atom, mut body: Vec<Atom>) -> Result<Self, FolError> {
        if head.predicate.kind() != PredicateKind::Action {
            return Err(FolError::NotActionHead(head.to_string()));
        }
        if let Some(a) = body.iter().find(|a| a.predicate.kind() == PredicateKind::Action) {
            return Err(FolError::UnknownPredicate(a.predicate.name()));
        }
        body.sort();
        if let Some(w) = body.windows(2).find(|w| w[0] == w[1]) {
            return Err(FolError::DuplicateAtom(w[0].to_string()));
        }
        Ok(Self { head, body })
    }

    /// The always-true rule `Action(X):-.`
    pub fn init(head: Atom) -> Result<Self, FolError> {
        Self::new(head, Vec::new())
    }

    pub fn head(&self) -> &Atom {
        &self.head
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    /// Action index of the head.
    pub fn action_index(&self) -> usize {
        match &*self.head.predicate {
            Predicate::Action { index, .. } => *index,
            _ => unreachable!("clause heads are actions"),
        }
    }

    pub fn action(&self) -> &str {
        match &*self.head.predicate {
            Predicate::Action { action, .. } => action,
            _ => unreachable!("clause heads are actions"),
        }
    }

    /// This clause with one more body atom, or `None` if the atom is present.
    pub fn extended(&self, atom: &Atom) -> Option<Clause> {
        let pos = match self.body.binary_search(atom) {
            Ok(_) => return None,
            Err(p) => p,
        };
        let mut body = self.body.clone();
        body.insert(pos, atom.clone());
        Some(Clause {
            head: self.head.clone(),
            body,
        })
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_clause(self))
    }
}

/// Vocabulary available to rules in one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Language {
    roster: Roster,
    actions: Vec<String>,
    concepts: Vec<PhysicalConcept>,
    /// Range predicates admitted so far (necessity predicates).
    ranges: Vec<Atom>,
    /// Sufficiency predicates, in invention order.
    invented: Vec<Atom>,
}

impl Language {
    pub fn new(roster: Roster, actions: Vec<String>, concepts: Vec<PhysicalConcept>) -> Self {
        Self {
            roster,
            actions,
            concepts,
            ranges: Vec::new(),
            invented: Vec::new(),
        }
    }

    pub fn roster(&self) -> &Roster {
        &self.roster
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn concepts(&self) -> &[PhysicalConcept] {
        &self.concepts
    }

    pub fn concept(&self, tag: ConceptTag) -> Option<PhysicalConcept> {
        self.concepts.iter().copied().find(|c| c.tag == tag)
    }

    pub fn action_index(&self, action: &str) -> Result<usize, FolError> {
        self.actions
            .iter()
            .position(|a| a == action)
            .ok_or_else(|| FolError::UnknownAction(action.to_string()))
    }

    /// Head atom `Action(X)` for an action name.
    pub fn action_atom(&self, action: &str) -> Result<Atom, FolError> {
        let index = self.action_index(action)?;
        Ok(Atom::new(Predicate::action(action, index)))
    }

    /// Resolves a head predicate name such as `Jump`.
    pub fn action_by_predicate_name(&self, name: &str) -> Option<&str> {
        self.actions
            .iter()
            .find(|a| action_predicate_name(a) == name)
            .map(String::as_str)
    }

    /// `NotExist(o, X)` for every roster object.
    pub fn existence_atoms(&self) -> Vec<Atom> {
        self.roster
            .objects()
            .iter()
            .enumerate()
            .map(|(slot, o)| {
                Atom::new(Predicate::not_exist(BoundObject {
                    slot,
                    object: o.clone(),
                }))
            })
            .collect()
    }

    pub fn range_atoms(&self) -> &[Atom] {
        &self.ranges
    }

    pub fn invented_atoms(&self) -> &[Atom] {
        &self.invented
    }

    pub fn invented(&self, name: &str) -> Option<&Atom> {
        self.invented.iter().find(|a| a.predicate.name() == name)
    }

    /// Adds range predicates not already present.
    pub fn add_ranges(&mut self, atoms: impl IntoIterator<Item = Atom>) {
        for a in atoms {
            if !self.ranges.contains(&a) {
                self.ranges.push(a);
            }
        }
    }

    pub fn clear_ranges(&mut self) {
        self.ranges.clear();
    }

    /// Registers an invented predicate. If one with the same explanation set
    /// exists, that atom is returned instead.
    pub fn add_invented(&mut self, atom: Atom) -> Atom {
        if let Predicate::Invented { explanations, .. } = &*atom.predicate {
            for existing in &self.invented {
                if let Predicate::Invented { explanations: e, .. } = &*existing.predicate {
                    if e == explanations {
                        return existing.clone();
                    }
                }
            }
        }
        self.invented.push(atom.clone());
        atom
    }

    /// Next free `InvP<k>` name.
    pub fn next_invented_name(&self) -> String {
        format!("InvP{}", self.invented.len() + 1)
    }

    /// State atoms eligible for clause extension: range predicates,
    /// existence atoms and invented predicates.
    pub fn body_atoms(&self) -> Vec<Atom> {
        let mut atoms = self.ranges.clone();
        atoms.extend(self.existence_atoms());
        atoms.extend(self.invented.iter().cloned());
        atoms
    }
}

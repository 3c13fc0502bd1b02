//! Predicate invention.
//!
//! Necessity of an expression on an action is its mean valuation over the
//! positive states of that action; sufficiency is the mean of one minus the
//! valuation over the negative states. Necessity predicates are range
//! predicates binned over a physical concept and ranked by necessity.
//! Sufficiency predicates are disjunctions of single-range rules over the
//! same object pair and concept, pruned greedily until sufficient.

use crate::fol::{
    eval_atom, eval_body, Atom, BoundObject, Clause, ConceptTag, FolError, Language, PhysicalConcept,
    Predicate, ReferenceRange,
};
use crate::state::{LogicalState, Roster};
use rayon::prelude::*;
use std::cmp::Ordering;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InventError {
    #[error("no positive states for action `{0}`")]
    EmptyPositive(String),
    #[error("no negative states for action `{0}`")]
    EmptyNegative(String),
    #[error(transparent)]
    Fol(#[from] FolError),
}

/// Anything with a valuation on a state.
pub trait Evaluate {
    fn eval(&self, state: &LogicalState) -> Result<f64, FolError>;
}

impl Evaluate for Atom {
    fn eval(&self, state: &LogicalState) -> Result<f64, FolError> {
        eval_atom(self, state)
    }
}

impl Evaluate for Clause {
    fn eval(&self, state: &LogicalState) -> Result<f64, FolError> {
        eval_body(self.body(), state)
    }
}

impl Evaluate for [Atom] {
    fn eval(&self, state: &LogicalState) -> Result<f64, FolError> {
        eval_body(self, state)
    }
}

/// Mean valuation over the positive states.
pub fn necessity<E: Evaluate + ?Sized>(expr: &E, s_plus: &[&LogicalState]) -> Result<f64, InventError> {
    if s_plus.is_empty() {
        return Err(InventError::EmptyPositive(String::new()));
    }
    let mut sum = 0.0;
    for s in s_plus {
        sum += expr.eval(s)?;
    }
    Ok(sum / s_plus.len() as f64)
}

/// Mean of one minus the valuation over the negative states.
pub fn sufficiency<E: Evaluate + ?Sized>(expr: &E, s_minus: &[&LogicalState]) -> Result<f64, InventError> {
    if s_minus.is_empty() {
        return Err(InventError::EmptyNegative(String::new()));
    }
    let mut sum = 0.0;
    for s in s_minus {
        sum += 1.0 - expr.eval(s)?;
    }
    Ok(sum / s_minus.len() as f64)
}

/// A clause or predicate with its scores for one action.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredExpression<T> {
    pub expression: T,
    pub necessity: f64,
    pub sufficiency: f64,
}

/// Every ordered pair `(a, b)` with `a != b`.
pub fn all_pairs(roster: &Roster) -> Vec<(BoundObject, BoundObject)> {
    let bound: Vec<BoundObject> = roster
        .objects()
        .iter()
        .enumerate()
        .map(|(slot, o)| BoundObject { slot, object: o.clone() })
        .collect();
    let mut out = Vec::new();
    for a in &bound {
        for b in &bound {
            if a.slot != b.slot {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

/// Pairs `(other, agent)` for every non-agent object.
pub fn agent_pairs(roster: &Roster, agent: &str) -> Result<Vec<(BoundObject, BoundObject)>, FolError> {
    let agent = BoundObject::resolve(roster, agent)?;
    Ok(all_pairs(roster).into_iter().filter(|(_, b)| b.slot == agent.slot).collect())
}

/// One range predicate per ordered pair and bin of width `max_value / n_bins`.
pub fn generate_range_predicates(concept: PhysicalConcept, n_bins: usize, roster: &Roster) -> Vec<Atom> {
    range_predicates_for(concept, n_bins, &all_pairs(roster))
}

pub fn range_predicates_for(
    concept: PhysicalConcept,
    n_bins: usize,
    pairs: &[(BoundObject, BoundObject)],
) -> Vec<Atom> {
    assert!(n_bins >= 1, "n_bins must be positive");
    let mut out = Vec::with_capacity(pairs.len() * n_bins);
    for (a, b) in pairs {
        for i in 0..n_bins {
            let range = ReferenceRange::bin(concept, i, n_bins);
            out.push(Atom::new(Predicate::range(range, a.clone(), b.clone())));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct InventionConfig {
    /// Distance bins; 0 disables the concept.
    pub dist_bins: usize,
    /// Direction bins; 0 disables the concept.
    pub dir_bins: usize,
    pub min_ness: f64,
    pub top_k_ness: usize,
    /// Sufficiency target for greedy reduction.
    pub t_s: f64,
    pub top_k_suff: usize,
    /// Use every ordered object pair instead of `(other, agent)` pairs.
    pub full_pairs: bool,
    pub agent: String,
}

impl Default for InventionConfig {
    fn default() -> Self {
        Self {
            dist_bins: 100,
            dir_bins: 90,
            min_ness: 0.1,
            top_k_ness: 50,
            t_s: 0.9,
            top_k_suff: 5,
            full_pairs: false,
            agent: "player".into(),
        }
    }
}

impl InventionConfig {
    fn bins(&self, tag: ConceptTag) -> usize {
        match tag {
            ConceptTag::Distance => self.dist_bins,
            ConceptTag::Direction => self.dir_bins,
        }
    }

    /// All candidate range predicates for the concepts of `language`.
    pub fn candidates(&self, language: &Language) -> Result<Vec<Atom>, FolError> {
        let pairs = if self.full_pairs {
            all_pairs(language.roster())
        } else {
            agent_pairs(language.roster(), &self.agent)?
        };
        let mut out = Vec::new();
        for c in language.concepts() {
            let n = self.bins(c.tag);
            if n > 0 {
                out.extend(range_predicates_for(*c, n, &pairs));
            }
        }
        Ok(out)
    }
}

/// Necessity descending, then canonical text.
fn by_necessity<T: ToString>(a: &ScoredExpression<T>, b: &ScoredExpression<T>) -> Ordering {
    b.necessity
        .total_cmp(&a.necessity)
        .then_with(|| a.expression.to_string().cmp(&b.expression.to_string()))
}

/// Scores every candidate on S+ and S-, in candidate order.
pub fn score_atoms(
    atoms: &[Atom],
    s_plus: &[&LogicalState],
    s_minus: &[&LogicalState],
) -> Result<Vec<ScoredExpression<Atom>>, InventError> {
    atoms
        .par_iter()
        .map(|a| {
            Ok(ScoredExpression {
                expression: a.clone(),
                necessity: necessity(a, s_plus)?,
                sufficiency: if s_minus.is_empty() { 0.0 } else { sufficiency(a, s_minus)? },
            })
        })
        .collect()
}

/// Scored necessity candidates for one action.
#[derive(Debug, Clone)]
pub struct NecessityReport {
    /// Every candidate with its scores, in generation order.
    pub all: Vec<ScoredExpression<Atom>>,
    /// Survivors: necessity at least `min_ness`, ranked, truncated to top-k.
    pub selected: Vec<ScoredExpression<Atom>>,
}

pub fn invent_necessity(
    language: &Language,
    s_plus: &[&LogicalState],
    s_minus: &[&LogicalState],
    action: &str,
    config: &InventionConfig,
) -> Result<NecessityReport, InventError> {
    if s_plus.is_empty() {
        return Err(InventError::EmptyPositive(action.to_string()));
    }
    let candidates = config.candidates(language)?;
    let all = score_atoms(&candidates, s_plus, s_minus)?;
    let mut selected: Vec<_> = all.iter().filter(|s| s.necessity >= config.min_ness).cloned().collect();
    selected.sort_by(by_necessity);
    selected.truncate(config.top_k_ness);
    Ok(NecessityReport { all, selected })
}

/// Where a scored predicate falls in the necessity/sufficiency grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreClass {
    HighNessHighSuff,
    HighNessLowSuff,
    LowNessHighSuff,
    LowNessLowSuff,
}

impl ScoreClass {
    pub fn of(necessity: f64, sufficiency: f64, ness_hi: f64, suff_hi: f64) -> Self {
        match (necessity >= ness_hi, sufficiency >= suff_hi) {
            (true, true) => ScoreClass::HighNessHighSuff,
            (true, false) => ScoreClass::HighNessLowSuff,
            (false, true) => ScoreClass::LowNessHighSuff,
            (false, false) => ScoreClass::LowNessLowSuff,
        }
    }

    /// High necessity is kept whatever the sufficiency. Low necessity is
    /// dropped, including the low/low corner that would need negation.
    pub fn keep(self) -> bool {
        matches!(self, ScoreClass::HighNessHighSuff | ScoreClass::HighNessLowSuff)
    }
}

pub fn select_predicates(scored: &[ScoredExpression<Atom>], ness_hi: f64, suff_hi: f64) -> Vec<Atom> {
    scored
        .iter()
        .filter(|s| ScoreClass::of(s.necessity, s.sufficiency, ness_hi, suff_hi).keep())
        .map(|s| s.expression.clone())
        .collect()
}

/// Single-range rules of one action over the same concept and object pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub action: String,
    pub concept: ConceptTag,
    pub pair: (String, String),
    /// Member range atoms, ordered by lower bound.
    pub members: Vec<Atom>,
}

fn single_range(clause: &Clause) -> Option<(&Atom, &ReferenceRange, &(BoundObject, BoundObject))> {
    match clause.body() {
        [atom] => match &*atom.predicate {
            Predicate::Range { range, pair } => Some((atom, range, pair)),
            _ => None,
        },
        _ => None,
    }
}

fn range_lo(atom: &Atom) -> f64 {
    match &*atom.predicate {
        Predicate::Range { range, .. } => range.lo,
        _ => f64::NAN,
    }
}

/// Groups single-range clauses by concept and object pair. Clauses with
/// other bodies are ignored and singleton groups are dropped.
pub fn cluster_clauses(clauses: &[Clause]) -> Vec<Cluster> {
    let mut clusters: Vec<Cluster> = Vec::new();
    for c in clauses {
        let Some((atom, range, pair)) = single_range(c) else {
            continue;
        };
        let key = (range.concept.tag, (pair.0.name().to_string(), pair.1.name().to_string()));
        match clusters
            .iter_mut()
            .find(|k| k.action == c.action() && (k.concept, k.pair.clone()) == key)
        {
            Some(k) => {
                if !k.members.contains(atom) {
                    k.members.push(atom.clone());
                }
            }
            None => clusters.push(Cluster {
                action: c.action().to_string(),
                concept: key.0,
                pair: key.1,
                members: vec![atom.clone()],
            }),
        }
    }
    clusters.retain(|k| k.members.len() >= 2);
    for k in &mut clusters {
        k.members.sort_by(|a, b| range_lo(a).total_cmp(&range_lo(b)));
    }
    clusters.sort_by(|a, b| (&a.action, a.concept, &a.pair).cmp(&(&b.action, b.concept, &b.pair)));
    clusters
}

/// Scores of the remaining disjunction at one reduction step.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionStep {
    pub members: usize,
    pub necessity: f64,
    pub sufficiency: f64,
    /// Member removed after this step, if any.
    pub removed: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub cluster: Cluster,
    pub trace: Vec<ReductionStep>,
    /// Surviving members.
    pub members: Vec<Atom>,
    pub necessity: f64,
    pub sufficiency: f64,
    /// Whether the final necessity clears the minimum.
    pub accepted: bool,
}

/// Per-member valuations on S+ and S-.
fn columns(members: &[Atom], states: &[&LogicalState]) -> Result<Vec<Vec<f64>>, FolError> {
    members
        .iter()
        .map(|m| states.iter().map(|s| eval_atom(m, s)).collect())
        .collect()
}

/// Mean of the disjunction (max) over active members, per state.
fn disjunction_mean(cols: &[Vec<f64>], active: &[bool], n: usize, complement: bool) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        let mut v: f64 = 0.0;
        for (c, on) in cols.iter().zip(active) {
            if *on {
                v = v.max(c[i]);
            }
        }
        sum += if complement { 1.0 - v } else { v };
    }
    sum / n as f64
}

/// Removes, one at a time, the member whose removal leaves the most
/// sufficient disjunction, until sufficiency reaches `t_s` or two members
/// remain.
pub fn greedy_reduce(
    cluster: &Cluster,
    s_plus: &[&LogicalState],
    s_minus: &[&LogicalState],
    t_s: f64,
    min_ness: f64,
) -> Result<Reduction, InventError> {
    if s_plus.is_empty() {
        return Err(InventError::EmptyPositive(cluster.action.clone()));
    }
    if s_minus.is_empty() {
        return Err(InventError::EmptyNegative(cluster.action.clone()));
    }
    let plus = columns(&cluster.members, s_plus)?;
    let minus = columns(&cluster.members, s_minus)?;
    let mut active = vec![true; cluster.members.len()];
    let mut trace = Vec::new();
    loop {
        let ness = disjunction_mean(&plus, &active, s_plus.len(), false);
        let suff = disjunction_mean(&minus, &active, s_minus.len(), true);
        let live = active.iter().filter(|a| **a).count();
        trace.push(ReductionStep {
            members: live,
            necessity: ness,
            sufficiency: suff,
            removed: None,
        });
        if suff >= t_s || live <= 2 {
            let members: Vec<Atom> = cluster
                .members
                .iter()
                .zip(&active)
                .filter(|(_, on)| **on)
                .map(|(m, _)| m.clone())
                .collect();
            return Ok(Reduction {
                cluster: cluster.clone(),
                trace,
                members,
                necessity: ness,
                sufficiency: suff,
                accepted: ness > min_ness,
            });
        }
        let mut best: Option<(usize, f64)> = None;
        for i in 0..active.len() {
            if !active[i] {
                continue;
            }
            active[i] = false;
            let s = disjunction_mean(&minus, &active, s_minus.len(), true);
            active[i] = true;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        let (drop, _) = best.expect("at least three live members");
        active[drop] = false;
        trace.last_mut().expect("pushed above").removed = Some(cluster.members[drop].to_string());
    }
}

/// Invented predicate over the survivors of a reduction.
pub fn invented_from(reduction: &Reduction, name: &str) -> Result<Atom, FolError> {
    let bodies = reduction.members.iter().map(|m| vec![m.clone()]).collect();
    Ok(Atom::new(Predicate::invented(name, bodies)?))
}

/// Clusters the given rules of one action, reduces every cluster, and
/// returns accepted reductions ranked by necessity (ties by member text),
/// truncated to `top_k`.
pub fn invent_sufficiency(
    rules: &[Clause],
    s_plus: &[&LogicalState],
    s_minus: &[&LogicalState],
    config: &InventionConfig,
) -> Result<(Vec<Reduction>, Vec<Reduction>), InventError> {
    let clusters = cluster_clauses(rules);
    let all: Vec<Reduction> = clusters
        .iter()
        .map(|k| greedy_reduce(k, s_plus, s_minus, config.t_s, config.min_ness))
        .collect::<Result<_, _>>()?;
    let mut kept: Vec<Reduction> = all.iter().filter(|r| r.accepted).cloned().collect();
    let key = |r: &Reduction| r.members.iter().map(Atom::to_string).collect::<Vec<_>>().join(";");
    kept.sort_by(|a, b| b.necessity.total_cmp(&a.necessity).then_with(|| key(a).cmp(&key(b))));
    kept.truncate(config.top_k_suff);
    Ok((all, kept))
}

/// CSV of candidate scores: `action,predicate,necessity,sufficiency`.
pub fn candidates_csv(rows: &[(String, Vec<ScoredExpression<Atom>>)]) -> String {
    let mut out = String::from("action,predicate,necessity,sufficiency\n");
    for (action, scored) in rows {
        for s in scored {
            let _ = writeln!(out, "{action},\"{}\",{},{}", s.expression, s.necessity, s.sufficiency);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{MapExtent, ObjectRef, ObjectState};

    fn roster() -> Roster {
        Roster::new(
            ["player", "key", "door", "enemy"]
                .iter()
                .map(|n| ObjectRef::new(*n, *n))
                .collect(),
        )
    }

    fn bound(name: &str) -> BoundObject {
        BoundObject::resolve(&roster(), name).unwrap()
    }

    fn not_exist(name: &str) -> Atom {
        Atom::new(Predicate::not_exist(bound(name)))
    }

    /// States where only the key's existence varies.
    fn states(key_present: &[bool]) -> Vec<LogicalState> {
        key_present
            .iter()
            .map(|&k| {
                let mut objs = vec![ObjectState::at(1.0, 0.0); 4];
                objs[1].exists = k;
                LogicalState::new(objs, MapExtent::new(40.0, 8.0))
            })
            .collect()
    }

    fn dist(i: usize, a: &str) -> Atom {
        Atom::new(Predicate::range(
            ReferenceRange::bin(PhysicalConcept::distance(), i, 100),
            bound(a),
            bound("player"),
        ))
    }

    fn jump_rule(body: Vec<Atom>) -> Clause {
        Clause::new(Atom::new(Predicate::action("jump", 2)), body).unwrap()
    }

    #[test]
    fn candidate_counts() {
        let r = roster();
        assert_eq!(generate_range_predicates(PhysicalConcept::distance(), 100, &r).len(), 1200);
        assert_eq!(generate_range_predicates(PhysicalConcept::direction(), 90, &r).len(), 1080);
        let names: Vec<String> = generate_range_predicates(PhysicalConcept::distance(), 100, &r)
            .iter()
            .take(100)
            .map(|a| a.predicate.name())
            .collect();
        assert_eq!(names[0], "Dist_[0,0.01)");
        assert_eq!(names[99], "Dist_[0.99,1)");
        let dirs = generate_range_predicates(PhysicalConcept::direction(), 90, &r);
        assert_eq!(dirs[1].predicate.name(), "Dir_[4,8)");
        assert_eq!(agent_pairs(&r, "player").unwrap().len(), 3);
    }

    #[test]
    fn necessity_and_sufficiency_anchors() {
        let s = states(&[false, false, false, true]);
        let refs: Vec<&LogicalState> = s.iter().collect();
        let init = jump_rule(vec![]);
        assert_eq!(necessity(&init, &refs).unwrap(), 1.0);
        assert_eq!(sufficiency(&init, &refs).unwrap(), 0.0);
        assert_eq!(necessity(&not_exist("key"), &refs).unwrap(), 0.75);
        assert_eq!(necessity(&not_exist("door"), &refs).unwrap(), 0.0);
        assert_eq!(sufficiency(&not_exist("door"), &refs).unwrap(), 1.0);

        let neg = states(&[true, true, false, true, true]);
        let nref: Vec<&LogicalState> = neg.iter().collect();
        assert!((sufficiency(&not_exist("key"), &nref).unwrap() - 0.8).abs() < 1e-15);
        assert!(necessity(&init, &[]).is_err());
        assert!(sufficiency(&init, &[]).is_err());
    }

    fn enemy_states(distances: &[f64]) -> Vec<LogicalState> {
        // diagonal of 60x80 is 100, so x offset d*100 gives normalized d
        distances
            .iter()
            .map(|&d| {
                let mut objs = vec![ObjectState::at(0.0, 0.0); 4];
                objs[3].x = d * 100.0;
                LogicalState::new(objs, MapExtent::new(60.0, 80.0))
            })
            .collect()
    }

    #[test]
    fn clustering_groups_by_pair_and_concept() {
        let rules = vec![
            jump_rule(vec![dist(0, "enemy")]),
            jump_rule(vec![dist(1, "key")]),
            jump_rule(vec![dist(1, "enemy")]),
            jump_rule(vec![dist(2, "enemy")]),
            jump_rule(vec![dist(2, "enemy"), not_exist("key")]),
        ];
        let clusters = cluster_clauses(&rules);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].pair, ("enemy".into(), "player".into()));
        assert_eq!(clusters[0].members.len(), 3);
        assert!(cluster_clauses(&rules[..1]).is_empty());
        assert!(cluster_clauses(&[rules[0].clone(), rules[1].clone()]).is_empty());
    }

    #[test]
    fn reduction_drops_least_sufficient_member() {
        // positives spread over bins 4,5,6; negatives sit mostly in bin 6
        let plus = enemy_states(&[0.045, 0.045, 0.055, 0.055, 0.065, 0.065]);
        let minus = enemy_states(&[0.065, 0.065, 0.065, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]);
        let p: Vec<&LogicalState> = plus.iter().collect();
        let m: Vec<&LogicalState> = minus.iter().collect();
        let cluster = Cluster {
            action: "jump".into(),
            concept: ConceptTag::Distance,
            pair: ("enemy".into(), "player".into()),
            members: vec![dist(4, "enemy"), dist(5, "enemy"), dist(6, "enemy")],
        };
        let r = greedy_reduce(&cluster, &p, &m, 0.9, 0.1).unwrap();
        assert_eq!(r.trace.len(), 2);
        assert!((r.trace[0].sufficiency - 0.7).abs() < 1e-12);
        assert_eq!(r.trace[0].removed.as_deref(), Some("Dist_[0.06,0.07)(enemy,player,X)"));
        assert_eq!(r.members, vec![dist(4, "enemy"), dist(5, "enemy")]);
        assert!((r.necessity - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(r.sufficiency, 1.0);
        assert!(r.accepted);

        // already sufficient: unchanged
        let r = greedy_reduce(&cluster, &p, &m, 0.5, 0.1).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.members.len(), 3);

        // necessity gone: rejected
        let far = enemy_states(&[0.9, 0.9]);
        let f: Vec<&LogicalState> = far.iter().collect();
        assert!(!greedy_reduce(&cluster, &f, &m, 0.99, 0.1).unwrap().accepted);
    }

    #[test]
    fn selection_grid() {
        let s = |n, f| ScoredExpression {
            expression: not_exist("key"),
            necessity: n,
            sufficiency: f,
        };
        assert_eq!(select_predicates(&[s(0.8, 0.9)], 0.1, 0.5).len(), 1);
        assert_eq!(select_predicates(&[s(0.02, 0.95)], 0.1, 0.5).len(), 0);
        assert_eq!(select_predicates(&[s(0.8, 0.05)], 0.1, 0.5).len(), 1);
        assert_eq!(select_predicates(&[s(0.02, 0.05)], 0.1, 0.5).len(), 0);
    }
}

//! Top-down beam search over action rules, and the full invention loop that
//! alternates rule search with sufficiency-predicate invention.

use crate::buffer::{BufferError, GameBuffer};
use crate::env::EnvId;
use crate::fol::{eval_atom, Atom, Clause, FolError, Language, PhysicalConcept};
use crate::invent::{
    invent_necessity, invent_sufficiency, invented_from, InventError, InventionConfig, NecessityReport, Reduction,
    ScoredExpression,
};
use crate::state::LogicalState;
use log::{debug, info};
use rayon::prelude::*;
use serde_json::json;
use std::cmp::Ordering;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Fol(#[from] FolError),
    #[error(transparent)]
    Invent(#[from] InventError),
    #[error(transparent)]
    Buffer(#[from] BufferError),
}

pub type ScoredClause = ScoredExpression<Clause>;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub beam_width: usize,
    pub max_body_len: usize,
    pub rules_per_action: usize,
    pub min_rule_ness: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            beam_width: 20,
            max_body_len: 3,
            rules_per_action: 9,
            min_rule_ness: 0.0,
        }
    }
}

/// The starting language of an environment: its roster, actions and both
/// physical concepts, with no range or invented predicates yet.
pub fn base_language(env: EnvId) -> Language {
    Language::new(
        env.roster(),
        env.action_space().names().to_vec(),
        vec![PhysicalConcept::distance(), PhysicalConcept::direction()],
    )
}

/// `Action(X):-.`
pub fn init_clause(language: &Language, action: &str) -> Result<Clause, FolError> {
    Clause::init(language.action_atom(action)?)
}

/// Every clause extended by every atom not already in its body, without
/// duplicates, in first-generated order.
pub fn extend(clauses: &[Clause], atoms: &[Atom]) -> Vec<Clause> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for c in clauses {
        for a in atoms {
            if let Some(e) = c.extended(a) {
                if seen.insert(e.clone()) {
                    out.push(e);
                }
            }
        }
    }
    out
}

/// Necessity descending, then body length, then canonical text.
pub fn rank(a: &ScoredClause, b: &ScoredClause) -> Ordering {
    b.necessity
        .total_cmp(&a.necessity)
        .then_with(|| a.expression.body().len().cmp(&b.expression.body().len()))
        .then_with(|| a.expression.to_string().cmp(&b.expression.to_string()))
}

/// Valuations on S+ and on S-.
type Column = (Vec<f64>, Vec<f64>);

/// Atom valuations over the positive and negative states, computed once.
struct Columns<'a> {
    s_plus: &'a [&'a LogicalState],
    s_minus: &'a [&'a LogicalState],
    cache: HashMap<Atom, Column>,
}

impl<'a> Columns<'a> {
    fn new(atoms: &[Atom], s_plus: &'a [&'a LogicalState], s_minus: &'a [&'a LogicalState]) -> Result<Self, FolError> {
        let cols: Vec<(Atom, Column)> = atoms
            .par_iter()
            .map(|a| {
                let p = s_plus.iter().map(|s| eval_atom(a, s)).collect::<Result<Vec<_>, _>>()?;
                let m = s_minus.iter().map(|s| eval_atom(a, s)).collect::<Result<Vec<_>, _>>()?;
                Ok((a.clone(), (p, m)))
            })
            .collect::<Result<_, FolError>>()?;
        Ok(Self {
            s_plus,
            s_minus,
            cache: cols.into_iter().collect(),
        })
    }

    fn mean(&self, body: &[Atom], positive: bool) -> f64 {
        let n = if positive { self.s_plus.len() } else { self.s_minus.len() };
        let cols: Vec<&Vec<f64>> = body
            .iter()
            .map(|a| {
                let (p, m) = &self.cache[a];
                if positive { p } else { m }
            })
            .collect();
        let mut sum = 0.0;
        for i in 0..n {
            let mut v = 1.0;
            for c in &cols {
                v *= c[i];
                if v == 0.0 {
                    break;
                }
            }
            sum += if positive { v } else { 1.0 - v };
        }
        sum / n as f64
    }

    fn score(&self, clause: Clause) -> ScoredClause {
        ScoredClause {
            necessity: self.mean(clause.body(), true),
            sufficiency: self.mean(clause.body(), false),
            expression: clause,
        }
    }
}

fn check_sets(action: &str, s_plus: &[&LogicalState], s_minus: &[&LogicalState]) -> Result<(), InventError> {
    if s_plus.is_empty() {
        return Err(InventError::EmptyPositive(action.to_string()));
    }
    if s_minus.is_empty() {
        return Err(InventError::EmptyNegative(action.to_string()));
    }
    Ok(())
}

/// Beam survivors per depth and the final ranked rules.
#[derive(Debug, Clone)]
pub struct BeamResult {
    /// `levels[d]` holds the beam after `d` extensions; `levels[0]` is the
    /// initial clause.
    pub levels: Vec<Vec<ScoredClause>>,
    pub rules: Vec<ScoredClause>,
}

impl BeamResult {
    /// Survivors of the deepest step that was run.
    pub fn last_level(&self) -> &[ScoredClause] {
        self.levels.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Extends, scores and keeps the top `beam_width` clauses by necessity for
/// up to `max_body_len` steps. Survivors of every depth, the initial clause
/// included, are pooled and the best `rules_per_action` are returned.
pub fn beam_search(
    action: &str,
    language: &Language,
    s_plus: &[&LogicalState],
    s_minus: &[&LogicalState],
    config: &SearchConfig,
) -> Result<BeamResult, SearchError> {
    check_sets(action, s_plus, s_minus)?;
    let atoms = language.body_atoms();
    let cols = Columns::new(&atoms, s_plus, s_minus)?;
    let init = cols.score(init_clause(language, action)?);
    let mut levels = vec![vec![init.clone()]];
    let mut pool = vec![init];
    for depth in 1..=config.max_body_len {
        let parents: Vec<Clause> = levels[depth - 1].iter().map(|s| s.expression.clone()).collect();
        let mut scored: Vec<ScoredClause> = extend(&parents, &atoms).into_par_iter().map(|c| cols.score(c)).collect();
        if scored.is_empty() {
            break;
        }
        scored.sort_by(rank);
        scored.truncate(config.beam_width);
        debug!("{action}: depth {depth} beam top {:.3}", scored[0].necessity);
        pool.extend(scored.iter().cloned());
        levels.push(scored);
    }
    pool.sort_by(rank);
    pool.dedup_by(|a, b| a.expression == b.expression);
    pool.retain(|s| s.necessity >= config.min_rule_ness);
    pool.truncate(config.rules_per_action);
    Ok(BeamResult { levels, rules: pool })
}

/// Per-action record of one invention run.
#[derive(Debug, Clone)]
pub struct ActionReport {
    pub action: String,
    pub necessity: NecessityReport,
    /// Every reduction attempted for this action, accepted or not.
    pub reductions: Vec<Reduction>,
    /// Names of the invented predicates available to this action's search.
    pub invented: Vec<String>,
    /// Beam levels of each round, the last one being the final search.
    pub rounds: Vec<Vec<Vec<ScoredClause>>>,
    pub rules: Vec<ScoredClause>,
}

#[derive(Debug, Clone)]
pub struct InventionOutcome {
    /// Base language plus every invented predicate; no range predicates.
    pub language: Language,
    pub actions: Vec<ActionReport>,
}

impl InventionOutcome {
    pub fn rules(&self) -> Vec<Clause> {
        self.actions
            .iter()
            .flat_map(|a| a.rules.iter().map(|r| r.expression.clone()))
            .collect()
    }

    /// One JSON line per beam entry: action, round, depth, clause, scores.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for a in &self.actions {
            for (round, levels) in a.rounds.iter().enumerate() {
                for (depth, level) in levels.iter().enumerate() {
                    for s in level {
                        let rec = json!({
                            "action": a.action,
                            "round": round + 1,
                            "depth": depth,
                            "clause": s.expression.to_string(),
                            "necessity": s.necessity,
                            "sufficiency": s.sufficiency,
                        });
                        out.push_str(&rec.to_string());
                        out.push('\n');
                    }
                }
            }
        }
        out
    }

    /// Invented predicates with their explanation clauses and scores.
    pub fn invented_report(&self) -> String {
        let mut out = String::new();
        for a in &self.actions {
            for r in a.reductions.iter().filter(|r| r.accepted) {
                let name = self
                    .language
                    .invented_atoms()
                    .iter()
                    .find(|i| invented_members(i) == r.members)
                    .map(|i| i.predicate.name())
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{name} action={} necessity={} sufficiency={}\n",
                    a.action, r.necessity, r.sufficiency
                ));
                for m in &r.members {
                    out.push_str(&format!("  {name}(X):-{m}.\n"));
                }
            }
        }
        out
    }
}

fn invented_members(atom: &Atom) -> Vec<Atom> {
    match &*atom.predicate {
        crate::fol::Predicate::Invented { explanations, .. } => explanations.iter().flatten().cloned().collect(),
        _ => Vec::new(),
    }
}

/// Necessity invention, then rounds of rule search of growing depth, each
/// followed by sufficiency invention over the deepest beam. A final search
/// at full depth uses every predicate invented for the action.
///
/// Invented predicates are shared by name across actions; an action's
/// search only sees the ones invented while processing it.
pub fn run_invention(
    language0: &Language,
    buffer: &GameBuffer,
    invention: &InventionConfig,
    search: &SearchConfig,
) -> Result<InventionOutcome, SearchError> {
    let mut global = language0.clone();
    let mut reports = Vec::new();
    for action in language0.actions() {
        let (s_plus, s_minus) = buffer.split(action)?;
        check_sets(action, &s_plus, &s_minus)?;
        let necessity = invent_necessity(language0, &s_plus, &s_minus, action, invention)?;
        let mut lang = language0.clone();
        lang.clear_ranges();
        lang.add_ranges(necessity.selected.iter().map(|s| s.expression.clone()));
        info!(
            "{action}: {} of {} necessity candidates kept",
            necessity.selected.len(),
            necessity.all.len()
        );

        let mut rounds = Vec::new();
        let mut reductions = Vec::new();
        let mut invented = Vec::new();
        for depth in 1..=search.max_body_len {
            let cfg = SearchConfig {
                max_body_len: depth,
                ..search.clone()
            };
            let result = beam_search(action, &lang, &s_plus, &s_minus, &cfg)?;
            let step: Vec<Clause> = result.last_level().iter().map(|s| s.expression.clone()).collect();
            let (all, kept) = invent_sufficiency(&step, &s_plus, &s_minus, invention)?;
            for r in &kept {
                let atom = invented_from(r, &global.next_invented_name())?;
                let atom = global.add_invented(atom);
                if lang.invented(&atom.predicate.name()).is_none() {
                    info!("{action}: invented {} over {} clauses", atom.predicate.name(), r.members.len());
                    invented.push(atom.predicate.name());
                    lang.add_invented(atom);
                }
            }
            reductions.extend(all);
            rounds.push(result.levels);
        }
        let final_search = beam_search(action, &lang, &s_plus, &s_minus, search)?;
        rounds.push(final_search.levels);
        reports.push(ActionReport {
            action: action.clone(),
            necessity,
            reductions,
            invented,
            rounds,
            rules: final_search.rules,
        });
    }
    Ok(InventionOutcome {
        language: global,
        actions: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{BoundObject, Predicate, ReferenceRange};
    use crate::state::{MapExtent, ObjectState};

    fn lang() -> Language {
        base_language(EnvId::Getout)
    }

    fn dir(i: usize) -> Atom {
        let l = lang();
        Atom::new(Predicate::range(
            ReferenceRange::bin(PhysicalConcept::direction(), i, 90),
            BoundObject::resolve(l.roster(), "enemy").unwrap(),
            BoundObject::resolve(l.roster(), "player").unwrap(),
        ))
    }

    #[test]
    fn init_clause_text() {
        assert_eq!(init_clause(&lang(), "left").unwrap().to_string(), "Left(X):-.");
        assert_eq!(init_clause(&lang(), "jump").unwrap().to_string(), "Jump(X):-.");
        assert!(init_clause(&lang(), "fly").is_err());
    }

    #[test]
    fn extend_counts_and_dedup() {
        let init = init_clause(&lang(), "left").unwrap();
        let atoms = vec![dir(0), dir(1)];
        let one = extend(std::slice::from_ref(&init), &atoms);
        assert_eq!(one.len(), 2);
        assert_eq!(one[0].to_string(), "Left(X):-Dir_[0,4)(enemy,player,X).");
        // a,b and b,a are the same clause
        let two = extend(&one, &atoms);
        assert_eq!(two.len(), 1);
        assert!(extend(&two, &atoms).is_empty());
    }

    fn states(angles: &[Option<f64>]) -> Vec<LogicalState> {
        angles
            .iter()
            .map(|a| {
                let mut objs = vec![ObjectState::at(20.0, 4.0); 4];
                match a {
                    Some(deg) => {
                        let r = deg.to_radians();
                        objs[3] = ObjectState::at(20.0 + 2.0 * r.cos(), 4.0 + 2.0 * r.sin());
                    }
                    None => {
                        objs[1].exists = false;
                        objs[3] = ObjectState::at(20.0, 2.0);
                    }
                }
                LogicalState::new(objs, MapExtent::new(40.0, 8.0))
            })
            .collect()
    }

    #[test]
    fn depth_zero_gives_init_only() {
        let p = states(&[Some(1.0)]);
        let m = states(&[Some(100.0)]);
        let pr: Vec<&LogicalState> = p.iter().collect();
        let mr: Vec<&LogicalState> = m.iter().collect();
        let cfg = SearchConfig {
            max_body_len: 0,
            ..SearchConfig::default()
        };
        let r = beam_search("jump", &lang(), &pr, &mr, &cfg).unwrap();
        assert_eq!(r.rules.len(), 1);
        assert_eq!(r.rules[0].expression.to_string(), "Jump(X):-.");
        assert_eq!((r.rules[0].necessity, r.rules[0].sufficiency), (1.0, 0.0));
    }

    #[test]
    fn beam_prefers_necessary_atoms() {
        let p = states(&[Some(1.0), Some(2.0), Some(5.0), None]);
        let m = states(&[Some(100.0), Some(200.0)]);
        let pr: Vec<&LogicalState> = p.iter().collect();
        let mr: Vec<&LogicalState> = m.iter().collect();
        let mut l = lang();
        l.add_ranges([dir(0), dir(1), dir(25)]);
        let cfg = SearchConfig {
            beam_width: 3,
            max_body_len: 1,
            rules_per_action: 3,
            min_rule_ness: 0.0,
        };
        let r = beam_search("jump", &l, &pr, &mr, &cfg).unwrap();
        let text: Vec<String> = r.rules.iter().map(|s| s.expression.to_string()).collect();
        assert_eq!(text[0], "Jump(X):-.");
        assert_eq!(text[1], "Jump(X):-Dir_[0,4)(enemy,player,X).");
        assert_eq!(r.rules[1].necessity, 0.5);
        assert_eq!(r.rules[1].sufficiency, 1.0);
        // NotExist(key) and Dir_[4,8) tie at 0.25; shorter text first
        assert_eq!(r.rules[2].necessity, 0.25);
        assert_eq!(text[2], "Jump(X):-Dir_[4,8)(enemy,player,X).");
    }
}

//! Prolog-style surface syntax for clauses and rule files.
//!
//! ```text
//! % invented predicates
//! InvP1(X):-Dist_[0.04,0.05)(enemy,player,X).
//! InvP1(X):-Dist_[0.05,0.06)(enemy,player,X).
//! % rules
//! Jump(X):-InvP1(X),Dir_[4,8)(enemy,player,X).
//! Left(X):-.
//! ```
//!
//! Whitespace (including newlines) may appear between tokens, and `%` starts
//! a comment running to the end of the line. Statements whose head is not an
//! action and that have a `:-` body define invented predicates; every
//! definition of a predicate contributes one explanation clause. Bodiless
//! statements such as `weight(0, 1.5).` are returned as facts for the caller.

use super::{
    Atom, BoundObject, Clause, FolError, Language, PhysicalConcept, Predicate, ReferenceRange,
    STATE_VAR,
};

#[derive(Debug, Clone, PartialEq)]
struct RawAtom {
    pos: usize,
    name: String,
    range: Option<(f64, f64)>,
    args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum RawStatement {
    Clause { head: RawAtom, body: Vec<RawAtom> },
    Fact(RawAtom),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FolError> {
        Err(FolError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => self.pos += c.len_utf8(),
                Some('%') => match self.src[self.pos..].find('\n') {
                    Some(n) => self.pos += n + 1,
                    None => self.pos = self.src.len(),
                },
                _ => break,
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_trivia();
        self.pos >= self.src.len()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_trivia();
        if self.src[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), FolError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn ident(&mut self) -> Result<&'a str, FolError> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => {}
            _ => return self.err("expected identifier"),
        }
        Ok(self.take_while(|c| c.is_ascii_alphanumeric() || c == '_'))
    }

    fn number(&mut self) -> Result<f64, FolError> {
        self.skip_trivia();
        let start = self.pos;
        let text = self.take_while(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        text.parse().map_err(|_| FolError::Syntax {
            pos: start,
            msg: format!("invalid number `{text}`"),
        })
    }

    fn arg(&mut self) -> Result<String, FolError> {
        self.skip_trivia();
        let text = self.take_while(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | '+'));
        if text.is_empty() {
            return self.err("expected argument");
        }
        Ok(text.to_string())
    }

    fn atom(&mut self) -> Result<RawAtom, FolError> {
        self.skip_trivia();
        let pos = self.pos;
        let name = self.ident()?.to_string();
        let range = if name.ends_with('_') && self.peek() == Some('[') {
            self.pos += 1;
            let lo = self.number()?;
            self.expect(",")?;
            let hi = self.number()?;
            self.expect(")")?;
            Some((lo, hi))
        } else {
            None
        };
        self.expect("(")?;
        let mut args = vec![self.arg()?];
        while self.eat(",") {
            args.push(self.arg()?);
        }
        self.expect(")")?;
        Ok(RawAtom {
            pos,
            name,
            range,
            args,
        })
    }

    fn statement(&mut self) -> Result<RawStatement, FolError> {
        let head = self.atom()?;
        if self.eat(":-") {
            let mut body = Vec::new();
            if !self.eat(".") {
                body.push(self.atom()?);
                while self.eat(",") {
                    body.push(self.atom()?);
                }
                self.expect(".")?;
            }
            Ok(RawStatement::Clause { head, body })
        } else {
            self.expect(".")?;
            Ok(RawStatement::Fact(head))
        }
    }
}

fn check_arity(raw: &RawAtom, expected: usize, name: &str) -> Result<(), FolError> {
    if raw.args.len() != expected {
        return Err(FolError::Arity {
            name: name.to_string(),
            expected,
            found: raw.args.len(),
        });
    }
    if raw.args.last().map(String::as_str) != Some(STATE_VAR) {
        return Err(FolError::Syntax {
            pos: raw.pos,
            msg: format!("last argument of `{name}` must be the state variable {STATE_VAR}"),
        });
    }
    Ok(())
}

fn resolve_body_atom(raw: &RawAtom, language: &Language) -> Result<Atom, FolError> {
    if let Some((lo, hi)) = raw.range {
        let prefix = raw.name.trim_end_matches('_');
        let concept = PhysicalConcept::from_prefix(prefix)
            .and_then(|c| language.concept(c.tag))
            .ok_or_else(|| FolError::UnknownPredicate(raw.name.clone()))?;
        let range = ReferenceRange::new(concept, lo, hi)?;
        let name = range.predicate_name();
        check_arity(raw, 3, &name)?;
        let a = BoundObject::resolve(language.roster(), &raw.args[0])?;
        let b = BoundObject::resolve(language.roster(), &raw.args[1])?;
        return Ok(Atom::new(Predicate::range(range, a, b)));
    }
    if raw.name == "NotExist" {
        check_arity(raw, 2, "NotExist")?;
        let o = BoundObject::resolve(language.roster(), &raw.args[0])?;
        return Ok(Atom::new(Predicate::not_exist(o)));
    }
    if let Some(inv) = language.invented(&raw.name) {
        check_arity(raw, 1, &raw.name)?;
        return Ok(inv.clone());
    }
    Err(FolError::UnknownPredicate(raw.name.clone()))
}

fn resolve_head(raw: &RawAtom, language: &Language) -> Result<Atom, FolError> {
    let action = language
        .action_by_predicate_name(&raw.name)
        .ok_or_else(|| FolError::UnknownPredicate(raw.name.clone()))?;
    check_arity(raw, 1, &raw.name)?;
    language.action_atom(action)
}

fn resolve_clause(head: &RawAtom, body: &[RawAtom], language: &Language) -> Result<Clause, FolError> {
    let head = resolve_head(head, language)?;
    let body = body
        .iter()
        .map(|a| resolve_body_atom(a, language))
        .collect::<Result<Vec<_>, _>>()?;
    Clause::new(head, body)
}

/// Parses a single action rule such as `Jump(X):-InvP1(X),NotExist(key,X).`
pub fn parse_clause(text: &str, language: &Language) -> Result<Clause, FolError> {
    let mut p = Parser::new(text);
    let stmt = p.statement()?;
    if !p.at_end() {
        return p.err("trailing input after clause");
    }
    match stmt {
        RawStatement::Clause { head, body } => resolve_clause(&head, &body, language),
        RawStatement::Fact(head) => Err(FolError::Syntax {
            pos: head.pos,
            msg: "expected `:-`".into(),
        }),
    }
}

pub fn format_clause(clause: &Clause) -> String {
    format_rule(&clause.head().to_string(), clause.body())
}

fn format_rule(head: &str, body: &[Atom]) -> String {
    let body: Vec<String> = body.iter().map(Atom::to_string).collect();
    format!("{head}:-{}.", body.join(","))
}

/// Bodiless statement in a rule file, e.g. `weight(3, -0.25).`
#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub name: String,
    pub args: Vec<String>,
}

/// Parsed contents of a rule file.
#[derive(Debug, Clone)]
pub struct RuleFile {
    /// Base language extended with the file's invented predicates.
    pub language: Language,
    pub rules: Vec<Clause>,
    pub facts: Vec<Statement>,
}

/// `InvP<k>` with a positive integer `k`.
pub fn is_invented_name(name: &str) -> bool {
    name.strip_prefix("InvP")
        .is_some_and(|k| !k.is_empty() && k.bytes().all(|b| b.is_ascii_digit()))
}

/// Parses a rule file against a base language holding the roster, actions
/// and concepts of the environment.
pub fn parse_rule_file(text: &str, base: &Language) -> Result<RuleFile, FolError> {
    let mut p = Parser::new(text);
    let mut stmts = Vec::new();
    while !p.at_end() {
        stmts.push(p.statement()?);
    }

    let mut language = base.clone();
    // invented definitions, grouped by name in order of first appearance
    let mut groups: Vec<(String, Vec<&[RawAtom]>)> = Vec::new();
    for s in &stmts {
        if let RawStatement::Clause { head, body } = s {
            if language.action_by_predicate_name(&head.name).is_none() {
                if !is_invented_name(&head.name) {
                    return Err(FolError::UnknownPredicate(head.name.clone()));
                }
                check_arity(head, 1, &head.name)?;
                match groups.iter_mut().find(|(n, _)| *n == head.name) {
                    Some((_, bodies)) => bodies.push(body),
                    None => groups.push((head.name.clone(), vec![body])),
                }
            }
        }
    }
    for (name, bodies) in groups {
        let explanations = bodies
            .into_iter()
            .map(|b| {
                b.iter()
                    .map(|a| resolve_body_atom(a, &language))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let atom = Atom::new(Predicate::invented(name, explanations)?);
        language.add_invented(atom);
    }

    let mut rules = Vec::new();
    let mut facts = Vec::new();
    for s in &stmts {
        match s {
            RawStatement::Clause { head, body } => {
                if language.action_by_predicate_name(&head.name).is_some() {
                    rules.push(resolve_clause(head, body, &language)?);
                }
            }
            RawStatement::Fact(a) => facts.push(Statement {
                name: a.name.clone(),
                args: a.args.clone(),
            }),
        }
    }
    Ok(RuleFile {
        language,
        rules,
        facts,
    })
}

/// Writes invented predicate definitions followed by the rules. Comment lines
/// in `header` are prefixed with `% `.
pub fn write_rule_file(header: &[String], invented: &[Atom], rules: &[Clause]) -> String {
    let mut out = String::new();
    for line in header {
        out.push_str("% ");
        out.push_str(line);
        out.push('\n');
    }
    if !invented.is_empty() {
        out.push_str("% invented predicates\n");
        for atom in invented {
            if let Predicate::Invented { explanations, .. } = &*atom.predicate {
                for body in explanations {
                    out.push_str(&format_rule(&atom.to_string(), body));
                    out.push('\n');
                }
            }
        }
    }
    out.push_str("% rules\n");
    for r in rules {
        out.push_str(&format_clause(r));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{ObjectRef, Roster};

    fn language() -> Language {
        let roster = Roster::new(
            ["player", "key", "door", "enemy"]
                .iter()
                .map(|n| ObjectRef::new(*n, *n))
                .collect(),
        );
        let mut l = Language::new(
            roster,
            vec!["left".into(), "right".into(), "jump".into()],
            vec![PhysicalConcept::distance(), PhysicalConcept::direction()],
        );
        let e = BoundObject::resolve(l.roster(), "enemy").unwrap();
        let p = BoundObject::resolve(l.roster(), "player").unwrap();
        let bodies = (4..8)
            .map(|i| {
                vec![Atom::new(Predicate::range(
                    ReferenceRange::bin(PhysicalConcept::distance(), i, 100),
                    e.clone(),
                    p.clone(),
                ))]
            })
            .collect();
        l.add_invented(Atom::new(Predicate::invented("InvP1", bodies).unwrap()));
        l
    }

    #[test]
    fn parses_rule_with_invented_atom() {
        let l = language();
        let c = parse_clause("Jump(X):-InvP1(X),Dir_[4,8)(enemy,player,X).", &l).unwrap();
        assert_eq!(c.body().len(), 2);
        assert_eq!(c.action(), "jump");
        assert_eq!(c.to_string(), "Jump(X):-Dir_[4,8)(enemy,player,X),InvP1(X).");
    }

    #[test]
    fn parses_rule_split_across_lines() {
        let l = language();
        let c = parse_clause(
            "Jump(X):-InvP1(X),Dir_[184,188)(door,player,\nX),Dir_[184,188)(enemy,player,X).",
            &l,
        )
        .unwrap();
        assert_eq!(c.body().len(), 3);
    }

    #[test]
    fn parses_empty_body() {
        let c = parse_clause("Left(X):-.", &language()).unwrap();
        assert!(c.body().is_empty());
        assert_eq!(format_clause(&c), "Left(X):-.");
    }

    #[test]
    fn unknown_predicate() {
        assert_eq!(
            parse_clause("Jump(X):-Unknown(a,b,X).", &language()).unwrap_err(),
            FolError::UnknownPredicate("Unknown".into())
        );
    }

    #[test]
    fn unknown_object_and_arity() {
        let l = language();
        assert!(matches!(
            parse_clause("Jump(X):-NotExist(ghost,X).", &l),
            Err(FolError::UnknownObject(_))
        ));
        assert!(matches!(
            parse_clause("Jump(X):-NotExist(key).", &l),
            Err(FolError::Arity { expected: 2, found: 1, .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_clause("Jump(X):-NotExist(key,X)", &language()) {
            Err(FolError::Syntax { pos, .. }) => assert_eq!(pos, 24),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rule_file_round_trip() {
        let l = language();
        let rules = vec![
            parse_clause("Jump(X):-InvP1(X),NotExist(key,X),Dir_[0,4)(enemy,player,X).", &l).unwrap(),
            parse_clause("Left(X):-.", &l).unwrap(),
        ];
        let text = write_rule_file(&["getout".into()], l.invented_atoms(), &rules);
        let mut base = l.clone();
        base = Language::new(base.roster().clone(), base.actions().to_vec(), base.concepts().to_vec());
        let parsed = parse_rule_file(&text, &base).unwrap();
        assert_eq!(parsed.rules, rules);
        assert_eq!(parsed.language.invented_atoms(), l.invented_atoms());
        assert_eq!(
            write_rule_file(&["getout".into()], parsed.language.invented_atoms(), &parsed.rules),
            text
        );
    }

    #[test]
    fn misspelled_head_is_rejected() {
        assert!(matches!(
            parse_rule_file("Jupm(X):-.\n", &language()),
            Err(FolError::UnknownPredicate(_))
        ));
    }

    #[test]
    fn rule_file_facts() {
        let parsed = parse_rule_file("% c\nLeft(X):-.\nweight(0, -1.5).\n", &language()).unwrap();
        assert_eq!(parsed.rules.len(), 1);
        assert_eq!(
            parsed.facts,
            vec![Statement {
                name: "weight".into(),
                args: vec!["0".into(), "-1.5".into()]
            }]
        );
    }
}

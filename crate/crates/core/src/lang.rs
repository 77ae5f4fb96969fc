//! The rule language: atom declarations, rules, and fact files.
//!
//! A ruleset file declares its atoms (`sense` for world observations,
//! `obligation` for actions the agent may be obliged to take) and then lists
//! rules of the shape
//!
//! ```text
//! rule r1: IF a THEN o
//!   UNLESS not d IN WHICH CASE n and s
//!   UNLESS h IN WHICH CASE o.
//! ```
//!
//! Keywords are case-insensitive, atoms case-sensitive, whitespace and
//! newlines are interchangeable, and `#` starts a comment. Facts files list
//! one sensed literal per line (`a`, `not d`, ...).

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::atom::{Atom, Literal};
use crate::formula::Formula;
use crate::syntax::{self, Cursor, Kw, ParseError, Tok};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleSetError {
    #[error("a rule needs at least one condition/outcome pair")]
    EmptyRule,
    #[error("rule has {conditions} conditions but {outcomes} outcomes")]
    MismatchedClauses { conditions: usize, outcomes: usize },
    #[error("atom `{0}` is declared both sensed and obligation")]
    DuplicateDeclaration(String),
    #[error("atom `{0}` is used but not declared")]
    UndeclaredAtom(String),
    #[error("facts assert atom `{0}` with both signs")]
    ContradictoryFacts(String),
}

impl From<RuleSetError> for ParseError {
    fn from(e: RuleSetError) -> ParseError {
        match e {
            RuleSetError::DuplicateDeclaration(a) => ParseError::DuplicateDeclaration(a),
            RuleSetError::UndeclaredAtom(a) => ParseError::UndeclaredAtom(a),
            RuleSetError::ContradictoryFacts(a) => ParseError::ContradictoryFacts(a),
            other => ParseError::Syntax {
                line: 0,
                col: 0,
                expected: other.to_string(),
            },
        }
    }
}

/// A rule `IF C0 THEN O0 (UNLESS Ci IN WHICH CASE Oi)*`.
///
/// Conditions and outcomes are kept in source order; the order of UNLESS
/// clauses is semantically significant and survives printing unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SleecRule {
    name: Option<String>,
    conditions: Vec<Formula>,
    outcomes: Vec<Formula>,
}

impl SleecRule {
    pub fn new(
        name: Option<String>,
        conditions: Vec<Formula>,
        outcomes: Vec<Formula>,
    ) -> Result<Self, RuleSetError> {
        if conditions.len() != outcomes.len() {
            return Err(RuleSetError::MismatchedClauses {
                conditions: conditions.len(),
                outcomes: outcomes.len(),
            });
        }
        if conditions.is_empty() {
            return Err(RuleSetError::EmptyRule);
        }
        Ok(SleecRule {
            name,
            conditions,
            outcomes,
        })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn conditions(&self) -> &[Formula] {
        &self.conditions
    }

    pub fn outcomes(&self) -> &[Formula] {
        &self.outcomes
    }

    /// Number of condition/outcome pairs (one more than the UNLESS count).
    pub fn clause_count(&self) -> usize {
        self.conditions.len()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut set = BTreeSet::new();
        for f in self.conditions.iter().chain(self.outcomes.iter()) {
            set.extend(f.atoms());
        }
        set
    }
}

/// Declared atoms, rules, and fact literals.
///
/// Invariants, checked at construction: the sensed and obligation sets are
/// disjoint, every atom used by a rule or fact is declared in exactly one of
/// them, and no fact atom carries both signs. The parser additionally
/// restricts facts to sensed atoms; programmatic construction allows any
/// declared literal as a fact.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RuleSet {
    sensed: BTreeSet<Atom>,
    obligations: BTreeSet<Atom>,
    rules: Vec<SleecRule>,
    facts: BTreeSet<Literal>,
}

impl RuleSet {
    pub fn new(
        sensed: impl IntoIterator<Item = Atom>,
        obligations: impl IntoIterator<Item = Atom>,
        rules: Vec<SleecRule>,
        facts: impl IntoIterator<Item = Literal>,
    ) -> Result<Self, RuleSetError> {
        let sensed: BTreeSet<Atom> = sensed.into_iter().collect();
        let obligations: BTreeSet<Atom> = obligations.into_iter().collect();
        if let Some(both) = sensed.intersection(&obligations).next() {
            return Err(RuleSetError::DuplicateDeclaration(both.to_string()));
        }
        let facts: BTreeSet<Literal> = facts.into_iter().collect();
        let rs = RuleSet {
            sensed,
            obligations,
            rules,
            facts,
        };
        for rule in &rs.rules {
            for atom in rule.atoms() {
                if !rs.is_declared(&atom) {
                    return Err(RuleSetError::UndeclaredAtom(atom.to_string()));
                }
            }
        }
        for fact in &rs.facts {
            if !rs.is_declared(&fact.atom) {
                return Err(RuleSetError::UndeclaredAtom(fact.atom.to_string()));
            }
            if rs.facts.contains(&fact.negated()) {
                return Err(RuleSetError::ContradictoryFacts(fact.atom.to_string()));
            }
        }
        Ok(rs)
    }

    pub fn sensed(&self) -> &BTreeSet<Atom> {
        &self.sensed
    }

    pub fn obligations(&self) -> &BTreeSet<Atom> {
        &self.obligations
    }

    pub fn rules(&self) -> &[SleecRule] {
        &self.rules
    }

    pub fn facts(&self) -> &BTreeSet<Literal> {
        &self.facts
    }

    pub fn is_declared(&self, atom: &Atom) -> bool {
        self.sensed.contains(atom) || self.obligations.contains(atom)
    }

    /// All declared atoms, sensed first only in the sense of set order.
    pub fn declared_atoms(&self) -> BTreeSet<Atom> {
        self.sensed.union(&self.obligations).cloned().collect()
    }

    /// A copy of this ruleset with the given facts added.
    pub fn with_facts(
        &self,
        facts: impl IntoIterator<Item = Literal>,
    ) -> Result<RuleSet, RuleSetError> {
        let mut all: Vec<Literal> = self.facts.iter().cloned().collect();
        all.extend(facts);
        RuleSet::new(
            self.sensed.iter().cloned(),
            self.obligations.iter().cloned(),
            self.rules.clone(),
            all,
        )
    }
}

fn declare(
    cur: &mut Cursor,
    into: &mut BTreeSet<Atom>,
    other: &BTreeSet<Atom>,
) -> Result<(), ParseError> {
    // at least one atom, then as many as follow
    loop {
        let atom = syntax::parse_atom_at(cur)?;
        if into.contains(&atom) || other.contains(&atom) {
            return Err(ParseError::DuplicateDeclaration(atom.to_string()));
        }
        into.insert(atom);
        if !matches!(cur.peek(), Some(Tok::Word(_))) {
            break;
        }
    }
    Ok(())
}

fn parse_rule(cur: &mut Cursor) -> Result<SleecRule, ParseError> {
    let name = if matches!(cur.peek(), Some(Tok::Word(_))) {
        let atom = syntax::parse_atom_at(cur)?;
        if !atom.args().is_empty() {
            return Err(cur.err_here("`:` after the rule name"));
        }
        cur.expect(Tok::Colon)?;
        Some(atom.name().to_string())
    } else {
        None
    };
    cur.expect_keyword(Kw::If)?;
    let mut conditions = vec![syntax::parse_formula_at(cur)?];
    cur.expect_keyword(Kw::Then)?;
    let mut outcomes = vec![syntax::parse_formula_at(cur)?];
    while cur.eat_keyword(Kw::Unless) {
        conditions.push(syntax::parse_formula_at(cur)?);
        cur.expect_keyword(Kw::In)?;
        cur.expect_keyword(Kw::Which)?;
        cur.expect_keyword(Kw::Case)?;
        outcomes.push(syntax::parse_formula_at(cur)?);
    }
    cur.expect(Tok::Period)?;
    Ok(SleecRule::new(name, conditions, outcomes).expect("clause lists built in lockstep"))
}

/// Parses a ruleset file: `sense` and `obligation` declarations plus rules,
/// in any order. Every atom used by a rule must be declared somewhere in
/// the file.
pub fn parse_ruleset(text: &str) -> Result<RuleSet, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut sensed = BTreeSet::new();
    let mut obligations = BTreeSet::new();
    let mut rules = Vec::new();
    while !cur.at_end() {
        if cur.eat_keyword(Kw::Sense) {
            declare(&mut cur, &mut sensed, &obligations)?;
        } else if cur.eat_keyword(Kw::Obligation) {
            declare(&mut cur, &mut obligations, &sensed)?;
        } else if cur.eat_keyword(Kw::Rule) {
            rules.push(parse_rule(&mut cur)?);
        } else {
            return Err(cur.err_here("`sense`, `obligation`, or `rule`"));
        }
    }
    RuleSet::new(sensed, obligations, rules, []).map_err(ParseError::from)
}

/// Parses a facts file against an existing ruleset: whitespace-separated
/// literals, `atom` or `not atom`, each naming a declared sensed atom.
pub fn parse_facts(text: &str, rs: &RuleSet) -> Result<BTreeSet<Literal>, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut facts: BTreeSet<Literal> = BTreeSet::new();
    while !cur.at_end() {
        let positive = !cur.eat_keyword(Kw::Not);
        let atom = syntax::parse_atom_at(&mut cur)?;
        if !rs.is_declared(&atom) {
            return Err(ParseError::UndeclaredAtom(atom.to_string()));
        }
        if !rs.sensed().contains(&atom) {
            return Err(ParseError::NotSensed(atom.to_string()));
        }
        let lit = Literal { atom, positive };
        if facts.contains(&lit.negated()) {
            return Err(ParseError::ContradictoryFacts(lit.atom.to_string()));
        }
        facts.insert(lit);
    }
    Ok(facts)
}

impl fmt::Display for SleecRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_rule(self))
    }
}

/// Canonical single-line rendering of one rule.
pub fn print_rule(rule: &SleecRule) -> String {
    let mut out = String::from("rule ");
    if let Some(name) = rule.name() {
        out.push_str(name);
        out.push_str(": ");
    }
    out.push_str("IF ");
    out.push_str(&syntax::print_formula(&rule.conditions()[0]));
    out.push_str(" THEN ");
    out.push_str(&syntax::print_formula(&rule.outcomes()[0]));
    for i in 1..rule.clause_count() {
        out.push_str(" UNLESS ");
        out.push_str(&syntax::print_formula(&rule.conditions()[i]));
        out.push_str(" IN WHICH CASE ");
        out.push_str(&syntax::print_formula(&rule.outcomes()[i]));
    }
    out.push('.');
    out
}

/// Canonical rendering of a ruleset: declarations (sorted), then rules in
/// order, one per line. Facts are not part of ruleset files and are not
/// printed here; see [`print_facts`].
pub fn print_ruleset(rs: &RuleSet) -> String {
    let mut out = String::new();
    if !rs.sensed().is_empty() {
        out.push_str("sense");
        for atom in rs.sensed() {
            out.push(' ');
            out.push_str(&atom.to_string());
        }
        out.push('\n');
    }
    if !rs.obligations().is_empty() {
        out.push_str("obligation");
        for atom in rs.obligations() {
            out.push(' ');
            out.push_str(&atom.to_string());
        }
        out.push('\n');
    }
    for rule in rs.rules() {
        out.push_str(&print_rule(rule));
        out.push('\n');
    }
    out
}

/// Canonical rendering of a fact set, one literal per line.
pub fn print_facts(facts: &BTreeSet<Literal>) -> String {
    let mut out = String::new();
    for lit in facts {
        out.push_str(&lit.to_string());
        out.push('\n');
    }
    out
}

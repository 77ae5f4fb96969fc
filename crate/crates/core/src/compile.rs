//! Lowering of rules into propositional formulas.
//!
//! A rule `IF C0 THEN O0 UNLESS C1 IN WHICH CASE O1 ... UNLESS Cn IN WHICH
//! CASE On` lowers to
//!
//! ```text
//! (C0 and not C1 -> O0) and
//! (C0 and C1 and not C2 -> O1) and ... and
//! (C0 and C1 and ... and Cn -> On)
//! ```
//!
//! Conjunctions are built left-to-right and associated to the right, and the
//! negations `not C(i+1)` are syntactic wrappers: a condition that is itself
//! a negation lowers to a double negation, which is kept verbatim.
//!
//! [`semantics_eval`] decides the same relation directly from the clause
//! lists, without building the lowered formula; the two routes are checked
//! against each other in the test suites.

use crate::atom::Literal;
use crate::formula::{Formula, Interpretation, UnknownAtom};
use crate::lang::{RuleSet, SleecRule};

fn literal_formula(lit: &Literal) -> Formula {
    let var = Formula::var(lit.atom.clone());
    if lit.positive {
        var
    } else {
        Formula::not(var)
    }
}

/// Lowers one rule to its propositional form.
pub fn compile_rule(rule: &SleecRule) -> Formula {
    let conditions = rule.conditions();
    let outcomes = rule.outcomes();
    let last = rule.clause_count() - 1;
    let mut conjuncts = Vec::with_capacity(rule.clause_count());
    for i in 0..last {
        let mut antecedent: Vec<Formula> = conditions[..=i].to_vec();
        antecedent.push(Formula::not(conditions[i + 1].clone()));
        conjuncts.push(Formula::implies(
            Formula::and_all(antecedent),
            outcomes[i].clone(),
        ));
    }
    conjuncts.push(Formula::implies(
        Formula::and_all(conditions.to_vec()),
        outcomes[last].clone(),
    ));
    Formula::and_all(conjuncts)
}

/// Lowers a whole ruleset: the conjunction of every rule's compilation, in
/// order, followed by one literal per fact. An empty ruleset with no facts
/// lowers to `true`.
pub fn compile_ruleset(rs: &RuleSet) -> Formula {
    let parts = rs
        .rules()
        .iter()
        .map(compile_rule)
        .chain(rs.facts().iter().map(literal_formula));
    Formula::and_all(parts)
}

/// Decides whether `v` satisfies the rule, straight from the clause lists.
///
/// The rule holds under `v` iff for every clause index `i` before the last,
/// some earlier condition is false, or the next condition is true, or the
/// outcome `Oi` is true; and additionally some condition is false or the
/// final outcome holds.
pub fn semantics_eval(rule: &SleecRule, v: &Interpretation) -> Result<bool, UnknownAtom> {
    for atom in rule.atoms() {
        if v.get(&atom).is_none() {
            return Err(UnknownAtom(atom.to_string()));
        }
    }
    let truth = |f: &Formula| f.eval(v).expect("domain checked above");
    let conditions = rule.conditions();
    let outcomes = rule.outcomes();
    let last = rule.clause_count() - 1;
    for i in 0..last {
        let earlier_false = conditions[..=i].iter().any(|c| !truth(c));
        if !(earlier_false || truth(&conditions[i + 1]) || truth(&outcomes[i])) {
            return Ok(false);
        }
    }
    let any_false = conditions.iter().any(|c| !truth(c));
    Ok(any_false || truth(&outcomes[last]))
}

/// Node count of the lowered form of a rule.
pub fn compiled_size(rule: &SleecRule) -> usize {
    compile_rule(rule).size()
}

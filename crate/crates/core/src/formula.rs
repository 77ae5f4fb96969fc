//! Propositional formulas.
//!
//! The stored tree has exactly three constructors: atoms, negation, and
//! disjunction. Conjunction, implication and the constants are derived forms,
//! desugared at construction time:
//!
//! * `a and b`  is stored as `not (not a or not b)`
//! * `a -> b`   is stored as `not a or b`
//! * `true`     is stored as `q or not q` for the reserved atom `q`
//! * `false`    is stored as `not true`
//!
//! The canonical printer in [`crate::syntax`] recognises the derived shapes
//! and prints them back with their surface keywords, so `parse(print(f)) = f`
//! holds structurally.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::atom::Atom;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("atom `{0}` is not in the interpretation's domain")]
pub struct UnknownAtom(pub String);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("formulas mention {count} atoms, above the enumeration bound of {limit}")]
pub struct TooManyAtoms {
    pub count: usize,
    pub limit: usize,
}

/// Enumeration bound for [`equiv_bruteforce`].
pub const BRUTEFORCE_ATOM_LIMIT: usize = 20;

/// A propositional formula over [`Atom`]s.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(Atom),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(atom: Atom) -> Formula {
        Formula::Var(atom)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    /// `lhs and rhs`, stored as `not (not lhs or not rhs)`.
    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::not(Formula::or(Formula::not(lhs), Formula::not(rhs)))
    }

    /// `lhs -> rhs`, stored as `not lhs or rhs`.
    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::or(Formula::not(lhs), rhs)
    }

    /// The constant `true`, stored as `q or not q` over the reserved atom.
    pub fn truth() -> Formula {
        let q = Atom::reserved_true();
        Formula::or(Formula::var(q.clone()), Formula::not(Formula::var(q)))
    }

    /// The constant `false`, stored as `not true`.
    pub fn falsity() -> Formula {
        Formula::not(Formula::truth())
    }

    /// Right-associated conjunction of all operands; empty input yields `true`.
    pub fn and_all(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        match parts.pop() {
            None => Formula::truth(),
            Some(last) => parts
                .into_iter()
                .rev()
                .fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Matches the derived conjunction shape `not (not a or not b)`.
    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Not(inner) = self {
            if let Formula::Or(l, r) = inner.as_ref() {
                if let (Formula::Not(a), Formula::Not(b)) = (l.as_ref(), r.as_ref()) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Matches the derived implication shape `not a or b`.
    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        if let Formula::Or(l, r) = self {
            if let Formula::Not(a) = l.as_ref() {
                return Some((a, r));
            }
        }
        None
    }

    /// Matches the stored shape of the constant `true`.
    pub fn is_truth(&self) -> bool {
        if let Formula::Or(l, r) = self {
            if let (Formula::Var(q), Formula::Not(n)) = (l.as_ref(), r.as_ref()) {
                if let Formula::Var(q2) = n.as_ref() {
                    return q.is_reserved() && q2.is_reserved() && q == q2;
                }
            }
        }
        false
    }

    /// Matches the stored shape of the constant `false`.
    pub fn is_falsity(&self) -> bool {
        matches!(self, Formula::Not(inner) if inner.is_truth())
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        let mut count = 0;
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            count += 1;
            match f {
                Formula::Var(_) => {}
                Formula::Not(g) => stack.push(g),
                Formula::Or(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        count
    }

    /// The set of atoms occurring in the formula, excluding the reserved
    /// atom that backs the constants.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut set = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Var(a) => {
                    if !a.is_reserved() {
                        set.insert(a.clone());
                    }
                }
                Formula::Not(g) => stack.push(g),
                Formula::Or(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        set
    }

    /// Classical truth value under `v`. Every non-reserved atom of the
    /// formula must be in `v`'s domain; there is no default value.
    pub fn eval(&self, v: &Interpretation) -> Result<bool, UnknownAtom> {
        self.eval_with(&|atom| v.get(atom))
    }

    /// Evaluation against an arbitrary lookup. The reserved atom is always
    /// true; everything else must resolve through the lookup.
    pub(crate) fn eval_with(
        &self,
        lookup: &dyn Fn(&Atom) -> Option<bool>,
    ) -> Result<bool, UnknownAtom> {
        // Explicit two-phase stack walk: compiled rule sets can nest a few
        // tens of thousands of nodes deep, beyond the default thread stack.
        enum Step<'a> {
            Visit(&'a Formula),
            ApplyNot,
            ApplyOr,
        }
        let mut steps = vec![Step::Visit(self)];
        let mut values: Vec<bool> = Vec::new();
        while let Some(step) = steps.pop() {
            match step {
                Step::Visit(Formula::Var(a)) => {
                    if a.is_reserved() {
                        values.push(true);
                    } else {
                        match lookup(a) {
                            Some(b) => values.push(b),
                            None => return Err(UnknownAtom(a.to_string())),
                        }
                    }
                }
                Step::Visit(Formula::Not(g)) => {
                    steps.push(Step::ApplyNot);
                    steps.push(Step::Visit(g));
                }
                Step::Visit(Formula::Or(l, r)) => {
                    steps.push(Step::ApplyOr);
                    steps.push(Step::Visit(r));
                    steps.push(Step::Visit(l));
                }
                Step::ApplyNot => {
                    let x = values.pop().expect("operand");
                    values.push(!x);
                }
                Step::ApplyOr => {
                    let r = values.pop().expect("operand");
                    let l = values.pop().expect("operand");
                    values.push(l || r);
                }
            }
        }
        Ok(values.pop().expect("result"))
    }

    /// Removes double negations (`not not f` becomes `f`). Optional pass;
    /// nothing in the compiler applies it implicitly.
    pub fn simplify_double_negation(&self) -> Formula {
        match self {
            Formula::Var(a) => Formula::Var(a.clone()),
            Formula::Not(g) => match g.as_ref() {
                Formula::Not(h) => h.simplify_double_negation(),
                _ => Formula::not(g.simplify_double_negation()),
            },
            Formula::Or(l, r) => {
                Formula::or(l.simplify_double_negation(), r.simplify_double_negation())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_formula(self))
    }
}

/// `phi UNLESS psi`, read as `not psi -> phi`.
pub fn unless(phi: Formula, psi: Formula) -> Formula {
    Formula::implies(Formula::not(psi), phi)
}

/// `phi UNLESS psi IN WHICH CASE chi`, read as `(not psi -> phi) and (psi -> chi)`.
pub fn unless_iwc(phi: Formula, psi: Formula, chi: Formula) -> Formula {
    Formula::and(unless(phi.clone(), psi.clone()), Formula::implies(psi, chi))
}

/// A total truth assignment over a finite atom set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Interpretation {
    assignment: BTreeMap<Atom, bool>,
}

impl Interpretation {
    pub fn new(assignment: impl IntoIterator<Item = (Atom, bool)>) -> Self {
        Interpretation {
            assignment: assignment.into_iter().collect(),
        }
    }

    pub fn get(&self, atom: &Atom) -> Option<bool> {
        self.assignment.get(atom).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Atom> {
        self.assignment.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Atom, bool)> {
        self.assignment.iter().map(|(a, b)| (a, *b))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Keeps only the atoms satisfying the predicate.
    pub fn restrict(&self, keep: impl Fn(&Atom) -> bool) -> Interpretation {
        Interpretation {
            assignment: self
                .assignment
                .iter()
                .filter(|(a, _)| keep(a))
                .map(|(a, b)| (a.clone(), *b))
                .collect(),
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (atom, value) in self.iter() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{atom}={value}")?;
            first = false;
        }
        Ok(())
    }
}

/// Decides logical equivalence of two formulas by enumerating every
/// interpretation over the union of their atoms. Bounded at
/// [`BRUTEFORCE_ATOM_LIMIT`] atoms.
pub fn equiv_bruteforce(f: &Formula, g: &Formula) -> Result<bool, TooManyAtoms> {
    let mut atoms: BTreeSet<Atom> = f.atoms();
    atoms.extend(g.atoms());
    let atoms: Vec<Atom> = atoms.into_iter().collect();
    if atoms.len() > BRUTEFORCE_ATOM_LIMIT {
        return Err(TooManyAtoms {
            count: atoms.len(),
            limit: BRUTEFORCE_ATOM_LIMIT,
        });
    }
    for mask in 0u64..(1u64 << atoms.len()) {
        let lookup = |atom: &Atom| -> Option<bool> {
            atoms
                .binary_search(atom)
                .ok()
                .map(|i| mask & (1 << i) != 0)
        };
        let fv = f.eval_with(&lookup).expect("atom in union domain");
        let gv = g.eval_with(&lookup).expect("atom in union domain");
        if fv != gv {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(name: &str) -> Atom {
        Atom::prop(name).unwrap()
    }

    fn var(name: &str) -> Formula {
        Formula::var(atom(name))
    }

    #[test]
    fn negation_semantics() {
        let f = Formula::not(var("q"));
        let v = Interpretation::new([(atom("q"), true)]);
        assert_eq!(f.eval(&v), Ok(false));
    }

    #[test]
    fn eval_errors_on_out_of_domain_atom() {
        let f = Formula::or(var("p"), var("q"));
        let v = Interpretation::new([(atom("p"), true)]);
        // no default: even though p alone would settle the disjunction
        assert_eq!(f.eval(&v), Err(UnknownAtom("q".into())));
    }

    #[test]
    fn constants_evaluate_without_domain_entries() {
        let v = Interpretation::new([]);
        assert_eq!(Formula::truth().eval(&v), Ok(true));
        assert_eq!(Formula::falsity().eval(&v), Ok(false));
    }

    #[test]
    fn derived_forms_have_the_defined_structure() {
        let and = Formula::and(var("p"), var("q"));
        assert_eq!(
            and,
            Formula::not(Formula::or(Formula::not(var("p")), Formula::not(var("q"))))
        );
        let imp = Formula::implies(var("p"), var("q"));
        assert_eq!(imp, Formula::or(Formula::not(var("p")), var("q")));
    }

    #[test]
    fn unless_is_the_defined_implication() {
        let f = unless(var("p"), var("q"));
        assert_eq!(f, Formula::implies(Formula::not(var("q")), var("p")));
    }

    #[test]
    fn unless_iwc_is_the_defined_conjunction() {
        let f = unless_iwc(var("p"), var("q"), var("r"));
        let expected = Formula::and(
            Formula::implies(Formula::not(var("q")), var("p")),
            Formula::implies(var("q"), var("r")),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn unless_equivalences() {
        let p = var("p");
        let q = var("q");
        // unless(p, p) is equivalent to p
        assert!(equiv_bruteforce(&unless(p.clone(), p.clone()), &p).unwrap());
        // equivalence to logical or
        assert!(equiv_bruteforce(&unless(p.clone(), q.clone()), &Formula::or(p.clone(), q.clone())).unwrap());
        // commutativity
        assert!(equiv_bruteforce(&unless(p.clone(), q.clone()), &unless(q.clone(), p.clone())).unwrap());
    }

    #[test]
    fn unless_associativity() {
        let (p, q, r) = (var("p"), var("q"), var("r"));
        let left = unless(unless(p.clone(), q.clone()), r.clone());
        let right = unless(p, unless(q, r));
        assert!(equiv_bruteforce(&left, &right).unwrap());
    }

    #[test]
    fn unless_iwc_with_true_collapses_to_unless() {
        let (p, q) = (var("p"), var("q"));
        let f = unless_iwc(p.clone(), q.clone(), Formula::truth());
        assert!(equiv_bruteforce(&f, &unless(p, q)).unwrap());
    }

    #[test]
    fn unless_iwc_with_false_trigger_collapses_to_phi() {
        let (p, r) = (var("p"), var("r"));
        let f = unless_iwc(p.clone(), Formula::falsity(), r);
        assert!(equiv_bruteforce(&f, &p).unwrap());
    }

    #[test]
    fn semantic_condition_for_unless() {
        // v(phi UNLESS psi) = true  iff  v(not psi) = false or v(phi) = true
        let (p, q) = (atom("p"), atom("q"));
        for (pv, qv) in [(false, false), (false, true), (true, false), (true, true)] {
            let v = Interpretation::new([(p.clone(), pv), (q.clone(), qv)]);
            let lhs = unless(var("p"), var("q")).eval(&v).unwrap();
            let not_psi = Formula::not(var("q")).eval(&v).unwrap();
            assert_eq!(lhs, !not_psi || pv);
        }
    }

    #[test]
    fn equiv_bruteforce_trivia() {
        let p = var("p");
        assert!(equiv_bruteforce(&p, &p).unwrap());
        assert!(!equiv_bruteforce(&p, &var("q")).unwrap());
    }

    #[test]
    fn equiv_bruteforce_rejects_oversized_unions() {
        let left = Formula::and_all((0..12).map(|i| var(&format!("p{i}"))));
        let right = Formula::and_all((0..12).map(|i| var(&format!("q{i}"))));
        let err = equiv_bruteforce(&left, &right).unwrap_err();
        assert_eq!(err.count, 24);
    }

    #[test]
    fn size_counts_constructor_nodes() {
        // c -> o  is  not c or o: Or, Not, Var, Var
        let f = Formula::implies(var("c"), var("o"));
        assert_eq!(f.size(), 4);
        assert_eq!(Formula::truth().size(), 4);
        assert_eq!(var("p").size(), 1);
    }

    #[test]
    fn atoms_exclude_the_reserved_atom() {
        let f = Formula::and(var("p"), Formula::truth());
        let names: Vec<String> = f.atoms().iter().map(|a| a.to_string()).collect();
        assert_eq!(names, vec!["p"]);
    }

    #[test]
    fn double_negation_is_preserved_until_asked() {
        let f = Formula::not(Formula::not(var("d")));
        assert_eq!(f.size(), 3);
        let s = f.simplify_double_negation();
        assert_eq!(s, var("d"));
        assert!(equiv_bruteforce(&f, &s).unwrap());
    }

    #[test]
    fn and_all_of_nothing_is_true() {
        assert!(Formula::and_all([]).is_truth());
        let single = Formula::and_all([var("p")]);
        assert_eq!(single, var("p"));
    }
}

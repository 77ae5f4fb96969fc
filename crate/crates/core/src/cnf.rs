//! CNF clause sets and the formula-to-CNF transformation.
//!
//! Conjuncts that already have clause shape are emitted directly; everything
//! else goes through a Tseitin encoding with fresh definition variables.
//! Atom variables occupy the low indices `1..=num_atoms`, in atom order;
//! auxiliary variables are numbered above them. The transformation is
//! equisatisfiable, and its satisfying assignments restricted to the
//! original atoms are exactly the models of the input formula.

use std::collections::BTreeMap;

use crate::atom::Atom;
use crate::formula::Formula;

/// A CNF instance: clauses over signed variable indices plus the mapping
/// between atoms and the low variable indices.
///
/// Clauses never contain both polarities of one variable; tautologies are
/// dropped on insertion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSet {
    clauses: Vec<Vec<i32>>,
    atom_index: BTreeMap<Atom, u32>,
    atoms_by_index: Vec<Atom>,
    num_vars: u32,
}

impl ClauseSet {
    fn with_atoms(atoms: impl IntoIterator<Item = Atom>) -> ClauseSet {
        let mut cs = ClauseSet {
            clauses: Vec::new(),
            atom_index: BTreeMap::new(),
            atoms_by_index: Vec::new(),
            num_vars: 0,
        };
        for atom in atoms {
            if !cs.atom_index.contains_key(&atom) {
                cs.num_vars += 1;
                cs.atom_index.insert(atom.clone(), cs.num_vars);
                cs.atoms_by_index.push(atom);
            }
        }
        cs
    }

    /// Rebuilds a clause set from parsed parts, e.g. a DIMACS file. The
    /// atom map must cover a prefix `1..=k` of the variable indices.
    pub fn from_parts(
        atoms_in_index_order: Vec<Atom>,
        num_vars: u32,
        clauses: Vec<Vec<i32>>,
    ) -> Result<ClauseSet, String> {
        if (atoms_in_index_order.len() as u32) > num_vars {
            return Err(format!(
                "{} mapped atoms but only {num_vars} variables",
                atoms_in_index_order.len()
            ));
        }
        let mut cs = ClauseSet::with_atoms(atoms_in_index_order);
        cs.num_vars = num_vars;
        for clause in clauses {
            for &lit in &clause {
                if lit == 0 || lit.unsigned_abs() > num_vars {
                    return Err(format!("literal {lit} out of range"));
                }
            }
            cs.add_clause(clause);
        }
        Ok(cs)
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_atoms(&self) -> u32 {
        self.atoms_by_index.len() as u32
    }

    pub fn index_of(&self, atom: &Atom) -> Option<u32> {
        self.atom_index.get(atom).copied()
    }

    pub fn atom_of(&self, index: u32) -> Option<&Atom> {
        self.atoms_by_index.get(index.checked_sub(1)? as usize)
    }

    /// Atoms with their variable indices, in index order.
    pub fn atom_vars(&self) -> impl Iterator<Item = (&Atom, u32)> {
        self.atoms_by_index
            .iter()
            .enumerate()
            .map(|(i, a)| (a, i as u32 + 1))
    }

    fn fresh_var(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    /// Inserts a clause: literals are sorted and deduplicated, and clauses
    /// containing a variable in both polarities are dropped as tautologies.
    fn add_clause(&mut self, mut lits: Vec<i32>) {
        lits.sort_by_key(|&l| (l.unsigned_abs(), l < 0));
        lits.dedup();
        let tautology = lits
            .windows(2)
            .any(|w| w[0].unsigned_abs() == w[1].unsigned_abs());
        if tautology {
            return;
        }
        debug_assert!(lits.iter().all(|&l| l != 0 && l.unsigned_abs() <= self.num_vars));
        self.clauses.push(lits);
    }
}

/// Splits a formula into its top-level conjuncts, looking through the
/// derived conjunction shape and double negations. Constant-true conjuncts
/// contribute nothing.
fn split_conjuncts(f: &Formula) -> Vec<&Formula> {
    let mut out = Vec::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        if let Some((l, r)) = g.as_and() {
            stack.push(r);
            stack.push(l);
        } else if g.is_truth() {
            continue;
        } else if let Formula::Not(x) = g {
            if let Formula::Not(y) = x.as_ref() {
                stack.push(y);
            } else {
                out.push(g);
            }
        } else {
            out.push(g);
        }
    }
    out
}

/// Reads a conjunct as a disjunction of literals if it has that shape,
/// looking through double negations.
fn clause_literals(f: &Formula) -> Option<Vec<(Atom, bool)>> {
    let mut lits = Vec::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        match g {
            Formula::Or(l, r) => {
                stack.push(r);
                stack.push(l);
            }
            Formula::Var(a) => lits.push((a.clone(), true)),
            Formula::Not(x) => match x.as_ref() {
                Formula::Var(a) => lits.push((a.clone(), false)),
                Formula::Not(y) => stack.push(y),
                _ => return None,
            },
        }
    }
    Some(lits)
}

struct Encoder {
    cs: ClauseSet,
    reserved_var: Option<i32>,
}

impl Encoder {
    fn var_literal(&mut self, atom: &Atom) -> i32 {
        if atom.is_reserved() {
            // the reserved atom backing the constants is not part of the
            // atom map; give it one hidden variable on demand
            return match self.reserved_var {
                Some(v) => v,
                None => {
                    let v = self.cs.fresh_var();
                    self.reserved_var = Some(v);
                    v
                }
            };
        }
        self.cs
            .index_of(atom)
            .expect("atom registered before encoding") as i32
    }

    fn add_direct_clause(&mut self, lits: Vec<(Atom, bool)>) {
        let clause: Vec<i32> = lits
            .into_iter()
            .map(|(atom, positive)| {
                let v = self.var_literal(&atom);
                if positive {
                    v
                } else {
                    -v
                }
            })
            .collect();
        self.cs.add_clause(clause);
    }

    /// Tseitin encoding of one conjunct; the returned literal is asserted
    /// as a unit clause by the caller.
    fn tseitin(&mut self, f: &Formula) -> i32 {
        enum Step<'a> {
            Visit(&'a Formula),
            Negate,
            Define,
        }
        let mut steps = vec![Step::Visit(f)];
        let mut lits: Vec<i32> = Vec::new();
        while let Some(step) = steps.pop() {
            match step {
                Step::Visit(Formula::Var(a)) => {
                    let v = self.var_literal(a);
                    lits.push(v);
                }
                Step::Visit(Formula::Not(g)) => {
                    steps.push(Step::Negate);
                    steps.push(Step::Visit(g));
                }
                Step::Visit(Formula::Or(l, r)) => {
                    steps.push(Step::Define);
                    steps.push(Step::Visit(r));
                    steps.push(Step::Visit(l));
                }
                Step::Negate => {
                    let x = lits.pop().expect("operand");
                    lits.push(-x);
                }
                Step::Define => {
                    let b = lits.pop().expect("operand");
                    let a = lits.pop().expect("operand");
                    let x = self.cs.fresh_var();
                    self.cs.add_clause(vec![-x, a, b]);
                    self.cs.add_clause(vec![x, -a]);
                    self.cs.add_clause(vec![x, -b]);
                    lits.push(x);
                }
            }
        }
        lits.pop().expect("root literal")
    }
}

/// Transforms a formula into an equisatisfiable clause set.
pub fn to_cnf(f: &Formula) -> ClauseSet {
    to_cnf_with_atoms(f, [])
}

/// Like [`to_cnf`], but registers extra atoms in the variable map first, so
/// models are total over a wider domain and variable numbering is stable
/// across related queries.
pub fn to_cnf_with_atoms(f: &Formula, extra: impl IntoIterator<Item = Atom>) -> ClauseSet {
    let mut atoms = f.atoms();
    atoms.extend(extra);
    let mut enc = Encoder {
        cs: ClauseSet::with_atoms(atoms),
        reserved_var: None,
    };
    for conjunct in split_conjuncts(f) {
        match clause_literals(conjunct) {
            Some(lits) => enc.add_direct_clause(lits),
            None => {
                let root = enc.tseitin(conjunct);
                enc.cs.add_clause(vec![root]);
            }
        }
    }
    enc.cs
}

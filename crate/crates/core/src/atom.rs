//! Propositional atoms and signed literals.
//!
//! An atom is an identifier with an optional list of constant arguments,
//! e.g. `a` or `a(user,curtains)`. Arguments are opaque: two atoms are equal
//! iff their name and full argument list are equal. There is no unification.

use std::fmt;

use thiserror::Error;

/// Words that the rule and formula syntax claims for itself. Atom and
/// argument names must not collide with these (case-insensitively), or the
/// canonical printer output would not re-parse.
const RESERVED_WORDS: &[&str] = &[
    "if", "then", "unless", "in", "which", "case", "rule", "sense",
    "obligation", "not", "and", "or", "true", "false",
];

/// Name of the atom reserved for encoding the constant `true` as `q or not q`.
/// It starts with an underscore, so it can never be written in source text.
pub(crate) const TRUE_ATOM_NAME: &str = "__true";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtomError {
    #[error("invalid identifier `{0}`: must match [a-z][A-Za-z0-9_]*")]
    InvalidIdentifier(String),
    #[error("`{0}` is a reserved word and cannot name an atom or argument")]
    ReservedWord(String),
}

fn check_identifier(s: &str) -> Result<(), AtomError> {
    let mut chars = s.chars();
    let ok = matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !ok {
        return Err(AtomError::InvalidIdentifier(s.to_string()));
    }
    if RESERVED_WORDS.contains(&s.to_ascii_lowercase().as_str()) {
        return Err(AtomError::ReservedWord(s.to_string()));
    }
    Ok(())
}

/// A ground propositional atom: a name plus zero or more constant arguments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    name: String,
    args: Vec<String>,
}

impl Atom {
    /// Builds an atom, validating the name and every argument against the
    /// identifier pattern `[a-z][A-Za-z0-9_]*`.
    pub fn new(
        name: impl Into<String>,
        args: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, AtomError> {
        let name = name.into();
        check_identifier(&name)?;
        let args: Vec<String> = args.into_iter().map(Into::into).collect();
        for arg in &args {
            check_identifier(arg)?;
        }
        Ok(Atom { name, args })
    }

    /// Builds an argument-free atom.
    pub fn prop(name: impl Into<String>) -> Result<Self, AtomError> {
        Self::new(name, Vec::<String>::new())
    }

    /// The atom backing the constant `true`. Not constructible through
    /// `Atom::new`, never user-declarable.
    pub(crate) fn reserved_true() -> Self {
        Atom {
            name: TRUE_ATOM_NAME.to_string(),
            args: Vec::new(),
        }
    }

    pub fn is_reserved(&self) -> bool {
        self.name == TRUE_ATOM_NAME
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn args(&self) -> &[String] {
        &self.args
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(","))?;
        }
        Ok(())
    }
}

/// A signed atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn positive(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn negative(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }

    pub fn negated(&self) -> Self {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

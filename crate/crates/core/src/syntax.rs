//! Canonical text syntax for formulas, plus the lexer shared with the rule
//! language.
//!
//! Grammar, loosest to tightest: `->` (right-associative), `or`, `and`
//! (both right-associative), `not`, then atoms, `true`, `false` and
//! parentheses. Keywords are case-insensitive; atoms are case-sensitive.
//!
//! The printer emits minimal parentheses for that precedence, with one
//! documented exception: the consequent of `->` is parenthesised when it is
//! a conjunction or disjunction, so compound outcomes read as a unit. Extra
//! parentheses never change what the parser builds, so
//! `parse(print(f)) = f` holds structurally for every formula.

use std::fmt;

use thiserror::Error;

use crate::atom::{Atom, AtomError};
use crate::formula::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax { line: u32, col: u32, expected: String },
    #[error("atom `{0}` is not declared")]
    UndeclaredAtom(String),
    #[error("atom `{0}` is declared more than once")]
    DuplicateDeclaration(String),
    #[error("atom `{0}` is not sensed; facts may only assert sensed literals")]
    NotSensed(String),
    #[error("facts assert atom `{0}` with both signs")]
    ContradictoryFacts(String),
}

impl ParseError {
    fn syntax(pos: Pos, expected: impl Into<String>) -> Self {
        ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            expected: expected.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kw {
    If,
    Then,
    Unless,
    In,
    Which,
    Case,
    Rule,
    Sense,
    Obligation,
    Not,
    And,
    Or,
    True,
    False,
}

impl Kw {
    fn from_word(word: &str) -> Option<Kw> {
        match word.to_ascii_lowercase().as_str() {
            "if" => Some(Kw::If),
            "then" => Some(Kw::Then),
            "unless" => Some(Kw::Unless),
            "in" => Some(Kw::In),
            "which" => Some(Kw::Which),
            "case" => Some(Kw::Case),
            "rule" => Some(Kw::Rule),
            "sense" => Some(Kw::Sense),
            "obligation" => Some(Kw::Obligation),
            "not" => Some(Kw::Not),
            "and" => Some(Kw::And),
            "or" => Some(Kw::Or),
            "true" => Some(Kw::True),
            "false" => Some(Kw::False),
            _ => None,
        }
    }
}

impl fmt::Display for Kw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Kw::If => "IF",
            Kw::Then => "THEN",
            Kw::Unless => "UNLESS",
            Kw::In => "IN",
            Kw::Which => "WHICH",
            Kw::Case => "CASE",
            Kw::Rule => "rule",
            Kw::Sense => "sense",
            Kw::Obligation => "obligation",
            Kw::Not => "not",
            Kw::And => "and",
            Kw::Or => "or",
            Kw::True => "true",
            Kw::False => "false",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    Keyword(Kw),
    LParen,
    RParen,
    Comma,
    Colon,
    Period,
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Keyword(k) => write!(f, "`{k}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Period => write!(f, "`.`"),
            Tok::Arrow => write!(f, "`->`"),
        }
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut toks = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                // comment to end of line
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                toks.push((Tok::LParen, pos));
            }
            ')' => {
                chars.next();
                col += 1;
                toks.push((Tok::RParen, pos));
            }
            ',' => {
                chars.next();
                col += 1;
                toks.push((Tok::Comma, pos));
            }
            ':' => {
                chars.next();
                col += 1;
                toks.push((Tok::Colon, pos));
            }
            '.' => {
                chars.next();
                col += 1;
                toks.push((Tok::Period, pos));
            }
            '-' => {
                chars.next();
                col += 1;
                match chars.peek() {
                    Some('>') => {
                        chars.next();
                        col += 1;
                        toks.push((Tok::Arrow, pos));
                    }
                    _ => return Err(ParseError::syntax(pos, "`->`")),
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                match Kw::from_word(&word) {
                    Some(kw) => toks.push((Tok::Keyword(kw), pos)),
                    None => toks.push((Tok::Word(word), pos)),
                }
            }
            other => {
                return Err(ParseError::syntax(
                    pos,
                    format!("a token, found `{other}`"),
                ))
            }
        }
    }
    Ok(toks)
}

/// Token cursor over a lexed buffer.
pub(crate) struct Cursor {
    toks: Vec<(Tok, Pos)>,
    idx: usize,
    end: Pos,
}

impl Cursor {
    pub fn new(text: &str) -> Result<Self, ParseError> {
        let toks = lex(text)?;
        let end = {
            let lines: Vec<&str> = text.split('\n').collect();
            Pos {
                line: lines.len() as u32,
                col: lines.last().map_or(0, |l| l.chars().count()) as u32 + 1,
            }
        };
        Ok(Cursor { toks, idx: 0, end })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    pub fn pos(&self) -> Pos {
        self.toks.get(self.idx).map_or(self.end, |(_, p)| *p)
    }

    pub fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    pub fn at_end(&self) -> bool {
        self.idx >= self.toks.len()
    }

    pub fn eat_keyword(&mut self, kw: Kw) -> bool {
        if self.peek() == Some(&Tok::Keyword(kw)) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_keyword(&mut self, kw: Kw) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.err_here(format!("`{kw}`")))
        }
    }

    pub fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.idx += 1;
            Ok(())
        } else {
            Err(self.err_here(format!("{tok}")))
        }
    }

    pub fn err_here(&self, expected: impl Into<String>) -> ParseError {
        let mut expected = expected.into();
        if let Some(found) = self.peek() {
            expected = format!("{expected}, found {found}");
        } else {
            expected = format!("{expected}, found end of input");
        }
        ParseError::syntax(self.pos(), expected)
    }
}

fn atom_component(cur: &mut Cursor, what: &str) -> Result<String, ParseError> {
    let pos = cur.pos();
    match cur.bump() {
        Some(Tok::Word(w)) => Ok(w),
        Some(Tok::Keyword(kw)) => Err(ParseError::syntax(
            pos,
            format!("{what}, found reserved word `{kw}`"),
        )),
        Some(found) => Err(ParseError::syntax(pos, format!("{what}, found {found}"))),
        None => Err(ParseError::syntax(pos, format!("{what}, found end of input"))),
    }
}

fn atom_error(pos: Pos, err: AtomError) -> ParseError {
    ParseError::syntax(pos, format!("a valid identifier ({err})"))
}

/// Parses `name` or `name(c1,c2)` at the cursor.
pub(crate) fn parse_atom_at(cur: &mut Cursor) -> Result<Atom, ParseError> {
    let pos = cur.pos();
    let name = atom_component(cur, "an atom name")?;
    let mut args = Vec::new();
    if cur.peek() == Some(&Tok::LParen) {
        cur.bump();
        loop {
            args.push(atom_component(cur, "a constant argument")?);
            match cur.bump() {
                Some(Tok::Comma) => continue,
                Some(Tok::RParen) => break,
                _ => return Err(ParseError::syntax(cur.pos(), "`,` or `)`")),
            }
        }
    }
    Atom::new(name, args).map_err(|e| atom_error(pos, e))
}

/// Parses a formula at the cursor, consuming as much as the grammar allows.
/// Stops cleanly in front of tokens that cannot extend a formula, which is
/// how rule keywords such as `THEN` terminate condition formulas.
pub(crate) fn parse_formula_at(cur: &mut Cursor) -> Result<Formula, ParseError> {
    parse_implied(cur)
}

fn parse_implied(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let lhs = parse_disj(cur)?;
    if cur.peek() == Some(&Tok::Arrow) {
        cur.bump();
        let rhs = parse_implied(cur)?;
        Ok(Formula::implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_disj(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let lhs = parse_conj(cur)?;
    if cur.eat_keyword(Kw::Or) {
        let rhs = parse_disj(cur)?;
        Ok(Formula::or(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_conj(cur: &mut Cursor) -> Result<Formula, ParseError> {
    let lhs = parse_negation(cur)?;
    if cur.eat_keyword(Kw::And) {
        let rhs = parse_conj(cur)?;
        Ok(Formula::and(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_negation(cur: &mut Cursor) -> Result<Formula, ParseError> {
    if cur.eat_keyword(Kw::Not) {
        Ok(Formula::not(parse_negation(cur)?))
    } else {
        parse_primary(cur)
    }
}

fn parse_primary(cur: &mut Cursor) -> Result<Formula, ParseError> {
    match cur.peek() {
        Some(Tok::Keyword(Kw::True)) => {
            cur.bump();
            Ok(Formula::truth())
        }
        Some(Tok::Keyword(Kw::False)) => {
            cur.bump();
            Ok(Formula::falsity())
        }
        Some(Tok::LParen) => {
            cur.bump();
            let inner = parse_formula_at(cur)?;
            cur.expect(Tok::RParen)?;
            Ok(inner)
        }
        Some(Tok::Word(_)) => Ok(Formula::var(parse_atom_at(cur)?)),
        _ => Err(cur.err_here("a formula")),
    }
}

/// Parses a complete formula; trailing input is an error.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = parse_formula_at(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.err_here("end of input"));
    }
    Ok(f)
}

const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NOT: u8 = 4;
const PREC_ATOM: u8 = 5;

/// Precedence of the operator a formula will print as, after resugaring.
fn display_prec(f: &Formula) -> u8 {
    if f.is_truth() || f.is_falsity() {
        PREC_ATOM
    } else if f.as_and().is_some() {
        PREC_AND
    } else if f.as_implies().is_some() {
        PREC_IMPLIES
    } else {
        match f {
            Formula::Var(_) => PREC_ATOM,
            Formula::Not(_) => PREC_NOT,
            Formula::Or(_, _) => PREC_OR,
        }
    }
}

fn print_into(f: &Formula, min_prec: u8, out: &mut String) {
    let prec = display_prec(f);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    if f.is_truth() {
        out.push_str("true");
    } else if f.is_falsity() {
        out.push_str("false");
    } else if let Some((l, r)) = f.as_and() {
        print_into(l, PREC_AND + 1, out);
        out.push_str(" and ");
        print_into(r, PREC_AND, out);
    } else if let Some((l, r)) = f.as_implies() {
        print_into(l, PREC_IMPLIES + 1, out);
        out.push_str(" -> ");
        // compound consequents are parenthesised for readability
        let rhs_min = match display_prec(r) {
            PREC_OR | PREC_AND => PREC_ATOM,
            _ => PREC_IMPLIES,
        };
        print_into(r, rhs_min, out);
    } else {
        match f {
            Formula::Var(a) => out.push_str(&a.to_string()),
            Formula::Not(g) => {
                out.push_str("not ");
                print_into(g, PREC_NOT, out);
            }
            Formula::Or(l, r) => {
                print_into(l, PREC_OR + 1, out);
                out.push_str(" or ");
                print_into(r, PREC_OR, out);
            }
        }
    }
    if parens {
        out.push(')');
    }
}

/// Renders the canonical text form of a formula.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    print_into(f, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::Atom;
    use crate::formula::{equiv_bruteforce, unless, unless_iwc, Interpretation};

    fn var(name: &str) -> Formula {
        Formula::var(Atom::prop(name).unwrap())
    }

    #[test]
    fn parses_atoms_with_args() {
        let f = parse_formula("a(user,curtains)").unwrap();
        assert_eq!(f, Formula::var(Atom::new("a", ["user", "curtains"]).unwrap()));
    }

    #[test]
    fn precedence_not_over_and_over_or_over_implies() {
        let f = parse_formula("not a and b or c -> d").unwrap();
        let expected = Formula::implies(
            Formula::or(Formula::and(Formula::not(var("a")), var("b")), var("c")),
            var("d"),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn implies_is_right_associative() {
        let f = parse_formula("a -> b -> c").unwrap();
        let expected = Formula::implies(var("a"), Formula::implies(var("b"), var("c")));
        assert_eq!(f, expected);
    }

    #[test]
    fn and_or_are_right_associative() {
        assert_eq!(
            parse_formula("a and b and c").unwrap(),
            Formula::and(var("a"), Formula::and(var("b"), var("c"))),
        );
        assert_eq!(
            parse_formula("a or b or c").unwrap(),
            Formula::or(var("a"), Formula::or(var("b"), var("c"))),
        );
    }

    #[test]
    fn parses_constants_to_their_stored_shape() {
        assert!(parse_formula("true").unwrap().is_truth());
        assert!(parse_formula("false").unwrap().is_falsity());
    }

    #[test]
    fn keywords_are_case_insensitive() {
        assert_eq!(
            parse_formula("NOT a AND b").unwrap(),
            parse_formula("not a and b").unwrap()
        );
    }

    #[test]
    fn reserved_atom_is_not_parseable() {
        assert!(parse_formula("__true").is_err());
    }

    #[test]
    fn error_carries_line_and_column() {
        let err = parse_formula("a and\nor b").unwrap_err();
        match err {
            ParseError::Syntax { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 1);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn print_resugars_derived_forms() {
        assert_eq!(print_formula(&Formula::and(var("p"), var("q"))), "p and q");
        assert_eq!(print_formula(&Formula::implies(var("p"), var("q"))), "p -> q");
        assert_eq!(print_formula(&Formula::truth()), "true");
        assert_eq!(print_formula(&Formula::falsity()), "false");
        assert_eq!(print_formula(&unless(var("p"), var("q"))), "not q -> p");
        assert_eq!(
            print_formula(&unless_iwc(var("p"), var("q"), var("r"))),
            "(not q -> p) and (q -> r)"
        );
    }

    #[test]
    fn print_parenthesises_compound_consequents() {
        let f = Formula::implies(var("a"), Formula::and(var("n"), var("s")));
        assert_eq!(print_formula(&f), "a -> (n and s)");
        let g = Formula::implies(var("a"), Formula::or(var("n"), var("s")));
        assert_eq!(print_formula(&g), "a -> (n or s)");
        // implication consequents keep the flat right-associated form
        let h = Formula::implies(var("a"), Formula::implies(var("b"), var("c")));
        assert_eq!(print_formula(&h), "a -> b -> c");
    }

    #[test]
    fn print_preserves_structural_association() {
        let left = Formula::or(Formula::or(var("a"), var("b")), var("c"));
        assert_eq!(print_formula(&left), "(a or b) or c");
        let imp = Formula::implies(Formula::implies(var("a"), var("b")), var("c"));
        assert_eq!(print_formula(&imp), "(a -> b) -> c");
    }

    #[test]
    fn double_negation_prints_verbatim() {
        let f = Formula::not(Formula::not(var("d")));
        assert_eq!(print_formula(&f), "not not d");
        assert_eq!(parse_formula("not not d").unwrap(), f);
    }

    proptest::proptest! {
        #[test]
        fn parse_print_roundtrip_is_structural_identity(f in arbitrary_formula(3)) {
            let printed = print_formula(&f);
            let reparsed = parse_formula(&printed).unwrap();
            proptest::prop_assert_eq!(&reparsed, &f, "printed as {}", printed);
        }

        #[test]
        fn roundtrip_preserves_eval(f in arbitrary_formula(3), mask in 0u32..64) {
            let reparsed = parse_formula(&print_formula(&f)).unwrap();
            let atoms: Vec<Atom> = f.atoms().into_iter().collect();
            let v = Interpretation::new(
                atoms.iter().enumerate().map(|(i, a)| (a.clone(), mask & (1 << i) != 0)),
            );
            proptest::prop_assert_eq!(f.eval(&v).unwrap(), reparsed.eval(&v).unwrap());
        }

        #[test]
        fn resugared_output_stays_equivalent(f in arbitrary_formula(3)) {
            let reparsed = parse_formula(&print_formula(&f)).unwrap();
            proptest::prop_assert!(equiv_bruteforce(&f, &reparsed).unwrap());
        }
    }

    /// Random formulas over six atoms, including derived constructors.
    fn arbitrary_formula(depth: u32) -> proptest::strategy::BoxedStrategy<Formula> {
        use proptest::prelude::*;
        let names = ["p", "q", "r", "s2", "t2", "u"];
        let leaf = prop_oneof![
            proptest::sample::select(names.as_slice())
                .prop_map(|n| Formula::var(Atom::prop(n).unwrap())),
            Just(Formula::truth()),
            Just(Formula::falsity()),
        ];
        leaf.prop_recursive(depth, 64, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
            ]
        })
        .boxed()
    }
}

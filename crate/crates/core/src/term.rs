//! Terms and identities over the signature `{\, /, ·, ′}`: parsing,
//! printing, substitution, and evaluation on finite algebras.
//!
//! The grammar is fully parenthesized for binary operators (no precedence
//! between `\`, `/`, `*`); the postfix `'` binds tightest; top-level
//! parentheses are optional. On a bimagma, `t'` is shorthand for `(t\t)/t`
//! and is expanded during evaluation; on a unary semigroup, `x\y` and `x/y`
//! expand to `x'·y` and `x·y'`.

use crate::algebra::{Algebra, AlgebraKind, Elem, FiniteBimagma, FiniteUnarySemigroup};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(char),
    Mul(Box<Term>, Box<Term>),
    Ld(Box<Term>, Box<Term>),
    Rd(Box<Term>, Box<Term>),
    Inv(Box<Term>),
}

/// The natural signature of an identity, inferred from the operations present.
/// `Inv` alone stays on the semigroup side; it is legal in bimagma identities
/// as shorthand, so only `Mul` forces the semigroup (or mixed) side.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Side {
    Semigroup,
    Bimagma,
    Mixed,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Identity {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
    pub side: Side,
}

/// A total map from the variables of an identity to element indices.
pub type Assignment = BTreeMap<char, Elem>;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum TermParseError {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: &'static str },
    #[error("ambiguous term at byte {position}: chained binary operators need parentheses")]
    AmbiguousTerm { position: usize },
}

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum EvalError {
    #[error("operation {op} is not available on a {kind}")]
    SignatureMismatch { op: &'static str, kind: AlgebraKind },
    #[error("variable {0} has no value in the assignment")]
    UnboundVariable(char),
}

impl Term {
    pub fn var(c: char) -> Term {
        Term::Var(c)
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn ld(a: Term, b: Term) -> Term {
        Term::Ld(Box::new(a), Box::new(b))
    }

    pub fn rd(a: Term, b: Term) -> Term {
        Term::Rd(Box::new(a), Box::new(b))
    }

    pub fn inv(a: Term) -> Term {
        Term::Inv(Box::new(a))
    }

    /// The `i`-th direct child, if any. Binary nodes have children 0 and 1;
    /// `Inv` has child 0.
    pub fn child(&self, i: usize) -> Option<&Term> {
        match (self, i) {
            (Term::Mul(a, _), 0) | (Term::Ld(a, _), 0) | (Term::Rd(a, _), 0) => Some(a),
            (Term::Mul(_, b), 1) | (Term::Ld(_, b), 1) | (Term::Rd(_, b), 1) => Some(b),
            (Term::Inv(a), 0) => Some(a),
            _ => None,
        }
    }

    /// The subterm at a path of child indices; `&[]` is the term itself.
    pub fn subterm_at(&self, path: &[usize]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            t = t.child(i)?;
        }
        Some(t)
    }

    /// A copy with the subterm at `path` replaced. `None` if the path is invalid.
    pub fn with_replaced(&self, path: &[usize], replacement: Term) -> Option<Term> {
        if path.is_empty() {
            return Some(replacement);
        }
        let (i, rest) = (path[0], &path[1..]);
        let rebuild = |a: &Term, b: &Term, which: usize| -> Option<(Term, Term)> {
            Some(if which == 0 {
                (a.with_replaced(rest, replacement.clone())?, b.clone())
            } else {
                (a.clone(), b.with_replaced(rest, replacement.clone())?)
            })
        };
        match self {
            Term::Var(_) => None,
            Term::Inv(a) if i == 0 => Some(Term::inv(a.with_replaced(rest, replacement)?)),
            Term::Inv(_) => None,
            Term::Mul(a, b) if i <= 1 => {
                let (a, b) = rebuild(a, b, i)?;
                Some(Term::mul(a, b))
            }
            Term::Ld(a, b) if i <= 1 => {
                let (a, b) = rebuild(a, b, i)?;
                Some(Term::ld(a, b))
            }
            Term::Rd(a, b) if i <= 1 => {
                let (a, b) = rebuild(a, b, i)?;
                Some(Term::rd(a, b))
            }
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<char> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<char>) {
        match self {
            Term::Var(c) => {
                out.insert(*c);
            }
            Term::Inv(a) => a.collect_vars(out),
            Term::Mul(a, b) | Term::Ld(a, b) | Term::Rd(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Replace variables by terms. Variables absent from the map are kept.
    pub fn substitute(&self, map: &BTreeMap<char, Term>) -> Term {
        match self {
            Term::Var(c) => map.get(c).cloned().unwrap_or(Term::Var(*c)),
            Term::Inv(a) => Term::inv(a.substitute(map)),
            Term::Mul(a, b) => Term::mul(a.substitute(map), b.substitute(map)),
            Term::Ld(a, b) => Term::ld(a.substitute(map), b.substitute(map)),
            Term::Rd(a, b) => Term::rd(a.substitute(map), b.substitute(map)),
        }
    }

    fn has_mul(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Mul(..) => true,
            Term::Inv(a) => a.has_mul(),
            Term::Ld(a, b) | Term::Rd(a, b) => a.has_mul() || b.has_mul(),
        }
    }

    fn has_division(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Ld(..) | Term::Rd(..) => true,
            Term::Inv(a) => a.has_division(),
            Term::Mul(a, b) => a.has_division() || b.has_division(),
        }
    }

    /// Structural equality modulo a bijective renaming of variables, shared
    /// across the whole comparison.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        let mut fwd = BTreeMap::new();
        let mut bwd = BTreeMap::new();
        alpha_eq_terms(self, other, &mut fwd, &mut bwd)
    }

    /// Evaluate on a unary semigroup: `Mul` and `Inv` are native, divisions
    /// expand as `x\y = x'·y` and `x/y = x·y'`.
    pub fn eval_semigroup(
        &self,
        s: &FiniteUnarySemigroup,
        a: &Assignment,
    ) -> Result<Elem, EvalError> {
        Ok(match self {
            Term::Var(c) => *a.get(c).ok_or(EvalError::UnboundVariable(*c))?,
            Term::Inv(t) => s.inv(t.eval_semigroup(s, a)?),
            Term::Mul(l, r) => s.mul(l.eval_semigroup(s, a)?, r.eval_semigroup(s, a)?),
            Term::Ld(l, r) => s.mul(s.inv(l.eval_semigroup(s, a)?), r.eval_semigroup(s, a)?),
            Term::Rd(l, r) => s.mul(l.eval_semigroup(s, a)?, s.inv(r.eval_semigroup(s, a)?)),
        })
    }

    /// Evaluate on a bimagma: divisions are native, `Inv(t)` expands to
    /// `(t\t)/t`, and `Mul` is a signature mismatch.
    pub fn eval_bimagma(&self, b: &FiniteBimagma, a: &Assignment) -> Result<Elem, EvalError> {
        Ok(match self {
            Term::Var(c) => *a.get(c).ok_or(EvalError::UnboundVariable(*c))?,
            Term::Inv(t) => {
                let v = t.eval_bimagma(b, a)?;
                b.rd(b.ld(v, v), v)
            }
            Term::Ld(l, r) => b.ld(l.eval_bimagma(b, a)?, r.eval_bimagma(b, a)?),
            Term::Rd(l, r) => b.rd(l.eval_bimagma(b, a)?, r.eval_bimagma(b, a)?),
            Term::Mul(..) => {
                return Err(EvalError::SignatureMismatch {
                    op: "*",
                    kind: AlgebraKind::Bimagma,
                })
            }
        })
    }
}

fn alpha_eq_terms(
    a: &Term,
    b: &Term,
    fwd: &mut BTreeMap<char, char>,
    bwd: &mut BTreeMap<char, char>,
) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let f = *fwd.entry(*x).or_insert(*y);
            let g = *bwd.entry(*y).or_insert(*x);
            f == *y && g == *x
        }
        (Term::Inv(s), Term::Inv(t)) => alpha_eq_terms(s, t, fwd, bwd),
        (Term::Mul(s1, s2), Term::Mul(t1, t2))
        | (Term::Ld(s1, s2), Term::Ld(t1, t2))
        | (Term::Rd(s1, s2), Term::Rd(t1, t2)) => {
            alpha_eq_terms(s1, t1, fwd, bwd) && alpha_eq_terms(s2, t2, fwd, bwd)
        }
        _ => false,
    }
}

fn infer_side(lhs: &Term, rhs: &Term) -> Side {
    let mul = lhs.has_mul() || rhs.has_mul();
    let div = lhs.has_division() || rhs.has_division();
    match (mul, div) {
        (true, true) => Side::Mixed,
        (true, false) => Side::Semigroup,
        (false, true) => Side::Bimagma,
        (false, false) => Side::Semigroup,
    }
}

impl Identity {
    pub fn new(name: impl Into<String>, lhs: Term, rhs: Term) -> Identity {
        let side = infer_side(&lhs, &rhs);
        Identity {
            name: name.into(),
            lhs,
            rhs,
            side,
        }
    }

    /// Union of both sides' variables, in sorted order.
    pub fn vars(&self) -> Vec<char> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v.into_iter().collect()
    }

    /// Equality of both sides modulo one shared bijective variable renaming.
    pub fn alpha_eq(&self, other: &Identity) -> bool {
        let mut fwd = BTreeMap::new();
        let mut bwd = BTreeMap::new();
        alpha_eq_terms(&self.lhs, &other.lhs, &mut fwd, &mut bwd)
            && alpha_eq_terms(&self.rhs, &other.rhs, &mut fwd, &mut bwd)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, true)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, top: bool) -> fmt::Result {
    match t {
        Term::Var(c) => write!(f, "{c}"),
        Term::Inv(a) => {
            write_term(f, a, false)?;
            write!(f, "'")
        }
        Term::Mul(a, b) => write_binary(f, a, '*', b, top),
        Term::Ld(a, b) => write_binary(f, a, '\\', b, top),
        Term::Rd(a, b) => write_binary(f, a, '/', b, top),
    }
}

fn write_binary(f: &mut fmt::Formatter<'_>, a: &Term, op: char, b: &Term, top: bool) -> fmt::Result {
    if !top {
        write!(f, "(")?;
    }
    write_term(f, a, false)?;
    write!(f, "{op}")?;
    write_term(f, b, false)?;
    if !top {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn parse_primary(&mut self) -> Result<Term, TermParseError> {
        match self.peek() {
            Some(c @ b'a'..=b'z') => {
                self.pos += 1;
                Ok(Term::Var(c as char))
            }
            Some(b'(') => {
                self.pos += 1;
                let t = self.parse_term()?;
                if self.bump() != Some(b')') {
                    return Err(TermParseError::Syntax {
                        position: self.pos.saturating_sub(1),
                        expected: "')'",
                    });
                }
                Ok(t)
            }
            _ => Err(TermParseError::Syntax {
                position: self.pos,
                expected: "a variable or '('",
            }),
        }
    }

    fn parse_operand(&mut self) -> Result<Term, TermParseError> {
        let mut t = self.parse_primary()?;
        while self.peek() == Some(b'\'') {
            self.pos += 1;
            t = Term::inv(t);
        }
        Ok(t)
    }

    fn parse_term(&mut self) -> Result<Term, TermParseError> {
        let lhs = self.parse_operand()?;
        let op = match self.peek() {
            Some(b'*') => Term::mul as fn(Term, Term) -> Term,
            Some(b'\\') => Term::ld,
            Some(b'/') => Term::rd,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.parse_operand()?;
        // A second unparenthesized binary operator has no defined grouping.
        if matches!(self.peek(), Some(b'*') | Some(b'\\') | Some(b'/')) {
            return Err(TermParseError::AmbiguousTerm { position: self.pos });
        }
        Ok(op(lhs, rhs))
    }
}

/// Parse a single term (no `=`).
pub fn parse_term(text: &str) -> Result<Term, TermParseError> {
    let mut p = Parser::new(text);
    let t = p.parse_term()?;
    if p.peek().is_some() {
        return Err(TermParseError::Syntax {
            position: p.pos,
            expected: "end of input",
        });
    }
    Ok(t)
}

/// Parse `lhs = rhs` in the identity grammar, inferring the side.
pub fn parse_identity(name: &str, text: &str) -> Result<Identity, TermParseError> {
    let mut p = Parser::new(text);
    let lhs = p.parse_term()?;
    if p.bump() != Some(b'=') {
        return Err(TermParseError::Syntax {
            position: p.pos.saturating_sub(1),
            expected: "'='",
        });
    }
    let rhs = p.parse_term()?;
    if p.peek().is_some() {
        return Err(TermParseError::Syntax {
            position: p.pos,
            expected: "end of input",
        });
    }
    Ok(Identity::new(name, lhs, rhs))
}

/// Iterate all assignments of `vars` into `[0, n)` in lexicographic order
/// (first variable most significant), calling `f` until it returns `false`.
/// Returns the first assignment on which `f` returned `false`, if any.
fn first_assignment_failing(
    vars: &[char],
    n: usize,
    mut f: impl FnMut(&Assignment) -> Result<bool, EvalError>,
) -> Result<Option<Assignment>, EvalError> {
    let k = vars.len();
    let mut counters = vec![0u8; k];
    loop {
        let a: Assignment = vars.iter().copied().zip(counters.iter().copied()).collect();
        if !f(&a)? {
            return Ok(Some(a));
        }
        // odometer with the last variable fastest
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            counters[i] += 1;
            if (counters[i] as usize) < n {
                break;
            }
            counters[i] = 0;
        }
        if k == 0 {
            return Ok(None);
        }
    }
}

/// True iff the identity holds under every assignment.
pub fn holds(id: &Identity, alg: &Algebra) -> Result<bool, EvalError> {
    Ok(find_violation(id, alg)?.is_none())
}

/// The lexicographically first violating assignment, if any.
pub fn find_violation(id: &Identity, alg: &Algebra) -> Result<Option<Assignment>, EvalError> {
    let vars = id.vars();
    first_assignment_failing(&vars, alg.size(), |a| match alg {
        Algebra::UnarySemigroup(s) => {
            Ok(id.lhs.eval_semigroup(s, a)? == id.rhs.eval_semigroup(s, a)?)
        }
        Algebra::Bimagma(b) => Ok(id.lhs.eval_bimagma(b, a)? == id.rhs.eval_bimagma(b, a)?),
    })
}

/// [`holds`] specialized to unary semigroups (never signature-mismatches).
pub fn holds_on_semigroup(id: &Identity, s: &FiniteUnarySemigroup) -> bool {
    let vars = id.vars();
    first_assignment_failing(&vars, s.size(), |a| {
        Ok(id.lhs.eval_semigroup(s, a).expect("semigroup evaluation is total")
            == id.rhs.eval_semigroup(s, a).expect("semigroup evaluation is total"))
    })
    .expect("semigroup evaluation is total")
    .is_none()
}

/// [`holds`] specialized to bimagmas; errors only if the identity contains `*`.
pub fn holds_on_bimagma(id: &Identity, b: &FiniteBimagma) -> Result<bool, EvalError> {
    let vars = id.vars();
    Ok(first_assignment_failing(&vars, b.size(), |a| {
        Ok(id.lhs.eval_bimagma(b, a)? == id.rhs.eval_bimagma(b, a)?)
    })?
    .is_none())
}

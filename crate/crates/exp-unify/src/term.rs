//! Terms over the exponentiation signature, their concrete syntax, and
//! substitutions.
//!
//! The decidable fragment uses `exp/2`, `g/1`, the two multiplications `*`
//! and `⊛` (written `@`), variables and free constants. The group oracle
//! additionally understands `inv/1`, `i/1` and the unit `1`; the solver
//! rejects those three.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::Error;

/// Namespace prefix for generated variables. Rejected by the parser, so
/// generated names can never collide with user input.
pub const FRESH_PREFIX: &str = "_v";

/// A variable name. User variables start with an uppercase letter;
/// generated variables live in the [`FRESH_PREFIX`] namespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    /// True for solver-generated variables.
    pub fn is_fresh(&self) -> bool {
        self.0.starts_with(FRESH_PREFIX)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(String),
    /// Unit of both group operations. Group-oracle signature only.
    One,
    Exp(Box<Term>, Box<Term>),
    G(Box<Term>),
    /// Base-level multiplication `*`.
    Mul(Box<Term>, Box<Term>),
    /// Exponent-level multiplication `⊛`, written `@`.
    CMul(Box<Term>, Box<Term>),
    /// Inverse in the `*` group, written `inv(..)`. Group-oracle signature only.
    Inv(Box<Term>),
    /// Inverse in the `⊛` group, written `i(..)`. Group-oracle signature only.
    IInv(Box<Term>),
}

pub fn var(name: &str) -> Term {
    Term::Var(Var::new(name))
}

pub fn cnst(name: &str) -> Term {
    Term::Const(name.to_string())
}

pub fn exp(base: Term, exponent: Term) -> Term {
    Term::Exp(Box::new(base), Box::new(exponent))
}

pub fn g(t: Term) -> Term {
    Term::G(Box::new(t))
}

pub fn mul(l: Term, r: Term) -> Term {
    Term::Mul(Box::new(l), Box::new(r))
}

pub fn cmul(l: Term, r: Term) -> Term {
    Term::CMul(Box::new(l), Box::new(r))
}

pub fn inv(t: Term) -> Term {
    Term::Inv(Box::new(t))
}

pub fn iinv(t: Term) -> Term {
    Term::IInv(Box::new(t))
}

impl Term {
    /// Collect all variables into `out`.
    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) | Term::One => {}
            Term::G(a) | Term::Inv(a) | Term::IInv(a) => a.collect_vars(out),
            Term::Exp(a, b) | Term::Mul(a, b) | Term::CMul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Name of the first symbol outside the decidable fragment, if any.
    pub fn group_only_symbol(&self) -> Option<&'static str> {
        match self {
            Term::One => Some("1"),
            Term::Inv(_) => Some("inv"),
            Term::IInv(_) => Some("i"),
            Term::Var(_) | Term::Const(_) => None,
            Term::G(a) => a.group_only_symbol(),
            Term::Exp(a, b) | Term::Mul(a, b) | Term::CMul(a, b) => {
                a.group_only_symbol().or_else(|| b.group_only_symbol())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) | Term::One => 1,
            Term::G(a) | Term::Inv(a) | Term::IInv(a) => 1 + a.depth(),
            Term::Exp(a, b) | Term::Mul(a, b) | Term::CMul(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) | Term::One => 1,
            Term::G(a) | Term::Inv(a) | Term::IInv(a) => 1 + a.size(),
            Term::Exp(a, b) | Term::Mul(a, b) | Term::CMul(a, b) => 1 + a.size() + b.size(),
        }
    }
}

// Printing. `*` and `@` are left-associative and never mix without
// parentheses, so a right child or a child of the other multiplication is
// parenthesized.
fn fmt_term(t: &Term, f: &mut fmt::Formatter<'_>, parent: Option<&Term>, right: bool) -> fmt::Result {
    let needs_parens = match (t, parent) {
        (Term::Mul(..), Some(Term::Mul(..))) | (Term::CMul(..), Some(Term::CMul(..))) => right,
        (Term::Mul(..), Some(Term::CMul(..))) | (Term::CMul(..), Some(Term::Mul(..))) => true,
        _ => false,
    };
    if needs_parens {
        f.write_str("(")?;
    }
    match t {
        Term::Var(v) => write!(f, "{v}")?,
        Term::Const(c) => f.write_str(c)?,
        Term::One => f.write_str("1")?,
        Term::G(a) => write!(f, "g({a})")?,
        Term::Inv(a) => write!(f, "inv({a})")?,
        Term::IInv(a) => write!(f, "i({a})")?,
        Term::Exp(a, b) => write!(f, "exp({a}, {b})")?,
        Term::Mul(a, b) => {
            fmt_term(a, f, Some(t), false)?;
            f.write_str(" * ")?;
            fmt_term(b, f, Some(t), true)?;
        }
        Term::CMul(a, b) => {
            fmt_term(a, f, Some(t), false)?;
            f.write_str(" @ ")?;
            fmt_term(b, f, Some(t), true)?;
        }
    }
    if needs_parens {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f, None, false)
    }
}

/// A substitution: a finite map from variables to terms, applied
/// simultaneously.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subst(pub BTreeMap<Var, Term>);

impl Subst {
    pub fn new() -> Self {
        Subst(BTreeMap::new())
    }

    pub fn bind(&mut self, v: Var, t: Term) {
        self.0.insert(v, t);
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    /// Simultaneous application: bound variables are replaced by their
    /// images; the images are not re-substituted.
    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) | Term::One => t.clone(),
            Term::G(a) => g(self.apply(a)),
            Term::Inv(a) => inv(self.apply(a)),
            Term::IInv(a) => iinv(self.apply(a)),
            Term::Exp(a, b) => exp(self.apply(a), self.apply(b)),
            Term::Mul(a, b) => mul(self.apply(a), self.apply(b)),
            Term::CMul(a, b) => cmul(self.apply(a), self.apply(b)),
        }
    }

    /// A substitution is idempotent when no bound variable occurs in any
    /// right-hand side.
    pub fn is_idempotent(&self) -> bool {
        self.0
            .values()
            .all(|t| t.vars().iter().all(|v| !self.0.contains_key(v)))
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    One,
    Star,
    At,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(usize, Tok)>,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, Error> {
    let mut toks = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '@' => {
                toks.push((i, Tok::At));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '1' => {
                toks.push((i, Tok::One));
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(src[start..i].to_string())));
            }
            '_' => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("names starting with '{FRESH_PREFIX}' are reserved"),
                });
            }
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character '{other}'"),
                });
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    lx: Lexer<'a>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.lx.toks.get(self.pos).map(|(_, t)| t)
    }

    fn next_pos(&self) -> usize {
        self.lx
            .toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.lx.src.len())
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.lx.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), Error> {
        let pos = self.next_pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            got => Err(Error::Parse {
                pos,
                msg: format!("expected {want:?}, found {got:?}"),
            }),
        }
    }

    // term := atom (("*" atom)* | ("@" atom)*)
    // Mixing "*" and "@" in one chain is rejected: the theory relates the
    // two multiplications by no axiom, so a mixed chain has no reading.
    fn term(&mut self) -> Result<Term, Error> {
        let mut acc = self.atom()?;
        let mut chain_op: Option<Tok> = None;
        loop {
            match self.peek() {
                Some(Tok::Star) | Some(Tok::At) => {
                    let pos = self.next_pos();
                    let op = self.bump().unwrap();
                    match &chain_op {
                        None => chain_op = Some(op.clone()),
                        Some(prev) if *prev == op => {}
                        Some(_) => {
                            return Err(Error::Parse {
                                pos,
                                msg: "mixing '*' and '@' in one chain requires parentheses"
                                    .to_string(),
                            });
                        }
                    }
                    let rhs = self.atom()?;
                    acc = match op {
                        Tok::Star => mul(acc, rhs),
                        Tok::At => cmul(acc, rhs),
                        _ => unreachable!(),
                    };
                }
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self) -> Result<Term, Error> {
        let pos = self.next_pos();
        match self.bump() {
            Some(Tok::One) => Ok(Term::One),
            Some(Tok::LParen) => {
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.bump();
                    match name.as_str() {
                        "g" => {
                            let a = self.term()?;
                            self.expect(Tok::RParen)?;
                            Ok(g(a))
                        }
                        "inv" => {
                            let a = self.term()?;
                            self.expect(Tok::RParen)?;
                            Ok(inv(a))
                        }
                        "i" => {
                            let a = self.term()?;
                            self.expect(Tok::RParen)?;
                            Ok(iinv(a))
                        }
                        "exp" => {
                            let a = self.term()?;
                            self.expect(Tok::Comma)?;
                            let b = self.term()?;
                            self.expect(Tok::RParen)?;
                            Ok(exp(a, b))
                        }
                        other => Err(Error::Parse {
                            pos,
                            msg: format!("unknown operator '{other}'"),
                        }),
                    }
                } else {
                    let first = name.chars().next().unwrap();
                    if first.is_ascii_uppercase() {
                        Ok(Term::Var(Var::new(name)))
                    } else {
                        Ok(Term::Const(name))
                    }
                }
            }
            got => Err(Error::Parse {
                pos,
                msg: format!("expected a term, found {got:?}"),
            }),
        }
    }
}

/// Parse a single term.
pub fn parse_term(src: &str) -> Result<Term, Error> {
    let toks = lex(src)?;
    let mut p = Parser {
        lx: Lexer { src, toks },
        pos: 0,
    };
    let t = p.term()?;
    if p.pos != p.lx.toks.len() {
        return Err(Error::Parse {
            pos: p.next_pos(),
            msg: "trailing input after term".to_string(),
        });
    }
    Ok(t)
}

/// Parse one equation `lhs =? rhs`.
pub fn parse_equation(line: &str) -> Result<(Term, Term), Error> {
    let (l, r) = line.split_once("=?").ok_or_else(|| Error::Parse {
        pos: 0,
        msg: format!("missing '=?' in equation: {line}"),
    })?;
    Ok((parse_term(l)?, parse_term(r)?))
}

/// Parse a problem file: one `lhs =? rhs` per line, `#` comments, blank
/// lines ignored. At least one equation is required.
pub fn parse_problem(text: &str) -> Result<Vec<(Term, Term)>, Error> {
    let mut eqs = Vec::new();
    for line in text.lines() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        if line.trim().is_empty() {
            continue;
        }
        eqs.push(parse_equation(line)?);
    }
    if eqs.is_empty() {
        return Err(Error::Parse {
            pos: 0,
            msg: "problem file contains no equations".to_string(),
        });
    }
    Ok(eqs)
}

//! The abelian-group extension: normalization modulo both group structures
//! and the gadget constructions that simulate integer arithmetic.
//!
//! Here `*` with `inv` and `1` forms one abelian group and `@` with `i()`
//! and `1` the other, on top of the exponentiation rules
//!
//! ```text
//! exp(X, 1)      -> X            exp(1, Z)     -> 1
//! exp(inv(Z), X) -> inv(exp(Z, X))
//! exp(g(X), Y)   -> g(X @ Y)
//! exp(X * Y, Z)  -> exp(X, Z) * exp(Y, Z)
//! ```
//!
//! Unification in this theory is undecidable, so this module only checks
//! witnesses: canonical forms, equality, and the multiplication/addition
//! gadgets. Products are flattened into sorted signed multisets, which is
//! exactly the normal form of the AC-convergent system.

use std::collections::BTreeMap;
use std::fmt;

use crate::term::{Subst, Term, Var};

/// Canonical form: products are flat, sorted argument lists; inverses wrap
/// only non-product atoms; the unit never appears inside a product.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ACTerm {
    One,
    Const(String),
    Var(String),
    G(Box<ACTerm>),
    /// `*`-group inverse of an atom.
    Inv(Box<ACTerm>),
    /// `@`-group inverse of an atom.
    IInv(Box<ACTerm>),
    Exp(Box<ACTerm>, Box<ACTerm>),
    /// `*` product, at least two arguments, sorted.
    Mul(Vec<ACTerm>),
    /// `@` product, at least two arguments, sorted.
    CMul(Vec<ACTerm>),
}

impl ACTerm {
    fn needs_parens_in_product(&self) -> bool {
        matches!(self, ACTerm::Mul(_) | ACTerm::CMul(_))
    }
}

impl fmt::Display for ACTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ACTerm::One => f.write_str("1"),
            ACTerm::Const(c) => f.write_str(c),
            ACTerm::Var(v) => f.write_str(v),
            ACTerm::G(a) => write!(f, "g({a})"),
            ACTerm::Inv(a) => write!(f, "inv({a})"),
            ACTerm::IInv(a) => write!(f, "i({a})"),
            ACTerm::Exp(a, b) => write!(f, "exp({a}, {b})"),
            ACTerm::Mul(args) | ACTerm::CMul(args) => {
                let sep = if matches!(self, ACTerm::Mul(_)) {
                    " * "
                } else {
                    " @ "
                };
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    if a.needs_parens_in_product() {
                        write!(f, "({a})")?;
                    } else {
                        write!(f, "{a}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Which of the two groups a product or inverse belongs to.
#[derive(Clone, Copy, PartialEq)]
enum Group {
    Star,
    CStar,
}

fn invert(g: Group, x: ACTerm) -> ACTerm {
    match x {
        ACTerm::One => ACTerm::One,
        ACTerm::Inv(y) if g == Group::Star => *y,
        ACTerm::IInv(y) if g == Group::CStar => *y,
        ACTerm::Mul(args) if g == Group::Star => {
            product(g, args.into_iter().map(|a| invert(g, a)).collect())
        }
        ACTerm::CMul(args) if g == Group::CStar => {
            product(g, args.into_iter().map(|a| invert(g, a)).collect())
        }
        x => match g {
            Group::Star => ACTerm::Inv(Box::new(x)),
            Group::CStar => ACTerm::IInv(Box::new(x)),
        },
    }
}

/// Group product: flatten, cancel each atom against its inverse, drop the
/// unit, sort. Signed exponent counting gives the abelian normal form.
fn product(g: Group, args: Vec<ACTerm>) -> ACTerm {
    let mut counts: BTreeMap<ACTerm, i64> = BTreeMap::new();
    let add = |counts: &mut BTreeMap<ACTerm, i64>, atom: ACTerm, sign: i64| {
        let n = counts.entry(atom).or_insert(0);
        *n += sign;
    };
    let mut stack = args;
    while let Some(a) = stack.pop() {
        match (g, a) {
            (_, ACTerm::One) => {}
            (Group::Star, ACTerm::Mul(inner)) | (Group::CStar, ACTerm::CMul(inner)) => {
                stack.extend(inner);
            }
            (Group::Star, ACTerm::Inv(x)) => add(&mut counts, *x, -1),
            (Group::CStar, ACTerm::IInv(x)) => add(&mut counts, *x, -1),
            (_, other) => add(&mut counts, other, 1),
        }
    }
    let mut out = Vec::new();
    for (atom, n) in counts {
        if n == 0 {
            continue;
        }
        let elem = if n > 0 {
            atom
        } else {
            match g {
                Group::Star => ACTerm::Inv(Box::new(atom)),
                Group::CStar => ACTerm::IInv(Box::new(atom)),
            }
        };
        for _ in 0..n.abs() {
            out.push(elem.clone());
        }
    }
    out.sort();
    match out.len() {
        0 => ACTerm::One,
        1 => out.pop().unwrap(),
        _ => match g {
            Group::Star => ACTerm::Mul(out),
            Group::CStar => ACTerm::CMul(out),
        },
    }
}

fn exponentiate(base: ACTerm, expo: ACTerm) -> ACTerm {
    if expo == ACTerm::One {
        return base;
    }
    match base {
        ACTerm::One => ACTerm::One,
        ACTerm::Inv(z) => invert(Group::Star, exponentiate(*z, expo)),
        ACTerm::G(x) => ACTerm::G(Box::new(product(Group::CStar, vec![*x, expo]))),
        ACTerm::Mul(args) => product(
            Group::Star,
            args.into_iter()
                .map(|a| exponentiate(a, expo.clone()))
                .collect(),
        ),
        base => ACTerm::Exp(Box::new(base), Box::new(expo)),
    }
}

/// Canonical form modulo the full rule system.
pub fn e1_normalize(t: &Term) -> ACTerm {
    match t {
        Term::Var(v) => ACTerm::Var(v.0.clone()),
        Term::Const(c) => ACTerm::Const(c.clone()),
        Term::One => ACTerm::One,
        Term::G(a) => ACTerm::G(Box::new(e1_normalize(a))),
        Term::Inv(a) => invert(Group::Star, e1_normalize(a)),
        Term::IInv(a) => invert(Group::CStar, e1_normalize(a)),
        Term::Mul(a, b) => product(Group::Star, vec![e1_normalize(a), e1_normalize(b)]),
        Term::CMul(a, b) => product(Group::CStar, vec![e1_normalize(a), e1_normalize(b)]),
        Term::Exp(a, b) => exponentiate(e1_normalize(a), e1_normalize(b)),
    }
}

/// Equality in the extended theory.
pub fn e1_equal(s: &Term, t: &Term) -> bool {
    e1_normalize(s) == e1_normalize(t)
}

/// The `@`-power of `u`: `i` copies of `u` for positive `i`, the unit for
/// zero, `|i|` copies of `i(u)` for negative `i`.
pub fn circ(u: &Term, i: i64) -> Term {
    let factor = if i < 0 {
        crate::term::iinv(u.clone())
    } else {
        u.clone()
    };
    let n = i.unsigned_abs();
    if n == 0 {
        return Term::One;
    }
    let mut acc = factor.clone();
    for _ in 1..n {
        acc = crate::term::cmul(acc, factor.clone());
    }
    acc
}

/// The implication `g(s) = g(t)  =>  s = t`, checked on normal forms.
/// Always true: `g` is a free constructor of canonical forms.
pub fn check_g_injectivity(s: &Term, t: &Term) -> bool {
    let gs = crate::term::g(s.clone());
    let gt = crate::term::g(t.clone());
    !e1_equal(&gs, &gt) || e1_equal(s, t)
}

/// Do `s`-instantiated sides of every equation share a canonical form?
pub fn check_assignment(s: &Subst, eqs: &[(Term, Term)]) -> bool {
    eqs.iter().all(|(l, r)| e1_equal(&s.apply(l), &s.apply(r)))
}

fn b() -> Term {
    crate::term::cnst("b")
}

fn c() -> Term {
    crate::term::cnst("c")
}

fn product_of(terms: impl IntoIterator<Item = Term>) -> Term {
    let mut it = terms.into_iter();
    let first = it.next().expect("empty product");
    it.fold(first, crate::term::mul)
}

/// The base equation of the solvability lemma, parameterized by `m`:
/// `x * g(y) = exp(x, b) * g(circ(b, m))`.
pub fn lemma8_equation(m: i64) -> (Term, Term) {
    use crate::term::{exp, g, mul, var};
    (
        mul(var("X"), g(var("Y"))),
        mul(exp(var("X"), b()), g(circ(&b(), m))),
    )
}

/// A solution `{X, Y}` of [`lemma8_equation`]: `Y` is the n-th `@`-power of
/// `b`, and `X` is the telescoping product of `g`-powers between `m` and
/// `n` (inverted when `n < m`, the unit when `n = m`).
pub fn lemma8_witness(n: i64, m: i64) -> Subst {
    use crate::term::g;
    let x = if n > m {
        product_of((m..n).rev().map(|k| g(circ(&b(), k))))
    } else if n < m {
        crate::term::inv(product_of((n..m).map(|k| g(circ(&b(), k)))))
    } else {
        Term::One
    };
    let mut s = Subst::new();
    s.bind(Var::new("X"), x);
    s.bind(Var::new("Y"), circ(&b(), n));
    s
}

/// The five-equation system forcing `Z2` to be the `i*j`-th `@`-power of
/// `c` (and `Z` the `i*j`-th power of `b`), together with a witness that
/// satisfies it. Variables: `W1`..`W5`, `X2`, `Z2`, `Z`.
pub fn build_mult_gadget(i: i64, j: i64) -> (Vec<(Term, Term)>, Subst) {
    use crate::term::{cmul, exp, g, mul, var};
    assert!(i >= 1 && j >= 1, "gadget requires i, j >= 1");

    let equations = vec![
        // Force X2 = circ(c, i).
        (
            mul(exp(var("W1"), c()), g(circ(&b(), i))),
            mul(exp(var("W1"), b()), g(var("X2"))),
        ),
        (
            mul(var("W2"), g(var("X2"))),
            mul(exp(var("W2"), c()), g(Term::One)),
        ),
        // Force Z2 = circ(c, i*j).
        (
            mul(exp(var("W3"), var("X2")), g(circ(&b(), j))),
            mul(exp(var("W3"), b()), g(var("Z2"))),
        ),
        (
            mul(var("W4"), g(var("Z2"))),
            mul(exp(var("W4"), c()), g(Term::One)),
        ),
        // Copy Z2 over to the b side: Z = circ(b, i*j).
        (
            mul(exp(var("W5"), c()), g(var("Z"))),
            mul(exp(var("W5"), b()), g(var("Z2"))),
        ),
    ];

    // Telescoping witnesses. For an equation exp(w, c) * g(B^n) =
    // exp(w, b) * g(C^n), the product of g(b^k @ c^(n-1-k)) works: shifting
    // every factor by c and by b respectively leaves exactly the two
    // endpoint factors uncancelled.
    let w1 = product_of((0..i).map(|k| g(cmul(circ(&b(), k), circ(&c(), i - 1 - k)))));
    let w2 = product_of((0..i).map(|k| g(circ(&c(), k))));
    let w3 = product_of((0..j).map(|k| g(cmul(circ(&b(), k), circ(&c(), (j - 1 - k) * i)))));
    let w4 = product_of((0..i * j).map(|k| g(circ(&c(), k))));
    let w5 = product_of((0..i * j).map(|k| g(cmul(circ(&b(), k), circ(&c(), i * j - 1 - k)))));

    let mut witness = Subst::new();
    witness.bind(Var::new("W1"), w1);
    witness.bind(Var::new("W2"), w2);
    witness.bind(Var::new("W3"), w3);
    witness.bind(Var::new("W4"), w4);
    witness.bind(Var::new("W5"), w5);
    witness.bind(Var::new("X2"), circ(&c(), i));
    witness.bind(Var::new("Z2"), circ(&c(), i * j));
    witness.bind(Var::new("Z"), circ(&b(), i * j));
    (equations, witness)
}

/// Addition is just the `@`-product of powers: returns the two sides of
/// `circ(b, i) @ circ(b, j) = circ(b, i + j)`.
pub fn build_add_gadget(i: i64, j: i64) -> (Term, Term) {
    let lhs = crate::term::cmul(circ(&b(), i), circ(&b(), j));
    (lhs, circ(&b(), i + j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{cnst, parse_term};

    fn norm(src: &str) -> String {
        e1_normalize(&parse_term(src).unwrap()).to_string()
    }

    #[test]
    fn cancellation() {
        assert_eq!(norm("b * inv(b)"), "1");
        assert_eq!(norm("b @ i(b)"), "1");
    }

    #[test]
    fn exp_g_rule() {
        assert_eq!(norm("exp(g(X), Y)"), "g(X @ Y)");
    }

    #[test]
    fn exp_inverse_base() {
        assert_eq!(norm("exp(inv(g(b)), c)"), "inv(g(b @ c))");
    }

    #[test]
    fn exp_units() {
        assert_eq!(norm("exp(X, 1)"), "X");
        assert_eq!(norm("exp(1, Z)"), "1");
    }

    #[test]
    fn ac_commutativity() {
        assert_eq!(norm("b @ c"), norm("c @ b"));
        assert_eq!(norm("(b * c) * d"), norm("d * (c * b)"));
    }

    #[test]
    fn unit_elimination() {
        assert_eq!(norm("b @ 1"), "b");
        assert_eq!(norm("b * 1 * 1"), "b");
        assert_eq!(norm("inv(1)"), "1");
        assert_eq!(norm("i(i(b))"), "b");
        assert_eq!(norm("inv(inv(b))"), "b");
    }

    #[test]
    fn inverse_distribution() {
        assert_eq!(norm("inv(b * c)"), norm("inv(b) * inv(c)"));
        assert_eq!(norm("i(b @ c)"), norm("i(b) @ i(c)"));
    }

    #[test]
    fn circ_examples() {
        assert_eq!(circ(&cnst("b"), 3).to_string(), "b @ b @ b");
        assert_eq!(circ(&cnst("b"), 0), Term::One);
        assert_eq!(circ(&cnst("b"), -2).to_string(), "i(b) @ i(b)");
    }

    #[test]
    fn circ_homomorphism() {
        for i in -5..=5i64 {
            for j in -5..=5i64 {
                let lhs = crate::term::cmul(circ(&b(), i), circ(&b(), j));
                assert!(
                    e1_equal(&lhs, &circ(&b(), i + j)),
                    "circ homomorphism failed at ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn g_injectivity_examples() {
        let bc = parse_term("b @ c").unwrap();
        let cb = parse_term("c @ b").unwrap();
        assert!(check_g_injectivity(&bc, &cb));
        assert!(check_g_injectivity(&cnst("b"), &cnst("c")));
        let b1 = parse_term("b @ 1").unwrap();
        assert!(check_g_injectivity(&b1, &cnst("b")));
    }

    #[test]
    fn lemma8_witness_examples() {
        // (n, m) = (1, 0): x = g(1), y = b.
        let w = lemma8_witness(1, 0);
        assert!(check_assignment(&w, &[lemma8_equation(0)]));
        assert_eq!(w.get(&Var::new("X")).unwrap().to_string(), "g(1)");
        assert_eq!(w.get(&Var::new("Y")).unwrap().to_string(), "b");

        // (n, m) = (2, 2): x = 1.
        let w = lemma8_witness(2, 2);
        assert_eq!(w.get(&Var::new("X")), Some(&Term::One));
        assert!(check_assignment(&w, &[lemma8_equation(2)]));

        // (n, m) = (0, 1): x = inv(g(1)), y = 1.
        let w = lemma8_witness(0, 1);
        assert_eq!(w.get(&Var::new("X")).unwrap().to_string(), "inv(g(1))");
        assert_eq!(w.get(&Var::new("Y")), Some(&Term::One));
        assert!(check_assignment(&w, &[lemma8_equation(1)]));
    }

    #[test]
    fn lemma8_witness_grid() {
        for n in -4..=4i64 {
            for m in -4..=4i64 {
                let w = lemma8_witness(n, m);
                assert!(
                    check_assignment(&w, &[lemma8_equation(m)]),
                    "witness failed at ({n}, {m})"
                );
            }
        }
    }

    #[test]
    fn mult_gadget_small() {
        let (eqs, w) = build_mult_gadget(1, 1);
        assert!(check_assignment(&w, &eqs));
        assert_eq!(w.get(&Var::new("X2")).unwrap().to_string(), "c");
        assert_eq!(w.get(&Var::new("Z2")).unwrap().to_string(), "c");
        assert_eq!(w.get(&Var::new("Z")).unwrap().to_string(), "b");

        let (eqs, w) = build_mult_gadget(2, 3);
        assert!(check_assignment(&w, &eqs));
        assert!(e1_equal(w.get(&Var::new("Z2")).unwrap(), &circ(&c(), 6)));

        let (eqs, w) = build_mult_gadget(1, 2);
        assert!(check_assignment(&w, &eqs));
        assert!(e1_equal(w.get(&Var::new("Z2")).unwrap(), &circ(&c(), 2)));
    }

    #[test]
    fn mult_gadget_perturbation_fails() {
        let (eqs, mut w) = build_mult_gadget(2, 2);
        w.bind(Var::new("Z2"), circ(&c(), 5));
        assert!(!check_assignment(&w, &eqs));
    }

    #[test]
    fn add_gadget() {
        let (l, r) = build_add_gadget(2, 3);
        assert!(e1_equal(&l, &r));
        let (l, r) = build_add_gadget(0, 0);
        assert!(e1_equal(&l, &r));
        let (l, r) = build_add_gadget(1, -1);
        assert!(e1_equal(&l, &r));
        assert_eq!(e1_normalize(&l), ACTerm::One);
    }

    #[test]
    fn normalize_idempotent_on_reparse() {
        // The canonical form printed and reparsed normalizes to itself.
        for src in ["exp(inv(g(b)) * c, b @ c)", "i(b @ c) @ b", "exp(b, c @ 1)"] {
            let n1 = e1_normalize(&parse_term(src).unwrap());
            let n2 = e1_normalize(&parse_term(&n1.to_string()).unwrap());
            assert_eq!(n1, n2, "not idempotent for {src}");
        }
    }
}

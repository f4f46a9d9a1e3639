//! Verification oracle for the decidable fragment.
//!
//! The two axioms, oriented left to right, give a convergent system:
//!
//! ```text
//! exp(g(X), Y)   ->  g(X @ Y)
//! exp(X * Y, Z)  ->  exp(X, Z) * exp(Y, Z)
//! ```
//!
//! The left-hand sides cannot overlap, so normal forms are unique and any
//! rewrite strategy reaches the same one. Both multiplications stay free
//! here; equality is syntactic equality of normal forms. This module knows
//! nothing about the inference engine, so its verdicts are an independent
//! check on the solver.

use rand::Rng;

use crate::error::Error;
use crate::term::{cmul, cnst, exp, g, mul, Subst, Term, Var};

/// Default cap on enumeration search nodes.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;

/// Normal form under the two oriented axioms, computed innermost.
pub fn normalize(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) | Term::One => t.clone(),
        Term::G(a) => g(normalize(a)),
        Term::Inv(a) => Term::Inv(Box::new(normalize(a))),
        Term::IInv(a) => Term::IInv(Box::new(normalize(a))),
        Term::Mul(a, b) => mul(normalize(a), normalize(b)),
        Term::CMul(a, b) => cmul(normalize(a), normalize(b)),
        Term::Exp(a, b) => {
            let base = normalize(a);
            let expo = normalize(b);
            match base {
                Term::G(x) => g(cmul(*x, expo)),
                Term::Mul(x, y) => mul(normalize(&exp(*x, expo.clone())), normalize(&exp(*y, expo))),
                _ => exp(base, expo),
            }
        }
    }
}

/// Positions (paths of child indices) of all redexes in `t`.
pub fn redex_positions(t: &Term) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn walk(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if is_redex(t) {
            out.push(path.clone());
        }
        let children: Vec<&Term> = match t {
            Term::Var(_) | Term::Const(_) | Term::One => vec![],
            Term::G(a) | Term::Inv(a) | Term::IInv(a) => vec![a],
            Term::Exp(a, b) | Term::Mul(a, b) | Term::CMul(a, b) => vec![a, b],
        };
        for (i, c) in children.into_iter().enumerate() {
            path.push(i);
            walk(c, path, out);
            path.pop();
        }
    }
    walk(t, &mut Vec::new(), &mut out);
    out
}

fn is_redex(t: &Term) -> bool {
    matches!(t, Term::Exp(b, _) if matches!(**b, Term::G(_) | Term::Mul(..)))
}

/// Contract the redex at `path`. Panics if `path` is not a redex.
pub fn rewrite_at(t: &Term, path: &[usize]) -> Term {
    if let Some((&i, rest)) = path.split_first() {
        let rebuild = |child: Term, other: Option<&Term>, idx: usize| -> Term {
            match (t, idx) {
                (Term::G(_), _) => g(child),
                (Term::Inv(_), _) => Term::Inv(Box::new(child)),
                (Term::IInv(_), _) => Term::IInv(Box::new(child)),
                (Term::Exp(..), 0) => exp(child, other.unwrap().clone()),
                (Term::Exp(..), 1) => exp(other.unwrap().clone(), child),
                (Term::Mul(..), 0) => mul(child, other.unwrap().clone()),
                (Term::Mul(..), 1) => mul(other.unwrap().clone(), child),
                (Term::CMul(..), 0) => cmul(child, other.unwrap().clone()),
                (Term::CMul(..), 1) => cmul(other.unwrap().clone(), child),
                _ => unreachable!("bad rewrite path"),
            }
        };
        match t {
            Term::G(a) | Term::Inv(a) | Term::IInv(a) => rebuild(rewrite_at(a, rest), None, i),
            Term::Exp(a, b) | Term::Mul(a, b) | Term::CMul(a, b) => {
                if i == 0 {
                    rebuild(rewrite_at(a, rest), Some(b), 0)
                } else {
                    rebuild(rewrite_at(b, rest), Some(a), 1)
                }
            }
            _ => unreachable!("bad rewrite path"),
        }
    } else {
        contract_root(t)
    }
}

fn contract_root(t: &Term) -> Term {
    match t {
        Term::Exp(b, e) => match &**b {
            Term::G(x) => g(cmul((**x).clone(), (**e).clone())),
            Term::Mul(x, y) => mul(
                exp((**x).clone(), (**e).clone()),
                exp((**y).clone(), (**e).clone()),
            ),
            _ => panic!("not a redex"),
        },
        _ => panic!("not a redex"),
    }
}

/// Normalize by repeatedly contracting a randomly chosen redex. Returns the
/// normal form and the number of steps taken.
pub fn normalize_random(t: &Term, rng: &mut impl Rng) -> (Term, usize) {
    let mut cur = t.clone();
    let mut steps = 0;
    loop {
        let redexes = redex_positions(&cur);
        if redexes.is_empty() {
            return (cur, steps);
        }
        let pick = &redexes[rng.gen_range(0..redexes.len())];
        cur = rewrite_at(&cur, pick);
        steps += 1;
    }
}

/// Termination weight: a polynomial interpretation over integers >= 2 with
/// `exp(x, y) = x^2 * y`, `g(x) = x + 1`, and both multiplications as
/// `x + y + 1`. Strictly monotone in every argument and strictly
/// decreasing on both rewrite rules, so every step shrinks the weight and
/// the step count is bounded by the initial weight's bit length times the
/// term size growth. Overflows u128 only far beyond the depths used here.
pub fn termination_weight(t: &Term) -> u128 {
    match t {
        Term::Var(_) | Term::Const(_) | Term::One => 2,
        Term::G(a) | Term::Inv(a) | Term::IInv(a) => termination_weight(a) + 1,
        Term::Exp(a, b) => {
            let wa = termination_weight(a);
            wa * wa * termination_weight(b)
        }
        Term::Mul(a, b) | Term::CMul(a, b) => {
            termination_weight(a) + termination_weight(b) + 1
        }
    }
}

/// Does `s` make every equation's two sides equal modulo the axioms?
pub fn verify_unifier(s: &Subst, eqs: &[(Term, Term)]) -> bool {
    eqs.iter()
        .all(|(l, r)| normalize(&s.apply(l)) == normalize(&s.apply(r)))
}

/// All ground terms of depth at most `d` over one free constant `a` and
/// the fragment's function symbols.
pub fn ground_terms(max_depth: usize) -> Vec<Term> {
    let mut layers: Vec<Vec<Term>> = vec![vec![cnst("a")]];
    for _ in 1..max_depth {
        let prev = layers.last().unwrap();
        let mut next = vec![cnst("a")];
        for t in prev {
            next.push(g(t.clone()));
        }
        for t1 in prev {
            for t2 in prev {
                next.push(exp(t1.clone(), t2.clone()));
                next.push(mul(t1.clone(), t2.clone()));
                next.push(cmul(t1.clone(), t2.clone()));
            }
        }
        next.sort();
        next.dedup();
        layers.push(next);
    }
    layers.pop().unwrap()
}

/// Exhaustively enumerate all substitutions into ground terms of depth at
/// most `max_depth` that unify `eqs`. Backtracking over a variable order
/// chosen so equations are checked as early as possible; `budget` caps the
/// number of assignment nodes explored.
pub fn enumerate_unifiers(
    eqs: &[(Term, Term)],
    max_depth: usize,
    budget: u64,
) -> Result<Vec<Subst>, Error> {
    let mut vars: Vec<Var> = Vec::new();
    {
        let mut seen = std::collections::BTreeSet::new();
        for (l, r) in eqs {
            l.collect_vars(&mut seen);
            r.collect_vars(&mut seen);
        }
        // Order: repeatedly take the variable whose equation is closest to
        // fully assigned, so failing equations prune early.
        let mut remaining: Vec<Var> = seen.into_iter().collect();
        let eq_vars: Vec<std::collections::BTreeSet<Var>> = eqs
            .iter()
            .map(|(l, r)| {
                let mut s = l.vars();
                s.extend(r.vars());
                s
            })
            .collect();
        while !remaining.is_empty() {
            let pick = remaining
                .iter()
                .min_by_key(|v| {
                    eq_vars
                        .iter()
                        .filter(|s| s.contains(v))
                        .map(|s| s.iter().filter(|w| remaining.contains(w)).count())
                        .min()
                        .unwrap_or(usize::MAX)
                })
                .unwrap()
                .clone();
            remaining.retain(|v| *v != pick);
            vars.push(pick);
        }
    }

    // Level after which each equation is fully assigned.
    let check_level: Vec<usize> = eqs
        .iter()
        .map(|(l, r)| {
            let mut s = l.vars();
            s.extend(r.vars());
            s.iter()
                .map(|v| vars.iter().position(|w| w == v).unwrap() + 1)
                .max()
                .unwrap_or(0)
        })
        .collect();

    let terms = ground_terms(max_depth);
    let mut out = Vec::new();
    let mut nodes: u64 = 0;
    let mut current = Subst::new();

    fn descend(
        level: usize,
        vars: &[Var],
        terms: &[Term],
        eqs: &[(Term, Term)],
        check_level: &[usize],
        current: &mut Subst,
        out: &mut Vec<Subst>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<(), Error> {
        for (eq, lvl) in eqs.iter().zip(check_level) {
            if *lvl == level && !verify_unifier(current, std::slice::from_ref(eq)) {
                return Ok(());
            }
        }
        if level == vars.len() {
            out.push(current.clone());
            return Ok(());
        }
        for t in terms {
            *nodes += 1;
            if *nodes > budget {
                return Err(Error::BudgetExceeded(budget));
            }
            current.bind(vars[level].clone(), t.clone());
            descend(
                level + 1,
                vars,
                terms,
                eqs,
                check_level,
                current,
                out,
                nodes,
                budget,
            )?;
        }
        current.0.remove(&vars[level]);
        Ok(())
    }

    descend(
        0,
        &vars,
        &terms,
        eqs,
        &check_level,
        &mut current,
        &mut out,
        &mut nodes,
        budget,
    )?;
    out.sort_by_key(|s| s.to_string());
    Ok(out)
}

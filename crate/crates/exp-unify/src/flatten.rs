//! Purification of arbitrary equations into flat form.
//!
//! A flat equation has a variable on the left and on the right either a
//! variable, a constant, or a single function symbol applied to variables.
//! Every non-variable subterm gets a fresh definitional variable,
//! outermost-first and left-to-right, so repeated runs produce identical
//! states.

use std::collections::BTreeSet;
use std::fmt;

use crate::engine::ProblemState;
use crate::error::Error;
use crate::term::{Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlatRhs {
    Var(Var),
    Const(String),
    G(Var),
    Exp(Var, Var),
    Mul(Var, Var),
    CMul(Var, Var),
}

impl FlatRhs {
    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            FlatRhs::Var(v) | FlatRhs::G(v) => {
                out.insert(v.clone());
            }
            FlatRhs::Const(_) => {}
            FlatRhs::Exp(v, w) | FlatRhs::Mul(v, w) | FlatRhs::CMul(v, w) => {
                out.insert(v.clone());
                out.insert(w.clone());
            }
        }
    }

    /// Rebuild the term this right-hand side denotes, with variables mapped
    /// through `resolve`.
    pub fn to_term(&self, resolve: impl Fn(&Var) -> Term) -> Term {
        match self {
            FlatRhs::Var(v) => resolve(v),
            FlatRhs::Const(c) => Term::Const(c.clone()),
            FlatRhs::G(v) => Term::G(Box::new(resolve(v))),
            FlatRhs::Exp(v, w) => Term::Exp(Box::new(resolve(v)), Box::new(resolve(w))),
            FlatRhs::Mul(v, w) => Term::Mul(Box::new(resolve(v)), Box::new(resolve(w))),
            FlatRhs::CMul(v, w) => Term::CMul(Box::new(resolve(v)), Box::new(resolve(w))),
        }
    }
}

impl fmt::Display for FlatRhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlatRhs::Var(v) => write!(f, "{v}"),
            FlatRhs::Const(c) => f.write_str(c),
            FlatRhs::G(v) => write!(f, "g({v})"),
            FlatRhs::Exp(v, w) => write!(f, "exp({v}, {w})"),
            FlatRhs::Mul(v, w) => write!(f, "{v} * {w}"),
            FlatRhs::CMul(v, w) => write!(f, "{v} @ {w}"),
        }
    }
}

/// A flat equation `lhs =? rhs`. Cold storage ("marked") is membership in
/// [`ProblemState::cold`] rather than a flag on the equation itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlatEq {
    pub lhs: Var,
    pub rhs: FlatRhs,
}

impl FlatEq {
    pub fn var_var(lhs: Var, rhs: Var) -> Self {
        FlatEq {
            lhs,
            rhs: FlatRhs::Var(rhs),
        }
    }
}

impl fmt::Display for FlatEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =? {}", self.lhs, self.rhs)
    }
}

/// Parse a flat equation from text, panicking on anything non-flat.
/// Test and documentation helper.
pub fn flat_eq(src: &str) -> FlatEq {
    let (lhs, rhs) = crate::term::parse_equation(src).expect("flat_eq: parse error");
    let Term::Var(lhs) = lhs else {
        panic!("flat_eq: left side must be a variable: {src}");
    };
    let as_var = |t: &Term| match t {
        Term::Var(v) => v.clone(),
        _ => panic!("flat_eq: arguments must be variables: {src}"),
    };
    let rhs = match &rhs {
        Term::Var(v) => FlatRhs::Var(v.clone()),
        Term::Const(c) => FlatRhs::Const(c.clone()),
        Term::G(a) => FlatRhs::G(as_var(a)),
        Term::Exp(a, b) => FlatRhs::Exp(as_var(a), as_var(b)),
        Term::Mul(a, b) => FlatRhs::Mul(as_var(a), as_var(b)),
        Term::CMul(a, b) => FlatRhs::CMul(as_var(a), as_var(b)),
        _ => panic!("flat_eq: not a flat right-hand side: {src}"),
    };
    FlatEq { lhs, rhs }
}

/// Flatten a list of term equations into a fresh [`ProblemState`].
///
/// Constants are admitted and flattened to definitional equations
/// `U =? c`; the group-only symbols `inv`, `i`, `1` are rejected.
/// The fuel budget is set from the flattened equation count.
pub fn flatten_problem(eqs: &[(Term, Term)]) -> Result<ProblemState, Error> {
    for (s, t) in eqs {
        if let Some(sym) = s.group_only_symbol().or_else(|| t.group_only_symbol()) {
            return Err(Error::GroupSymbolInDecidableFragment(sym));
        }
    }
    let mut st = ProblemState::new();
    for (s, t) in eqs {
        s.collect_vars(&mut st.original_vars);
        t.collect_vars(&mut st.original_vars);
    }
    for (s, t) in eqs {
        match (s, t) {
            (Term::Var(x), Term::Var(y)) => st.push_active(FlatEq::var_var(x.clone(), y.clone())),
            (Term::Var(x), t) => flatten_into(&mut st, x.clone(), t),
            (s, Term::Var(y)) => flatten_into(&mut st, y.clone(), s),
            (s, t) => {
                let u = st.fresh_var();
                flatten_into(&mut st, u.clone(), s);
                flatten_into(&mut st, u, t);
            }
        }
    }
    st.fuel = 10 * st.active.len() * st.active.len() + 1000;
    Ok(st)
}

/// Emit `lhs =? root(args)` first, then recurse into non-variable
/// arguments, so fresh names read outermost-first, left-to-right.
fn flatten_into(st: &mut ProblemState, lhs: Var, t: &Term) {
    match t {
        Term::Var(v) => st.push_active(FlatEq::var_var(lhs, v.clone())),
        Term::Const(c) => st.push_active(FlatEq {
            lhs,
            rhs: FlatRhs::Const(c.clone()),
        }),
        Term::G(a) => {
            let (va, def) = arg_var(st, a);
            st.push_active(FlatEq {
                lhs,
                rhs: FlatRhs::G(va),
            });
            if let Some((v, sub)) = def {
                flatten_into(st, v, sub);
            }
        }
        Term::Exp(a, b) | Term::Mul(a, b) | Term::CMul(a, b) => {
            let (va, def_a) = arg_var(st, a);
            let (vb, def_b) = arg_var(st, b);
            let rhs = match t {
                Term::Exp(..) => FlatRhs::Exp(va, vb),
                Term::Mul(..) => FlatRhs::Mul(va, vb),
                Term::CMul(..) => FlatRhs::CMul(va, vb),
                _ => unreachable!(),
            };
            st.push_active(FlatEq { lhs, rhs });
            if let Some((v, sub)) = def_a {
                flatten_into(st, v, sub);
            }
            if let Some((v, sub)) = def_b {
                flatten_into(st, v, sub);
            }
        }
        Term::One | Term::Inv(_) | Term::IInv(_) => {
            unreachable!("group-only symbols are rejected before flattening")
        }
    }
}

/// Variable standing for an argument: the variable itself, or a fresh one
/// plus the pending definition to flatten.
fn arg_var<'t>(st: &mut ProblemState, t: &'t Term) -> (Var, Option<(Var, &'t Term)>) {
    match t {
        Term::Var(v) => (v.clone(), None),
        _ => {
            let u = st.fresh_var();
            (u.clone(), Some((u, t)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{cnst, exp, g, iinv, mul, parse_term, var};

    fn strs(st: &ProblemState) -> Vec<String> {
        st.active.iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn flatten_exp_g_example() {
        let st = flatten_problem(&[(exp(g(var("A")), var("B")), g(var("C")))]).unwrap();
        assert_eq!(
            strs(&st),
            vec!["_v0 =? exp(_v1, B)", "_v1 =? g(A)", "_v0 =? g(C)"]
        );
    }

    #[test]
    fn flatten_var_var() {
        let st = flatten_problem(&[(var("X"), var("Y"))]).unwrap();
        assert_eq!(strs(&st), vec!["X =? Y"]);
    }

    #[test]
    fn flatten_mul_example() {
        let st = flatten_problem(&[(
            exp(mul(var("A"), var("B")), var("W")),
            mul(var("X"), var("Y")),
        )])
        .unwrap();
        assert_eq!(
            strs(&st),
            vec!["_v0 =? exp(_v1, W)", "_v1 =? A * B", "_v0 =? X * Y"]
        );
    }

    #[test]
    fn flatten_constants() {
        let st = flatten_problem(&[(parse_term("g(b @ c)").unwrap(), var("X"))]).unwrap();
        assert_eq!(
            strs(&st),
            vec!["X =? g(_v0)", "_v0 =? _v1 @ _v2", "_v1 =? b", "_v2 =? c"]
        );
    }

    #[test]
    fn flatten_rejects_group_symbols() {
        let err = flatten_problem(&[(iinv(cnst("b")), var("X"))]).unwrap_err();
        assert!(matches!(err, Error::GroupSymbolInDecidableFragment("i")));
    }

    #[test]
    fn unflatten_reproduces_input() {
        // Substituting definitional equations back gives the original
        // equation up to the shared fresh top variable.
        let input = (exp(g(var("A")), var("B")), g(var("C")));
        let st = flatten_problem(&[input.clone()]).unwrap();
        let defs: std::collections::BTreeMap<Var, FlatRhs> = st
            .active
            .iter()
            .map(|e| (e.lhs.clone(), e.rhs.clone()))
            .collect();
        fn resolve(defs: &std::collections::BTreeMap<Var, FlatRhs>, v: &Var) -> Term {
            match defs.get(v) {
                Some(rhs) if v.is_fresh() => rhs.to_term(|w| resolve(defs, w)),
                _ => Term::Var(v.clone()),
            }
        }
        // _v0 is defined twice (once per side); collect both.
        let top = Var::new("_v0");
        let sides: Vec<Term> = st
            .active
            .iter()
            .filter(|e| e.lhs == top)
            .map(|e| e.rhs.to_term(|w| resolve(&defs, w)))
            .collect();
        assert!(sides.contains(&input.0) || sides.contains(&input.1));
    }
}

//! The inference rules (a)-(g) and the state they operate on.
//!
//! Rules (a)-(e) are the eager layer: variable elimination and merging of
//! equations that define the same variable with the same root symbol.
//! Rules (f) and (g) resolve the two peak shapes (`exp` against `g`,
//! `exp` against `*`) and fire only on a reduced, failure-free state.
//! Equations consumed by a rule are kept in cold storage: they no longer
//! trigger rules but still contribute edges to the failure graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::Error;
use crate::flatten::{FlatEq, FlatRhs};
use crate::term::{Var, FRESH_PREFIX};

/// One rule application, for `--trace`.
#[derive(Debug, Clone)]
pub struct TraceEvent {
    pub rule: &'static str,
    pub consumed: Vec<String>,
    pub produced: Vec<String>,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: [{}] => [{}]",
            self.rule,
            self.consumed.join(", "),
            self.produced.join(", ")
        )
    }
}

/// Working state of the solver: active equations drive the rules, cold
/// equations are consumed-but-retained, aliases record rule (a)
/// eliminations.
#[derive(Debug, Clone)]
pub struct ProblemState {
    pub active: Vec<FlatEq>,
    pub cold: Vec<FlatEq>,
    /// Eliminated variable -> live representative. Chains are collapsed on
    /// insertion, so every value is a live variable.
    pub aliases: BTreeMap<Var, Var>,
    pub fresh_counter: usize,
    /// Budget on (f)/(g) applications. The termination theorem guarantees
    /// it is never exhausted; running out signals a bug.
    pub fuel: usize,
    pub fuel_spent: usize,
    pub original_vars: BTreeSet<Var>,
    pub rule_counts: BTreeMap<&'static str, u64>,
    pub trace: Vec<TraceEvent>,
    pub trace_enabled: bool,
}

impl ProblemState {
    pub fn new() -> Self {
        ProblemState {
            active: Vec::new(),
            cold: Vec::new(),
            aliases: BTreeMap::new(),
            fresh_counter: 0,
            fuel: 1000,
            fuel_spent: 0,
            original_vars: BTreeSet::new(),
            rule_counts: BTreeMap::new(),
            trace: Vec::new(),
            trace_enabled: false,
        }
    }

    /// A variable not occurring anywhere in the state. The parser rejects
    /// the `_v` namespace, so a counter suffices.
    pub fn fresh_var(&mut self) -> Var {
        let v = Var::new(format!("{FRESH_PREFIX}{}", self.fresh_counter));
        self.fresh_counter += 1;
        v
    }

    /// Append an equation unless it is trivial (`V = V`) or already active.
    pub fn push_active(&mut self, eq: FlatEq) {
        if let FlatRhs::Var(v) = &eq.rhs {
            if *v == eq.lhs {
                return;
            }
        }
        if !self.active.contains(&eq) {
            self.active.push(eq);
        }
    }

    pub fn push_cold(&mut self, eq: FlatEq) {
        if !self.cold.contains(&eq) {
            self.cold.push(eq);
        }
    }

    /// All equations, active first, then cold. Graphs are built over both.
    pub fn all_equations(&self) -> impl Iterator<Item = &FlatEq> {
        self.active.iter().chain(self.cold.iter())
    }

    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for eq in self.all_equations() {
            out.insert(eq.lhs.clone());
            eq.rhs.collect_vars(&mut out);
        }
        for (a, b) in &self.aliases {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        out
    }

    fn record(&mut self, rule: &'static str, consumed: Vec<String>, produced: Vec<String>) {
        *self.rule_counts.entry(rule).or_insert(0) += 1;
        if self.trace_enabled {
            self.trace.push(TraceEvent {
                rule,
                consumed,
                produced,
            });
        }
    }
}

impl Default for ProblemState {
    fn default() -> Self {
        Self::new()
    }
}

/// Orientation for rule (a): a generated variable is always eliminated in
/// favor of a parsed one; between two parsed (or two generated) names the
/// lexicographically larger one goes.
fn orient(a: &Var, b: &Var) -> (Var, Var) {
    match (a.is_fresh(), b.is_fresh()) {
        (true, false) => (a.clone(), b.clone()),
        (false, true) => (b.clone(), a.clone()),
        _ => {
            if a > b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            }
        }
    }
}

fn rename_in_eq(eq: &FlatEq, from: &Var, to: &Var) -> FlatEq {
    let sub = |v: &Var| if v == from { to.clone() } else { v.clone() };
    FlatEq {
        lhs: sub(&eq.lhs),
        rhs: match &eq.rhs {
            FlatRhs::Var(v) => FlatRhs::Var(sub(v)),
            FlatRhs::Const(c) => FlatRhs::Const(c.clone()),
            FlatRhs::G(v) => FlatRhs::G(sub(v)),
            FlatRhs::Exp(v, w) => FlatRhs::Exp(sub(v), sub(w)),
            FlatRhs::Mul(v, w) => FlatRhs::Mul(sub(v), sub(w)),
            FlatRhs::CMul(v, w) => FlatRhs::CMul(sub(v), sub(w)),
        },
    }
}

/// Rename `from` to `to` in a list, dropping equations that become trivial
/// or duplicate earlier ones.
fn rename_in_list(list: &mut Vec<FlatEq>, from: &Var, to: &Var) {
    let mut out: Vec<FlatEq> = Vec::with_capacity(list.len());
    for eq in list.iter() {
        let eq = rename_in_eq(eq, from, to);
        if let FlatRhs::Var(v) = &eq.rhs {
            if *v == eq.lhs {
                continue;
            }
        }
        if !out.contains(&eq) {
            out.push(eq);
        }
    }
    *list = out;
}

/// Index of the first active variable-variable equation, if any.
fn find_var_elim(st: &ProblemState) -> Option<usize> {
    st.active
        .iter()
        .position(|eq| matches!(eq.rhs, FlatRhs::Var(_)))
}

/// First mergeable pair `(i, j)` with `i < j`: same left-hand variable and
/// the same root among `exp`, `g`, `*`, `@`, or syntactically equal
/// duplicates (including duplicate constants).
fn find_merge(st: &ProblemState) -> Option<(usize, usize)> {
    for i in 0..st.active.len() {
        for j in i + 1..st.active.len() {
            let (a, b) = (&st.active[i], &st.active[j]);
            if a.lhs != b.lhs {
                continue;
            }
            if a == b {
                return Some((i, j));
            }
            let same_root = matches!(
                (&a.rhs, &b.rhs),
                (FlatRhs::Exp(..), FlatRhs::Exp(..))
                    | (FlatRhs::G(..), FlatRhs::G(..))
                    | (FlatRhs::Mul(..), FlatRhs::Mul(..))
                    | (FlatRhs::CMul(..), FlatRhs::CMul(..))
            );
            if same_root {
                return Some((i, j));
            }
        }
    }
    None
}

/// Rule (a): eliminate one variable-variable equation. Substitutes into
/// active and cold storage alike, so cold equations stay alias-consistent.
pub fn apply_var_elim(st: &mut ProblemState) -> bool {
    let Some(idx) = find_var_elim(st) else {
        return false;
    };
    let eq = st.active.remove(idx);
    let FlatRhs::Var(rhs) = &eq.rhs else {
        unreachable!()
    };
    if eq.lhs == *rhs {
        st.record("a", vec![eq.to_string()], vec![]);
        return true;
    }
    let (gone, kept) = orient(&eq.lhs, rhs);
    rename_in_list(&mut st.active, &gone, &kept);
    rename_in_list(&mut st.cold, &gone, &kept);
    // Redirect aliases already pointing at the eliminated variable.
    for tgt in st.aliases.values_mut() {
        if *tgt == gone {
            *tgt = kept.clone();
        }
    }
    st.aliases.insert(gone.clone(), kept.clone());
    st.record(
        "a",
        vec![eq.to_string()],
        vec![format!("alias {gone} -> {kept}")],
    );
    true
}

/// Rules (b)-(e): merge two active equations with the same left-hand
/// variable and root. The later-created equation moves to cold storage and
/// the argument equations are added.
pub fn apply_merge(st: &mut ProblemState) -> bool {
    let Some((i, j)) = find_merge(st) else {
        return false;
    };
    let second = st.active.remove(j);
    let first = st.active[i].clone();
    if first == second {
        st.record("dedup", vec![second.to_string()], vec![]);
        return true;
    }
    let (rule, args): (&'static str, Vec<FlatEq>) = match (&first.rhs, &second.rhs) {
        (FlatRhs::Mul(v, w), FlatRhs::Mul(x, y)) => (
            "b",
            vec![FlatEq::var_var(v.clone(), x.clone()), FlatEq::var_var(w.clone(), y.clone())],
        ),
        (FlatRhs::CMul(v, w), FlatRhs::CMul(x, y)) => (
            "c",
            vec![FlatEq::var_var(v.clone(), x.clone()), FlatEq::var_var(w.clone(), y.clone())],
        ),
        (FlatRhs::Exp(v, w), FlatRhs::Exp(x, y)) => (
            "d",
            vec![FlatEq::var_var(v.clone(), x.clone()), FlatEq::var_var(w.clone(), y.clone())],
        ),
        (FlatRhs::G(v), FlatRhs::G(w)) => ("e", vec![FlatEq::var_var(v.clone(), w.clone())]),
        _ => unreachable!("find_merge returned a non-mergeable pair"),
    };
    let produced: Vec<String> = args.iter().map(|e| e.to_string()).collect();
    for eq in args {
        st.push_active(eq);
    }
    st.push_cold(second.clone());
    st.record(rule, vec![second.to_string()], produced);
    true
}

/// True when none of rules (a)-(e) applies.
pub fn is_reduced(st: &ProblemState) -> bool {
    find_var_elim(st).is_none() && find_merge(st).is_none()
}

/// Rules (a)-(e) to fixpoint; (a) eagerly first.
pub fn saturate_a_to_e(st: &mut ProblemState) {
    loop {
        if apply_var_elim(st) {
            continue;
        }
        if apply_merge(st) {
            continue;
        }
        break;
    }
}

/// Variables defined by an active `exp` equation and an active `g`
/// equation: the candidates for rule (f), in name order.
pub fn f_peaks(st: &ProblemState) -> Vec<Var> {
    peaks(st, |rhs| matches!(rhs, FlatRhs::G(_)))
}

/// Variables defined by an active `exp` equation and an active `*`
/// equation: the candidates for rule (g), in name order.
pub fn g_peaks(st: &ProblemState) -> Vec<Var> {
    peaks(st, |rhs| matches!(rhs, FlatRhs::Mul(..)))
}

fn peaks(st: &ProblemState, other: impl Fn(&FlatRhs) -> bool) -> Vec<Var> {
    let mut exp_defs = BTreeSet::new();
    let mut other_defs = BTreeSet::new();
    for eq in &st.active {
        if matches!(eq.rhs, FlatRhs::Exp(..)) {
            exp_defs.insert(eq.lhs.clone());
        } else if other(&eq.rhs) {
            other_defs.insert(eq.lhs.clone());
        }
    }
    exp_defs.intersection(&other_defs).cloned().collect()
}

fn spend_fuel(st: &mut ProblemState) -> Result<(), Error> {
    if st.fuel == 0 {
        return Err(Error::FuelExhausted(st.fuel_spent));
    }
    st.fuel -= 1;
    st.fuel_spent += 1;
    Ok(())
}

/// Rule (f): on a reduced state with `U = exp(V, W)` and `U = g(X)` active,
/// move the exp equation to cold and add `V = g(V')`, `X = V' @ W` with a
/// fresh `V'`. Returns false if the state is not reduced or has no (f)-peak.
pub fn apply_f(st: &mut ProblemState) -> Result<bool, Error> {
    if !is_reduced(st) {
        return Ok(false);
    }
    let Some(u) = f_peaks(st).into_iter().next() else {
        return Ok(false);
    };
    spend_fuel(st)?;
    let idx = st
        .active
        .iter()
        .position(|eq| eq.lhs == u && matches!(eq.rhs, FlatRhs::Exp(..)))
        .unwrap();
    let exp_eq = st.active.remove(idx);
    let FlatRhs::Exp(v, w) = exp_eq.rhs.clone() else {
        unreachable!()
    };
    let x = st
        .active
        .iter()
        .find_map(|eq| match (&eq.lhs, &eq.rhs) {
            (lhs, FlatRhs::G(x)) if *lhs == u => Some(x.clone()),
            _ => None,
        })
        .unwrap();
    let v_prime = st.fresh_var();
    let e1 = FlatEq {
        lhs: v.clone(),
        rhs: FlatRhs::G(v_prime.clone()),
    };
    let e2 = FlatEq {
        lhs: x,
        rhs: FlatRhs::CMul(v_prime, w),
    };
    let produced = vec![e1.to_string(), e2.to_string()];
    st.push_active(e1);
    st.push_active(e2);
    st.push_cold(exp_eq.clone());
    st.record("f", vec![exp_eq.to_string()], produced);
    Ok(true)
}

/// Rule (g): on a reduced state with `U = exp(V, W)` and `U = X * Y`
/// active, move the exp equation to cold and add `V = V1 * V2`,
/// `X = exp(V1, W)`, `Y = exp(V2, W)` with fresh `V1`, `V2`.
pub fn apply_g(st: &mut ProblemState) -> Result<bool, Error> {
    if !is_reduced(st) {
        return Ok(false);
    }
    let Some(u) = g_peaks(st).into_iter().next() else {
        return Ok(false);
    };
    spend_fuel(st)?;
    let idx = st
        .active
        .iter()
        .position(|eq| eq.lhs == u && matches!(eq.rhs, FlatRhs::Exp(..)))
        .unwrap();
    let exp_eq = st.active.remove(idx);
    let FlatRhs::Exp(v, w) = exp_eq.rhs.clone() else {
        unreachable!()
    };
    let (x, y) = st
        .active
        .iter()
        .find_map(|eq| match (&eq.lhs, &eq.rhs) {
            (lhs, FlatRhs::Mul(x, y)) if *lhs == u => Some((x.clone(), y.clone())),
            _ => None,
        })
        .unwrap();
    let v1 = st.fresh_var();
    let v2 = st.fresh_var();
    let e1 = FlatEq {
        lhs: v,
        rhs: FlatRhs::Mul(v1.clone(), v2.clone()),
    };
    let e2 = FlatEq {
        lhs: x,
        rhs: FlatRhs::Exp(v1, w.clone()),
    };
    let e3 = FlatEq {
        lhs: y,
        rhs: FlatRhs::Exp(v2, w),
    };
    let produced = vec![e1.to_string(), e2.to_string(), e3.to_string()];
    st.push_active(e1);
    st.push_active(e2);
    st.push_active(e3);
    st.push_cold(exp_eq.clone());
    st.record("g", vec![exp_eq.to_string()], produced);
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::flat_eq;

    fn state_of(eqs: &[&str]) -> ProblemState {
        let mut st = ProblemState::new();
        for e in eqs {
            st.push_active(flat_eq(e));
        }
        st.original_vars = st.all_vars();
        st
    }

    #[test]
    fn var_elim_substitutes_everywhere() {
        let mut st = state_of(&["U =? V", "U =? g(X)"]);
        assert!(apply_var_elim(&mut st));
        // U > V lexicographically is false ("U" < "V"), so V is eliminated.
        assert_eq!(st.aliases.len(), 1);
        assert_eq!(st.active.len(), 1);
        let kept = st.active[0].to_string();
        assert!(kept == "U =? g(X)" || kept == "V =? g(X)");
        // The alias target is the kept variable.
        let (gone, kept_var) = st.aliases.iter().next().unwrap();
        assert_eq!(st.active[0].lhs, *kept_var);
        assert_ne!(st.active[0].lhs, *gone);
    }

    #[test]
    fn var_elim_records_alias_even_when_var_unused() {
        let mut st = state_of(&["U =? V"]);
        assert!(apply_var_elim(&mut st));
        assert!(st.active.is_empty());
        assert_eq!(st.aliases.len(), 1);
    }

    #[test]
    fn var_elim_drops_reflexive() {
        let mut st = state_of(&["U =? g(X)"]);
        st.active.push(flat_eq("U =? U"));
        assert!(apply_var_elim(&mut st));
        assert!(st.aliases.is_empty());
        assert_eq!(st.active.len(), 1);
    }

    #[test]
    fn var_elim_prefers_parsed_over_fresh() {
        let mut st = state_of(&["A =? g(X)"]);
        let f = st.fresh_var();
        st.push_active(FlatEq::var_var(f.clone(), Var::new("A")));
        assert!(apply_var_elim(&mut st));
        assert_eq!(st.aliases.get(&f), Some(&Var::new("A")));
    }

    #[test]
    fn merge_exp_rule_d() {
        let mut st = state_of(&["U =? exp(V, W)", "U =? exp(X, Y)"]);
        assert!(apply_merge(&mut st));
        assert_eq!(st.cold.len(), 1);
        assert_eq!(st.cold[0].to_string(), "U =? exp(X, Y)");
        let strs: Vec<String> = st.active.iter().map(|e| e.to_string()).collect();
        assert_eq!(strs, vec!["U =? exp(V, W)", "V =? X", "W =? Y"]);
    }

    #[test]
    fn merge_g_rule_e() {
        let mut st = state_of(&["U =? g(V)", "U =? g(W)"]);
        assert!(apply_merge(&mut st));
        let strs: Vec<String> = st.active.iter().map(|e| e.to_string()).collect();
        assert_eq!(strs, vec!["U =? g(V)", "V =? W"]);
        assert_eq!(st.cold[0].to_string(), "U =? g(W)");
    }

    #[test]
    fn merge_drops_exact_duplicate() {
        let mut st = state_of(&["U =? X * Y"]);
        st.active.push(flat_eq("U =? X * Y"));
        assert!(apply_merge(&mut st));
        assert_eq!(st.active.len(), 1);
        assert!(st.cold.is_empty());
    }

    #[test]
    fn rule_f_shape() {
        let mut st = state_of(&["U =? exp(V, W)", "U =? g(X)"]);
        assert!(apply_f(&mut st).unwrap());
        let strs: Vec<String> = st.active.iter().map(|e| e.to_string()).collect();
        assert_eq!(strs, vec!["U =? g(X)", "V =? g(_v0)", "X =? _v0 @ W"]);
        assert_eq!(st.cold[0].to_string(), "U =? exp(V, W)");
    }

    #[test]
    fn rule_f_respects_priority() {
        // A merge is applicable, so (f) must refuse to fire.
        let mut st = state_of(&["U =? exp(V, W)", "U =? g(X)", "U =? g(Y)"]);
        assert!(!apply_f(&mut st).unwrap());
    }

    #[test]
    fn rule_f_no_peak() {
        let mut st = state_of(&["U =? exp(V, W)"]);
        assert!(!apply_f(&mut st).unwrap());
    }

    #[test]
    fn rule_g_shape() {
        let mut st = state_of(&["U =? exp(V, W)", "U =? X * Y"]);
        assert!(apply_g(&mut st).unwrap());
        let strs: Vec<String> = st.active.iter().map(|e| e.to_string()).collect();
        assert_eq!(
            strs,
            vec![
                "U =? X * Y",
                "V =? _v0 * _v1",
                "X =? exp(_v0, W)",
                "Y =? exp(_v1, W)"
            ]
        );
        assert_eq!(st.cold[0].to_string(), "U =? exp(V, W)");
    }

    #[test]
    fn saturate_example() {
        let mut st = state_of(&["U =? V", "V =? g(X)", "U =? g(Y)"]);
        saturate_a_to_e(&mut st);
        assert!(is_reduced(&st));
        // One g-definition remains active and X/Y are identified.
        let g_defs = st
            .active
            .iter()
            .filter(|e| matches!(e.rhs, FlatRhs::G(_)))
            .count();
        assert_eq!(g_defs, 1);
        assert!(st.aliases.contains_key(&Var::new("Y")) || st.aliases.contains_key(&Var::new("X")));
    }

    #[test]
    fn saturate_idempotent_on_reduced() {
        let mut st = state_of(&["U =? g(X)"]);
        let before = st.active.clone();
        saturate_a_to_e(&mut st);
        assert_eq!(st.active, before);

        let mut empty = ProblemState::new();
        saturate_a_to_e(&mut empty);
        assert!(empty.active.is_empty());
    }

    #[test]
    fn is_reduced_examples() {
        assert!(is_reduced(&state_of(&["U =? g(X)"])));
        assert!(!is_reduced(&state_of(&["U =? g(X)", "U =? g(Y)"])));
        // Only rule (g) applies here, so the state is reduced.
        assert!(is_reduced(&state_of(&["U =? exp(V, W)", "U =? X * Y"])));
    }

    #[test]
    fn rule_f_decreases_active_exp_count() {
        let mut st = state_of(&["U =? exp(V, W)", "U =? g(X)"]);
        let count = |st: &ProblemState| {
            st.active
                .iter()
                .filter(|e| matches!(e.rhs, FlatRhs::Exp(..)))
                .count()
        };
        let before = count(&st);
        apply_f(&mut st).unwrap();
        assert!(count(&st) < before);
    }
}

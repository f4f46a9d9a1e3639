//! The main solving loop and unifier extraction.
//!
//! Each iteration rebuilds the failure graphs from scratch, fails fast on
//! any cycle or clash, saturates the eager rules, and only then fires one
//! peak rule, (f) before (g). A state where nothing applies and nothing
//! fails is terminal and yields a unifier.

use std::collections::{BTreeMap, BTreeSet};

use crate::engine::{
    self, apply_f, apply_g, is_reduced, saturate_a_to_e, ProblemState,
};
use crate::error::Error;
use crate::flatten::{flatten_problem, FlatRhs};
use crate::graphs::{
    build_d, build_p, check_gm_clash, check_root_clashes, find_d_cycle, find_p_cycle, FailCode,
    FailReason,
};
use crate::term::{Subst, Term, Var};

#[derive(Debug, Clone, Default)]
pub struct Stats {
    pub iterations: u64,
    pub rule_counts: BTreeMap<String, u64>,
    pub peak_equation_count: usize,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Unifiable {
        /// Restricted to the input's variables, identities dropped.
        unifier: Subst,
        /// Every binding, generated variables included; this is what the
        /// rewrite oracle checks.
        full: Subst,
        /// Generated variables left unbound: the solution's degrees of
        /// freedom.
        free_parameters: Vec<Var>,
    },
    Fail(FailReason),
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub outcome: Outcome,
    pub stats: Stats,
}

impl Verdict {
    pub fn is_unifiable(&self) -> bool {
        matches!(self.outcome, Outcome::Unifiable { .. })
    }

    pub fn fail_code(&self) -> Option<FailCode> {
        match &self.outcome {
            Outcome::Fail(r) => Some(r.code),
            _ => None,
        }
    }
}

/// Solve a list of term equations in the decidable fragment.
pub fn solve(eqs: &[(Term, Term)]) -> Result<Verdict, Error> {
    let st = flatten_problem(eqs)?;
    resume(st).map(|(v, _)| v)
}

/// Solve and keep the terminal state, for trace and graph output.
pub fn solve_detailed(eqs: &[(Term, Term)], trace: bool) -> Result<(Verdict, ProblemState), Error> {
    let mut st = flatten_problem(eqs)?;
    st.trace_enabled = trace;
    resume(st)
}

/// Run the loop on an existing state until success or failure.
pub fn resume(mut st: ProblemState) -> Result<(Verdict, ProblemState), Error> {
    let mut stats = Stats::default();
    let fail = |code: FailCode, witness: String, stats: Stats, st: ProblemState| {
        Ok((
            Verdict {
                outcome: Outcome::Fail(FailReason { code, witness }),
                stats,
            },
            st,
        ))
    };
    loop {
        stats.iterations += 1;
        stats.peak_equation_count = stats
            .peak_equation_count
            .max(st.active.len() + st.cold.len());

        let d = build_d(&st);
        if let Some(cycle) = find_d_cycle(&d) {
            return fail(FailCode::DCycle, format!("cycle: {}", cycle.join(" -> ")), stats, st);
        }
        let p = build_p(&st);
        if let Some(cycle) = find_p_cycle(&p) {
            let labels: Vec<String> = cycle.iter().map(|&c| p.class_label(c)).collect();
            return fail(FailCode::PCycle, format!("cycle: {}", labels.join(" -> ")), stats, st);
        }
        if let Some(r) = check_root_clashes(&st) {
            return fail(r.code, r.witness, stats, st);
        }
        if let Some(r) = check_gm_clash(&st) {
            return fail(r.code, r.witness, stats, st);
        }

        if !is_reduced(&st) {
            saturate_a_to_e(&mut st);
            continue;
        }
        if apply_f(&mut st)? {
            continue;
        }
        if apply_g(&mut st)? {
            continue;
        }
        break;
    }
    for (rule, n) in &st.rule_counts {
        stats.rule_counts.insert(rule.to_string(), *n);
    }
    let (full, unifier, free_parameters) = extract_unifier(&st)?;
    Ok((
        Verdict {
            outcome: Outcome::Unifiable {
                unifier,
                full,
                free_parameters,
            },
            stats,
        },
        st,
    ))
}

/// Extract the unifier from a terminal state: substitute definitional
/// equations bottom-up over the (acyclic) dependency order and compose the
/// alias map in. Returns (full, restricted-to-originals, free parameters).
pub fn extract_unifier(st: &ProblemState) -> Result<(Subst, Subst, Vec<Var>), Error> {
    let mut defs: BTreeMap<&Var, &FlatRhs> = BTreeMap::new();
    for eq in &st.active {
        // A terminal state has at most one active definition per variable.
        defs.entry(&eq.lhs).or_insert(&eq.rhs);
    }

    struct Resolver<'a> {
        defs: &'a BTreeMap<&'a Var, &'a FlatRhs>,
        memo: BTreeMap<Var, Term>,
        in_progress: BTreeSet<Var>,
    }
    impl Resolver<'_> {
        fn resolve(&mut self, v: &Var) -> Result<Term, Error> {
            if let Some(t) = self.memo.get(v) {
                return Ok(t.clone());
            }
            if !self.in_progress.insert(v.clone()) {
                return Err(Error::InternalNonDag);
            }
            let t = match self.defs.get(v) {
                None => Term::Var(v.clone()),
                Some(rhs) => {
                    let rhs = (*rhs).clone();
                    let mut sub = |w: &Var| self.resolve(w);
                    match &rhs {
                        FlatRhs::Var(w) => sub(w)?,
                        FlatRhs::Const(c) => Term::Const(c.clone()),
                        FlatRhs::G(w) => crate::term::g(sub(w)?),
                        FlatRhs::Exp(a, b) => crate::term::exp(sub(a)?, sub(b)?),
                        FlatRhs::Mul(a, b) => crate::term::mul(sub(a)?, sub(b)?),
                        FlatRhs::CMul(a, b) => crate::term::cmul(sub(a)?, sub(b)?),
                    }
                }
            };
            self.in_progress.remove(v);
            self.memo.insert(v.clone(), t.clone());
            Ok(t)
        }
    }
    let mut r = Resolver {
        defs: &defs,
        memo: BTreeMap::new(),
        in_progress: BTreeSet::new(),
    };

    let mut full = Subst::new();
    for v in defs.keys() {
        let t = r.resolve(v)?;
        full.bind((*v).clone(), t);
    }
    for (gone, kept) in &st.aliases {
        let t = r.resolve(kept)?;
        full.bind(gone.clone(), t);
    }

    let mut restricted = Subst::new();
    for (v, t) in full.iter() {
        if st.original_vars.contains(v) && *t != Term::Var(v.clone()) {
            restricted.bind(v.clone(), t.clone());
        }
    }

    let mut free = BTreeSet::new();
    for (_, t) in restricted.iter() {
        for v in t.vars() {
            if v.is_fresh() && full.get(&v).is_none() {
                free.insert(v);
            }
        }
    }
    Ok((full, restricted, free.into_iter().collect()))
}

/// Convenience: does the solver consider these equations unifiable?
pub fn unifiable(eqs: &[(Term, Term)]) -> Result<bool, Error> {
    Ok(solve(eqs)?.is_unifiable())
}

#[allow(unused_imports)]
pub use engine::TraceEvent;

//! Seeded random problem generation, for the fuzz command and the
//! termination suite.

use rand::Rng;

use crate::term::{cmul, cnst, exp, g, mul, Term, Var};

const VAR_POOL: [&str; 12] = ["A", "B", "C", "D", "E", "F", "H", "K", "L", "M", "N", "P"];

/// A random term over an initial segment of the variable pool, the
/// constants `a`/`b`, and the fragment's function symbols.
pub fn random_term(rng: &mut impl Rng, num_vars: usize, max_depth: usize) -> Term {
    if max_depth <= 1 || rng.gen_bool(0.3) {
        return if rng.gen_bool(0.8) {
            Term::Var(Var::new(VAR_POOL[rng.gen_range(0..num_vars)]))
        } else if rng.gen_bool(0.5) {
            cnst("a")
        } else {
            cnst("b")
        };
    }
    match rng.gen_range(0..4) {
        0 => g(random_term(rng, num_vars, max_depth - 1)),
        1 => exp(
            random_term(rng, num_vars, max_depth - 1),
            random_term(rng, num_vars, max_depth - 1),
        ),
        2 => mul(
            random_term(rng, num_vars, max_depth - 1),
            random_term(rng, num_vars, max_depth - 1),
        ),
        _ => cmul(
            random_term(rng, num_vars, max_depth - 1),
            random_term(rng, num_vars, max_depth - 1),
        ),
    }
}

/// A random problem of up to `max_eqs` equations over up to `max_vars`
/// variables with terms of depth up to `max_depth`.
pub fn random_problem(
    rng: &mut impl Rng,
    max_eqs: usize,
    max_vars: usize,
    max_depth: usize,
) -> Vec<(Term, Term)> {
    let num_vars = rng.gen_range(1..=max_vars.min(VAR_POOL.len()));
    let num_eqs = rng.gen_range(1..=max_eqs);
    (0..num_eqs)
        .map(|_| {
            (
                random_term(rng, num_vars, max_depth),
                random_term(rng, num_vars, max_depth),
            )
        })
        .collect()
}

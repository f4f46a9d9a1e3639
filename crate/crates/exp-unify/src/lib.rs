//! Unification modulo a partial theory of exponentiation.
//!
//! The theory has two axioms relating exponentiation `exp`, fixed-base
//! exponentiation `g`, and two free multiplications `*` (base level) and
//! `@` (exponent level):
//!
//! ```text
//! exp(g(X), Y)   =  g(X @ Y)
//! exp(X * Y, Z)  =  exp(X, Z) * exp(Y, Z)
//! ```
//!
//! Unification in this fragment is decidable. The [`solver`] flattens a
//! problem, runs inference rules to a terminal state while watching two
//! dependency graphs for failure, and extracts a unifier. The
//! [`rewrite`] oracle independently verifies every positive verdict by
//! normalization and can exhaustively refute small negative ones. The
//! [`e1`] module covers the extension where both multiplications form
//! abelian groups; unification there is undecidable, so it only checks
//! witnesses, in particular for the gadgets that embed integer arithmetic.
//!
//! A narrative guide lives in the `book/` directory; its code snippets run
//! as doc-tests through the [`guide`] module.
//!
//! ```
//! use exp_unify::prelude::*;
//!
//! let eqs = vec![exp_unify::term::parse_equation("exp(g(A), B) =? g(C)")?];
//! let verdict = solve(&eqs)?;
//! match verdict.outcome {
//!     Outcome::Unifiable { unifier, full, .. } => {
//!         assert_eq!(unifier.to_string(), "{C -> A @ B}");
//!         assert!(verify_unifier(&full, &eqs));
//!     }
//!     Outcome::Fail(reason) => panic!("unexpected failure: {reason}"),
//! }
//! # Ok::<(), exp_unify::Error>(())
//! ```

pub mod e1;
pub mod engine;
pub mod error;
pub mod flatten;
pub mod gen;
pub mod graphs;
pub mod guide;
pub mod report;
pub mod rewrite;
pub mod solver;
pub mod term;

pub use error::Error;

/// The common imports.
pub mod prelude {
    pub use crate::e1::{check_assignment, circ, e1_equal, e1_normalize};
    pub use crate::graphs::FailCode;
    pub use crate::rewrite::{enumerate_unifiers, normalize, verify_unifier};
    pub use crate::solver::{solve, Outcome, Verdict};
    pub use crate::term::{parse_term, Subst, Term, Var};
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// The solver handles only the two-axiom fragment; `inv`, `i` and `1`
    /// belong to the group oracle.
    #[error("symbol '{0}' is outside the decidable fragment")]
    GroupSymbolInDecidableFragment(&'static str),

    /// The termination theorem says this never happens on correct rule
    /// application; hitting it means an implementation bug, not an input
    /// property.
    #[error("fuel exhausted after {0} peak-rule applications (internal error)")]
    FuelExhausted(usize),

    #[error("enumeration budget of {0} candidates exceeded")]
    BudgetExceeded(u64),

    #[error("internal error: dependency graph cyclic in a terminal state")]
    InternalNonDag,
}

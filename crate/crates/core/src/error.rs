use thiserror::Error;

use crate::valuation::Branch;

pub type Result<T> = std::result::Result<T, LucasError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LucasError {
    #[error("the recurrence coefficient P must be nonzero")]
    ZeroParameter,

    #[error("exponent k = {k} exceeds the arithmetic cap {cap}")]
    ExponentTooLarge { k: u32, cap: u32 },

    #[error("index {n} is outside the exact-evaluation bound {bound}")]
    IndexOutOfRange { n: i64, bound: u64 },

    #[error("u_0 = 0 has infinite 3-adic valuation")]
    ZeroTermValuation,

    #[error("no closed form for k = {k} < delta = {delta}; use the brute-force path")]
    UnsupportedRange { k: u32, delta: u32 },

    #[error("P = {p} is not covered by the closed-form frequency formulas (P must be positive)")]
    UnsupportedParameter { p: i64 },

    #[error("iteration budget of {budget} steps exhausted")]
    BudgetExceeded { budget: u64 },

    #[error("operation requires the {expected:?} branch, got {actual:?}")]
    WrongBranch { expected: Branch, actual: Branch },

    #[error("s = {s} and t = {t} must have the same parity")]
    ParityMismatch { s: i64, t: i64 },

    #[error("identity {identity} takes {expected} inputs, got {actual}")]
    Arity {
        identity: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

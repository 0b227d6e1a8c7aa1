//! Crate-wide error type.
//!
//! Every fallible operation in this crate reports one of the variants below.
//! The split mirrors how callers are expected to react: `Shape` and
//! `Contract` mean the caller handed us malformed input, `Budget` means the
//! requested exact enumeration is too large to run, and the remaining
//! variants signal numerical trouble inside the floating-point interpolation
//! path (the exact path never raises them).

use crate::dichotomy::Verdict;

/// Errors raised by evaluation, classification, and reduction routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Matrix/vector dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A documented precondition was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The input pair is tractable, so running an interpolation reduction on
    /// it is refused. Carries the classification verdict for diagnostics.
    #[error("input is tractable ({reason}); reduction refused")]
    TractableInput { reason: String, verdict: Box<Verdict> },

    /// Closed-form evaluation was asked of a pair the dichotomy classifies
    /// as hard. Carries the verdict with its hardness witness.
    #[error("input pair is not tractable; no closed-form evaluation")]
    HardInput { verdict: Box<Verdict> },

    /// Raw enumeration would exceed the configured assignment budget.
    #[error("enumeration budget exceeded: {required} assignments > budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    /// An operation that needs a nonempty index domain was given an empty one.
    #[error("empty domain: {0}")]
    EmptyDomain(String),

    /// Iterative eigendecomposition failed to converge at the working precision.
    #[error("eigendecomposition did not converge at {precision} bits")]
    Precision { precision: u32 },

    /// An interpolation node is (numerically) zero but the caller needs to
    /// extrapolate below the sampled range, which divides by that node.
    #[error("degenerate interpolation node near zero")]
    DegenerateNode,

    /// A linear solve lost too much accuracy to certify its result.
    #[error("ill-conditioned linear system: {0}")]
    IllConditioned(String),

    /// No linear recurrence within the stated order bound fits the samples.
    #[error("no linear recurrence of order <= {bound} fits the samples")]
    OrderBound { bound: usize },

    /// A recurrence with zero constant term cannot be run backwards.
    #[error("recurrence has zero constant term; cannot extrapolate backwards")]
    ZeroConstantTerm,

    /// Invariant breakage that indicates a bug in this crate, not bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

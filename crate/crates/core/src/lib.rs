//! Exact evaluation, tractability classification, and interpolation-based
//! reductions for weighted graph homomorphism partition functions.
//!
//! The crate is organized bottom-up:
//!
//! * [`numeric`] — exact rationals, rational matrices with fraction-free
//!   elimination, a dyadic high-precision softfloat, Jacobi eigensolving,
//!   Vandermonde systems, and minimal linear recurrences;
//! * [`graphs`] — multigraphs, thickening/stretching, the interpolation
//!   gadgets, vertex-cycle expansion, and weighted grids;
//! * [`partition`] — exact partition-function evaluators, including
//!   transfer-matrix collapsed forms for large gadget instances;
//! * [`dichotomy`] — tractability classification with checkable witnesses;
//! * [`tractable`] — polynomial-time evaluation on the tractable side;
//! * [`condense`] — compression of linearly dependent weight-matrix columns
//!   and the thickening-power certificate machinery;
//! * [`interpolate`] — the two end-to-end reductions, each emitting a
//!   verification transcript whose verdict is recomputed, never stored.
//!
//! Everything observable is deterministic: containers are ordered, parallel
//! reductions combine exact rationals associatively, and all randomness in
//! tests is seeded.

pub mod condense;
pub mod dichotomy;
pub mod error;
pub mod graphs;
pub mod interpolate;
pub mod numeric;
pub mod partition;
pub mod tractable;

pub use error::{Error, Result};

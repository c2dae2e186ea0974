//! Fixed points of alpha-contractive maps of Meir-Keeler type.
//!
//! [`picard`] runs the iteration and records its diagnostics, [`verify`]
//! tries to refute the contraction hypotheses on finite samples,
//! [`reductions`] turns coupled and cyclic problems into single-map ones and
//! [`bvp`] applies all of it to a third-order boundary value problem.

// Negated float comparisons are deliberate: they send NaN down the failing
// branch. Failures carry the whole trace by design.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::result_large_err)]

pub mod alpha;
pub mod bvp;
pub mod cli;
pub mod error;
pub mod map;
pub mod metric;
pub mod picard;
pub mod reductions;
pub mod relation;
pub mod verify;

pub use error::{Error, Result};

//! Exact finite-alphabet laboratory for mismatch-aware PAC bounds on the
//! gap between the cross-entropy of the expected risk and the empirical
//! cross-entropy.
//!
//! Every probability is stored in log domain. Datasets are ordered
//! sequences of `(x, y)` pairs enumerated lexicographically, so any quantity
//! over `(S, h)` can be computed exactly when the space is small enough.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod classifier;
pub mod error;
pub mod info;
pub mod learner;
pub mod prob;
pub mod spec;
pub mod verify;

pub use error::{Error, Result};

//! Bayes factors for t-test summary statistics under a Cauchy (JZS) prior on
//! the standardized effect size, with a common-effect meta-analytic extension,
//! posterior probabilities and Jeffreys evidence labels.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod numerics;

pub use error::{Error, Result};
pub mod engine;
pub mod meta;
pub mod io;

//! Finite-alphabet toolkit for the wiretap multiple-access channel.
//!
//! The crate computes strongly secret achievable rate regions (common
//! message/common randomness and conferencing encoders), checks the
//! polytope decomposition lemmas behind them, and builds small random
//! wiretap codes whose error and leakage are evaluated exactly.

// `!(x >= 0.0)` style guards are used on purpose so NaN is rejected.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::too_many_arguments,
    clippy::type_complexity
)]

pub mod casestudy;
pub mod codesim;
pub mod conferencing;
pub mod error;
pub mod optimizer;
pub mod probkit;
pub mod regions;

pub use error::{Error, Result};

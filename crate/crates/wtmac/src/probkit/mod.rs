//! Exact finite-probability kernel: distributions, channels, information
//! measures, typical sets and sequence-level extensions.
//!
//! Logarithms are base 2 throughout and `0 log 0 = 0`.

mod dist;
mod factored;
mod joint;
mod mac;
pub mod seq;
mod typical;

pub use dist::{Alphabet, Channel, Dist};
pub use factored::{FactoredInput, FactoredJson};
pub use joint::{entropy, joint_from_factors, mutual_information, xlog2x, Axis, JointDist};
pub use mac::{ChannelJson, WiretapMAC};
pub use seq::n_fold;
pub use typical::{
    truncated_typical_dist, typical_membership, SequenceDist, TypicalLaw, TypicalitySpec,
};

/// Normalization tolerance for user-supplied distributions.
pub const NORM_TOL: f64 = 1e-12;
/// Normalization tolerance for distributions produced by arithmetic.
pub const ARITH_TOL: f64 = 1e-10;
/// Largest dense tensor (in cells) any operation will materialize.
pub const MAX_CELLS: u128 = 10_000_000;

/// L1 distance `Σ |m1(x) − m2(x)|`. Inputs need not be normalized.
pub fn variation_distance(m1: &[f64], m2: &[f64]) -> crate::Result<f64> {
    if m1.len() != m2.len() {
        return Err(crate::Error::validation(format!(
            "variation distance between measures on alphabets of size {} and {}",
            m1.len(),
            m2.len()
        )));
    }
    Ok(m1.iter().zip(m2).map(|(a, b)| (a - b).abs()).sum())
}

/// `[x]_+`.
#[inline]
pub fn pos(x: f64) -> f64 {
    x.max(0.0)
}

pub(crate) fn check_budget(what: &str, cells: u128) -> crate::Result<()> {
    if cells > MAX_CELLS {
        Err(crate::Error::resource(what, cells, MAX_CELLS))
    } else {
        Ok(())
    }
}

/// `base^n` with saturation, for budget checks.
pub(crate) fn pow_sat(base: usize, n: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

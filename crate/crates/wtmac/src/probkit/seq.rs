//! Sequences over finite alphabets and memoryless extensions.
//!
//! A sequence `a_1 … a_n` over an alphabet of size `q` has index
//! `Σ a_i q^{n−i}` (first symbol most significant).

use super::{check_budget, pow_sat, Channel};
use crate::{Error, Result};

pub fn seq_to_index(seq: &[usize], base: usize) -> usize {
    seq.iter().fold(0, |acc, &s| acc * base + s)
}

pub fn index_to_seq(mut idx: usize, base: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for i in (0..n).rev() {
        out[i] = idx % base;
        idx /= base;
    }
    out
}

/// Number of sequences `base^n`, erroring if it exceeds the dense budget.
pub fn count_sequences(base: usize, n: usize, what: &str) -> Result<usize> {
    let c = pow_sat(base, n);
    check_budget(what, c)?;
    Ok(c as usize)
}

/// `W^{⊗n}(z|x) = Π W(z_i|x_i)` for explicit sequences.
pub fn product_prob(ch: &Channel, x: &[usize], z: &[usize]) -> f64 {
    x.iter().zip(z).map(|(&a, &b)| ch.prob(a, b)).product()
}

/// Output distribution of `W^{⊗n}` for the input sequence `x`, over all
/// `|Z|^n` output sequences.
pub fn output_law(ch: &Channel, x: &[usize]) -> Result<Vec<f64>> {
    let nz = ch.n_out();
    let total = count_sequences(nz, x.len(), "n-fold output law")?;
    let mut law = Vec::with_capacity(total);
    law.push(1.0);
    for &a in x {
        let row = ch.row(a);
        let mut next = Vec::with_capacity(law.len() * nz);
        for &p in &law {
            next.extend(row.iter().map(|q| p * q));
        }
        law = next;
    }
    Ok(law)
}

/// Output law of `W^{⊗n}` for a pair of input sequences fed to a channel
/// whose input is the pair alphabet `a·n_b + b`.
pub fn output_law_pair(ch: &Channel, n_b: usize, a: &[usize], b: &[usize]) -> Result<Vec<f64>> {
    let joint: Vec<usize> = a.iter().zip(b).map(|(&x, &y)| x * n_b + y).collect();
    output_law(ch, &joint)
}

/// n-fold memoryless extension over sequence alphabets.
pub fn n_fold(ch: &Channel, n: usize) -> Result<Channel> {
    if n == 0 {
        return Err(Error::validation("n-fold extension needs n >= 1"));
    }
    let cells = pow_sat(ch.n_in(), n).saturating_mul(pow_sat(ch.n_out(), n));
    check_budget("n-fold channel", cells)?;
    let nin = pow_sat(ch.n_in(), n) as usize;
    let nout = pow_sat(ch.n_out(), n) as usize;
    let mut m = Vec::with_capacity(nin * nout);
    for i in 0..nin {
        let x = index_to_seq(i, ch.n_in(), n);
        m.extend(output_law(ch, &x)?);
    }
    Channel::from_flat(nin, nout, m)
}

//! Random codebook families drawn from truncated typical laws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::probkit::{truncated_typical_dist, FactoredInput, TypicalLaw};
use crate::{Error, Result};

/// Largest number of symbols stored across all codewords of one family.
pub const MAX_CODEBOOK_SYMBOLS: u128 = 50_000_000;

/// Index sizes: `K0, K1, K2` message multipliers and `L0, L1, L2`
/// randomization sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSizes {
    pub k: [usize; 3],
    pub l: [usize; 3],
}

impl CodeSizes {
    pub fn new(k: [usize; 3], l: [usize; 3]) -> Result<Self> {
        if k.iter().chain(&l).any(|&s| s == 0) {
            return Err(Error::validation("codebook sizes must be >= 1"));
        }
        Ok(CodeSizes { k, l })
    }

    /// `K_ν L_ν`, the number of words on each level.
    pub fn words(&self) -> [usize; 3] {
        [
            self.k[0] * self.l[0],
            self.k[1] * self.l[1],
            self.k[2] * self.l[2],
        ]
    }

    pub fn messages(&self) -> usize {
        self.k.iter().product()
    }

    pub fn randomization(&self) -> usize {
        self.l.iter().product()
    }
}

/// `G = ∪_{g0} (u^{g0}, {x^{g0 g1}}, {y^{g0 g2}})` with `g_ν = k_ν L_ν + l_ν`.
///
/// The sequences live on the auxiliary alphabets of the input law, i.e.
/// the codewords are inputs of the prefixed channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodebookFamily {
    pub n: usize,
    pub delta: f64,
    pub seed: u64,
    pub sizes: CodeSizes,
    /// `(|U|, |V1|, |V2|)`.
    pub alphabets: [usize; 3],
    pub u: Vec<Vec<usize>>,
    pub x: Vec<Vec<Vec<usize>>>,
    pub y: Vec<Vec<Vec<usize>>>,
}

impl CodebookFamily {
    pub fn u_word(&self, k0: usize, l0: usize) -> &[usize] {
        &self.u[k0 * self.sizes.l[0] + l0]
    }

    pub fn x_word(&self, k0: usize, l0: usize, k1: usize, l1: usize) -> &[usize] {
        &self.x[k0 * self.sizes.l[0] + l0][k1 * self.sizes.l[1] + l1]
    }

    pub fn y_word(&self, k0: usize, l0: usize, k2: usize, l2: usize) -> &[usize] {
        &self.y[k0 * self.sizes.l[0] + l0][k2 * self.sizes.l[2] + l2]
    }

    /// Flat listing `kind,g0,g,sequence` with one row per codeword.
    pub fn to_csv(&self) -> String {
        let seq = |s: &[usize]| {
            s.iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::from("kind,g0,g,sequence\n");
        for (g0, u) in self.u.iter().enumerate() {
            out.push_str(&format!("u,{g0},0,{}\n", seq(u)));
            for (g, x) in self.x[g0].iter().enumerate() {
                out.push_str(&format!("x,{g0},{g},{}\n", seq(x)));
            }
            for (g, y) in self.y[g0].iter().enumerate() {
                out.push_str(&format!("y,{g0},{g},{}\n", seq(y)));
            }
        }
        out
    }
}

/// Draws `U^{g0} ∼ P_U^n` and, given `U^{g0}`, independent
/// `X^{g0 g1} ∼ P^n_{V1|U}`, `Y^{g0 g2} ∼ P^n_{V2|U}` (all truncated to
/// their δ-typical sets). Stream `g0` of `ChaCha8(seed)` drives block `g0`.
pub fn sample_codebook_family(
    p: &FactoredInput,
    n: usize,
    sizes: CodeSizes,
    delta: f64,
    seed: u64,
) -> Result<CodebookFamily> {
    sample_family_stream(p, n, sizes, delta, seed, 0)
}

pub(crate) fn sample_family_stream(
    p: &FactoredInput,
    n: usize,
    sizes: CodeSizes,
    delta: f64,
    seed: u64,
    part: u64,
) -> Result<CodebookFamily> {
    CodeSizes::new(sizes.k, sizes.l)?;
    if n == 0 {
        return Err(Error::validation("blocklength must be positive"));
    }
    let [w0, w1, w2] = sizes.words();
    let symbols = (w0 as u128) * (1 + w1 as u128 + w2 as u128) * n as u128;
    if symbols > MAX_CODEBOOK_SYMBOLS {
        return Err(Error::resource(
            "codebook family",
            symbols,
            MAX_CODEBOOK_SYMBOLS,
        ));
    }
    let u_law = truncated_typical_dist(&TypicalLaw::Marginal(p.p_u().clone()), n, delta, None)?;
    let x_law = TypicalLaw::Conditional(p.v1_given_u().clone());
    let y_law = TypicalLaw::Conditional(p.v2_given_u().clone());
    // check the conditional sets once up front so the error is deterministic
    {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(part << 32 | 0xffff_ffff);
        let u = u_law.sample(&mut rng);
        truncated_typical_dist(&x_law, n, delta, Some(&u))?;
        truncated_typical_dist(&y_law, n, delta, Some(&u))?;
    }
    let blocks: Vec<(Vec<usize>, Vec<Vec<usize>>, Vec<Vec<usize>>)> = (0..w0)
        .into_par_iter()
        .map(|g0| -> Result<_> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(part << 32 | g0 as u64);
            let u = u_law.sample(&mut rng);
            let xd = truncated_typical_dist(&x_law, n, delta, Some(&u))?;
            let yd = truncated_typical_dist(&y_law, n, delta, Some(&u))?;
            let xs = (0..w1).map(|_| xd.sample(&mut rng)).collect();
            let ys = (0..w2).map(|_| yd.sample(&mut rng)).collect();
            Ok((u, xs, ys))
        })
        .collect::<Result<_>>()?;
    let (mut u, mut x, mut y) = (
        Vec::with_capacity(w0),
        Vec::with_capacity(w0),
        Vec::with_capacity(w0),
    );
    for (a, b, c) in blocks {
        u.push(a);
        x.push(b);
        y.push(c);
    }
    let (nu, n1, n2) = p.aux_sizes();
    Ok(CodebookFamily {
        n,
        delta,
        seed,
        sizes,
        alphabets: [nu, n1, n2],
        u,
        x,
        y,
    })
}

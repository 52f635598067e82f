use rand::seq::SliceRandom;
use rand::Rng;

use super::seq::{count_sequences, index_to_seq};
use super::{Channel, Dist};
use crate::{Error, Result};

/// Slack added to `δ` when comparing empirical frequencies, so that exact
/// types sitting on the boundary are not rejected by rounding.
const COUNT_EPS: f64 = 1e-12;

/// Largest number of type classes enumerated when building a truncated law.
const MAX_COMPOSITIONS: usize = 5_000_000;

/// Law against which typicality is measured: a single distribution, or a
/// channel whose row is selected by a context sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum TypicalLaw {
    Marginal(Dist),
    Conditional(Channel),
}

impl TypicalLaw {
    pub fn alphabet_size(&self) -> usize {
        match self {
            TypicalLaw::Marginal(d) => d.len(),
            TypicalLaw::Conditional(c) => c.n_out(),
        }
    }

    fn context_size(&self) -> usize {
        match self {
            TypicalLaw::Marginal(_) => 1,
            TypicalLaw::Conditional(c) => c.n_in(),
        }
    }

    fn row(&self, b: usize) -> &[f64] {
        match self {
            TypicalLaw::Marginal(d) => d.mass(),
            TypicalLaw::Conditional(c) => c.row(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TypicalitySpec {
    pub law: TypicalLaw,
    pub delta: f64,
    pub n: usize,
}

fn context_classes(law: &TypicalLaw, n: usize, context: Option<&[usize]>) -> Result<Vec<usize>> {
    match (law, context) {
        (TypicalLaw::Marginal(_), None) => Ok(vec![0; n]),
        (TypicalLaw::Marginal(_), Some(_)) => Err(Error::validation(
            "a context sequence was given for an unconditional law",
        )),
        (TypicalLaw::Conditional(_), None) => Err(Error::validation(
            "conditional typicality needs a context sequence",
        )),
        (TypicalLaw::Conditional(c), Some(ctx)) => {
            if ctx.len() != n {
                return Err(Error::validation(format!(
                    "context length {} does not match blocklength {n}",
                    ctx.len()
                )));
            }
            if let Some(&b) = ctx.iter().find(|&&b| b >= c.n_in()) {
                return Err(Error::validation(format!(
                    "context symbol {b} out of range"
                )));
            }
            Ok(ctx.to_vec())
        }
    }
}

#[inline]
fn within(count: usize, expected: f64, n: usize, delta: f64) -> bool {
    (count as f64 / n as f64 - expected / n as f64).abs() <= delta + COUNT_EPS
}

/// Counting typicality: `|N(a,b)/n − P(a|b)·N(b)/n| ≤ δ` for every pair
/// (the unconditional case has a single context class).
pub fn typical_membership(
    spec: &TypicalitySpec,
    seq: &[usize],
    context: Option<&[usize]>,
) -> Result<bool> {
    if !(spec.delta > 0.0) {
        return Err(Error::precondition("typicality needs δ > 0"));
    }
    if seq.len() != spec.n {
        return Err(Error::validation(format!(
            "sequence length {} does not match blocklength {}",
            seq.len(),
            spec.n
        )));
    }
    let a_size = spec.law.alphabet_size();
    if let Some(&a) = seq.iter().find(|&&a| a >= a_size) {
        return Err(Error::validation(format!("symbol {a} out of range")));
    }
    let classes = context_classes(&spec.law, spec.n, context)?;
    Ok(is_typical(&spec.law, spec.delta, seq, &classes))
}

fn is_typical(law: &TypicalLaw, delta: f64, seq: &[usize], classes: &[usize]) -> bool {
    let a_size = law.alphabet_size();
    let b_size = law.context_size();
    let n = seq.len();
    let mut joint = vec![0usize; a_size * b_size];
    let mut ctx = vec![0usize; b_size];
    for (&a, &b) in seq.iter().zip(classes) {
        joint[b * a_size + a] += 1;
        ctx[b] += 1;
    }
    for b in 0..b_size {
        let row = law.row(b);
        for a in 0..a_size {
            if !within(joint[b * a_size + a], row[a] * ctx[b] as f64, n, delta) {
                return false;
            }
        }
    }
    true
}

/// Type classes of one context symbol with their i.i.d. probabilities.
#[derive(Clone, Debug)]
struct ClassTable {
    positions: Vec<usize>,
    comps: Vec<Vec<usize>>,
    cum: Vec<f64>,
    /// total i.i.d. probability of the admissible types, `exp(log_scale)·cum.last()`
    log_mass: f64,
}

/// Truncated typical law: `P^{⊗n}` restricted to the (conditional)
/// δ-typical set and renormalized.
#[derive(Clone, Debug)]
pub struct SequenceDist {
    law: TypicalLaw,
    n: usize,
    delta: f64,
    classes: Vec<usize>,
    tables: Vec<ClassTable>,
    log_mass: f64,
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut f = vec![0.0; n + 1];
    for k in 1..=n {
        f[k] = f[k - 1] + (k as f64).ln();
    }
    f
}

fn enumerate_compositions(
    row: &[f64],
    m: usize,
    n: usize,
    delta: f64,
    lnf: &[f64],
    budget: &mut usize,
) -> Result<(Vec<Vec<usize>>, Vec<f64>)> {
    let a_size = row.len();
    let mut comps = Vec::new();
    let mut logw = Vec::new();
    let mut cur = vec![0usize; a_size];
    let radius = delta * n as f64 + COUNT_EPS * n as f64;
    let range = |a: usize, left: usize| -> (usize, usize) {
        let centre = row[a] * m as f64;
        let lo = (centre - radius).ceil().max(0.0) as usize;
        let hi = ((centre + radius).floor().max(-1.0) as i64).min(left as i64);
        (lo, if hi < 0 { 0 } else { hi as usize + 1 })
    };
    fn rec(
        a: usize,
        left: usize,
        cur: &mut Vec<usize>,
        row: &[f64],
        m: usize,
        lnf: &[f64],
        range: &dyn Fn(usize, usize) -> (usize, usize),
        comps: &mut Vec<Vec<usize>>,
        logw: &mut Vec<f64>,
        budget: &mut usize,
    ) -> Result<()> {
        let a_size = row.len();
        if a == a_size - 1 {
            let (lo, hi) = range(a, left);
            if left < lo || left >= hi {
                return Ok(());
            }
            cur[a] = left;
            let mut lw = lnf[m];
            for (s, &k) in cur.iter().enumerate() {
                if k > 0 {
                    if row[s] == 0.0 {
                        return Ok(());
                    }
                    lw += k as f64 * row[s].ln() - lnf[k];
                }
            }
            if *budget == 0 {
                return Err(Error::resource(
                    "typical type classes",
                    MAX_COMPOSITIONS as u128 + 1,
                    MAX_COMPOSITIONS as u128,
                ));
            }
            *budget -= 1;
            comps.push(cur.clone());
            logw.push(lw);
            return Ok(());
        }
        let (lo, hi) = range(a, left);
        for k in lo..hi {
            cur[a] = k;
            rec(
                a + 1,
                left - k,
                cur,
                row,
                m,
                lnf,
                range,
                comps,
                logw,
                budget,
            )?;
        }
        Ok(())
    }
    rec(
        0, m, &mut cur, row, m, lnf, &range, &mut comps, &mut logw, budget,
    )?;
    Ok((comps, logw))
}

/// Builds the truncated typical law of `law` at blocklength `n`.
pub fn truncated_typical_dist(
    law: &TypicalLaw,
    n: usize,
    delta: f64,
    context: Option<&[usize]>,
) -> Result<SequenceDist> {
    if !(delta > 0.0) {
        return Err(Error::precondition("typicality needs δ > 0"));
    }
    if n == 0 {
        return Err(Error::validation("blocklength must be positive"));
    }
    let classes = context_classes(law, n, context)?;
    let lnf = ln_factorials(n);
    let mut budget = MAX_COMPOSITIONS;
    let mut tables = Vec::new();
    let mut log_mass = 0.0;
    for b in 0..law.context_size() {
        let positions: Vec<usize> = (0..n).filter(|&i| classes[i] == b).collect();
        let m = positions.len();
        let row = law.row(b);
        let (comps, logw) = enumerate_compositions(row, m, n, delta, &lnf, &mut budget)?;
        if comps.is_empty() {
            return Err(Error::DegenerateTypicality(format!(
                "no {}-typical sequence with positive probability at n = {n} (context symbol {b}, {m} positions)",
                delta
            )));
        }
        let lmax = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let cum: Vec<f64> = logw
            .iter()
            .map(|lw| {
                acc += (lw - lmax).exp();
                acc
            })
            .collect();
        let lm = lmax + acc.ln();
        log_mass += lm;
        tables.push(ClassTable {
            positions,
            comps,
            cum,
            log_mass: lm,
        });
    }
    Ok(SequenceDist {
        law: law.clone(),
        n,
        delta,
        classes,
        tables,
        log_mass,
    })
}

impl SequenceDist {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> usize {
        self.law.alphabet_size()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// i.i.d. probability of the typical set, `P^{⊗n}(T^n_δ)`.
    pub fn typical_set_probability(&self) -> f64 {
        self.log_mass.exp()
    }

    /// Probability of one context class's admissible types (diagnostic).
    pub fn class_masses(&self) -> Vec<f64> {
        self.tables.iter().map(|t| t.log_mass.exp()).collect()
    }

    pub fn contains(&self, seq: &[usize]) -> bool {
        seq.len() == self.n
            && seq.iter().all(|&a| a < self.base())
            && is_typical(&self.law, self.delta, seq, &self.classes)
    }

    /// i.i.d. probability `P^{⊗n}(seq)` (no truncation).
    pub fn iid_prob(&self, seq: &[usize]) -> f64 {
        seq.iter()
            .zip(&self.classes)
            .map(|(&a, &b)| self.law.row(b)[a])
            .product()
    }

    /// Truncated probability of `seq`.
    pub fn prob(&self, seq: &[usize]) -> f64 {
        if !self.contains(seq) {
            return 0.0;
        }
        let p = self.iid_prob(seq);
        if p == 0.0 {
            0.0
        } else {
            (p.ln() - self.log_mass).exp()
        }
    }

    /// Dense mass vector over all `base^n` sequences.
    pub fn dense(&self) -> Result<Vec<f64>> {
        let total = count_sequences(self.base(), self.n, "dense sequence law")?;
        Ok((0..total)
            .map(|i| self.prob(&index_to_seq(i, self.base(), self.n)))
            .collect())
    }

    /// Exact draw: pick a type per context class, then a uniformly random
    /// arrangement of it over the class's positions.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut out = vec![0usize; self.n];
        for t in &self.tables {
            if t.positions.is_empty() {
                continue;
            }
            let total = *t.cum.last().expect("nonempty class table");
            let r = rng.gen::<f64>() * total;
            let idx = t.cum.partition_point(|&c| c <= r).min(t.comps.len() - 1);
            let mut symbols = Vec::with_capacity(t.positions.len());
            for (a, &k) in t.comps[idx].iter().enumerate() {
                symbols.extend(std::iter::repeat_n(a, k));
            }
            symbols.shuffle(rng);
            for (&pos, &a) in t.positions.iter().zip(&symbols) {
                out[pos] = a;
            }
        }
        out
    }
}

//! Secrecy-from-variation, Chernoff and the concentration events behind
//! the random-coding secrecy proof.

use std::collections::HashMap;
use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::probkit::seq::{index_to_seq, product_prob};
use crate::probkit::{
    check_budget, pow_sat, truncated_typical_dist, typical_membership, Channel, Dist,
    FactoredInput, JointDist, TypicalLaw, TypicalitySpec, MAX_CELLS,
};
use crate::regions::info_profile;
use crate::{Error, Result};

/// `ε log(|Z|^n / ε)`, the entropy-continuity bound on `I(Z^n ∧ M)` when
/// every message's output law is within `ε ≤ 1/2` (L1) of a common one.
pub fn secrecy_from_variation(eps: f64, z_size: usize, n: usize) -> Result<f64> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(Error::precondition(format!(
            "variation bound needs 0 <= ε <= 1/2, got {eps}"
        )));
    }
    if z_size == 0 || n == 0 {
        return Err(Error::validation(
            "alphabet size and blocklength must be positive",
        ));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    Ok(eps * (n as f64 * (z_size as f64).log2() - eps.log2()))
}

/// `exp(−L ε² μ / (2 b ln 2))` for the mean of `L` independent `[0, b]`
/// variables leaving `[(1 ± ε) μ]` on one side.
pub fn chernoff_bound(l: usize, eps: f64, mu: f64, b: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::precondition(format!(
            "Chernoff bound needs 0 < ε < 1/2, got {eps}"
        )));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::precondition(format!(
            "Chernoff bound needs b > 0, got {b}"
        )));
    }
    if !(mu >= 0.0 && mu <= b) {
        return Err(Error::precondition(format!(
            "Chernoff bound needs μ in [0, b], got {mu}"
        )));
    }
    Ok((-(l as f64) * eps * eps * mu / (2.0 * b * LN_2)).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernoffCheck {
    pub l: usize,
    pub eps: f64,
    pub mu: f64,
    pub bound: f64,
    /// Frequency of `mean > (1+ε)μ`.
    pub upper_freq: f64,
    /// Frequency of `mean < (1−ε)μ`.
    pub lower_freq: f64,
    /// Binomial standard deviation of a frequency whose mean is the bound.
    pub sigma: f64,
    pub trials: usize,
}

impl ChernoffCheck {
    /// Both tail frequencies within the bound plus three standard deviations.
    pub fn passed(&self) -> bool {
        let lim = self.bound + 3.0 * self.sigma;
        self.upper_freq <= lim && self.lower_freq <= lim
    }
}

/// Batches of `L` i.i.d. Bernoulli(μ) variables (`b = 1`); batch `i` uses
/// stream `i` of `ChaCha8(seed)`.
pub fn chernoff_check(
    l: usize,
    eps: f64,
    mu: f64,
    trials: usize,
    seed: u64,
) -> Result<ChernoffCheck> {
    let bound = chernoff_bound(l, eps, mu, 1.0)?;
    if trials == 0 || l == 0 {
        return Err(Error::validation(
            "need at least one batch of at least one variable",
        ));
    }
    let (up, lo) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let ones = (0..l).filter(|_| rng.gen::<f64>() < mu).count();
            let mean = ones as f64 / l as f64;
            (
                (mean > (1.0 + eps) * mu) as usize,
                (mean < (1.0 - eps) * mu) as usize,
            )
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let bc = bound.min(1.0);
    Ok(ChernoffCheck {
        l,
        eps,
        mu,
        bound,
        upper_freq: up as f64 / trials as f64,
        lower_freq: lo as f64 / trials as f64,
        sigma: (bc * (1.0 - bc) / trials as f64).sqrt(),
        trials,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationConfig {
    pub n: usize,
    /// `(L0, L1, L2)`.
    pub l: [usize; 3],
    pub delta: f64,
    pub eps: f64,
    /// Per-term slack `f_i(δ)` in bits.
    pub slack: f64,
    pub resamples: usize,
    pub seed: u64,
    /// Typicality exponent constant; calibrated when absent.
    pub c_tilde: Option<f64>,
    /// Draws for the Monte Carlo reference measure of the `L0` lemma.
    pub reference_draws: usize,
}

impl Default for ConcentrationConfig {
    fn default() -> Self {
        ConcentrationConfig {
            n: 8,
            l: [1, 64, 1],
            delta: 0.1,
            eps: 0.25,
            slack: 0.05,
            resamples: 1000,
            seed: 0,
            c_tilde: None,
            reference_draws: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub lemma: String,
    pub bound: f64,
    /// Failure frequency of the event over resampled families.
    pub empirical: f64,
    pub stderr: f64,
    pub trials: usize,
    /// Empirical frequency above the bound by more than three binomial
    /// standard deviations.
    pub exceeds: bool,
    /// Bound at least one.
    pub vacuous: bool,
    /// Reference measure estimated by sampling rather than enumeration.
    pub estimated_reference: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub checks: Vec<LemmaCheck>,
    pub c_tilde: f64,
    /// `min P[X ∈ T_{X|YU}(y, u)]` over typical `(u, y)` under the
    /// truncated codeword law.
    pub mu_min: f64,
    /// `1 − 2·2^{−n c δ²}`.
    pub mu_lower: f64,
    pub partial: bool,
    pub skipped: Vec<String>,
}

impl ConcentrationReport {
    pub fn any_exceeds(&self) -> bool {
        self.checks.iter().any(|c| c.exceeds)
    }
}

/// Laws of one sender's side ("X") against the other ("Y").
struct Side {
    n: usize,
    delta: f64,
    nu: usize,
    nx: usize,
    ny: usize,
    p_u: Dist,
    x_u: Channel,
    y_u: Channel,
    /// `P_{X|YU}` with context `u·|Y| + y`.
    x_yu: Channel,
    /// `P_{Z|YU}` with context `u·|Y| + y`.
    z_yu: Channel,
    p_z: Dist,
    /// Eve's channel with input `x·|Y| + y`.
    we: Channel,
    h_z_xy: f64,
    i_z_x_yu: f64,
    i_z_xy: f64,
}

fn conditional(j: &JointDist, nc: usize, na: usize) -> Result<Channel> {
    let rows = (0..nc)
        .map(|c| {
            let row = &j.mass()[c * na..(c + 1) * na];
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter().map(|v| v / s).collect()
            } else {
                vec![1.0 / na as f64; na]
            }
        })
        .collect();
    Channel::from_arith(rows)
}

impl Side {
    fn new(p: &FactoredInput, n: usize, delta: f64) -> Result<Self> {
        let p = p.prefixed()?;
        let (nu, nx, ny) = p.aux_sizes();
        let rj = p.reduced_joint()?;
        let nz = rj.sizes()[4];
        let x_yu = Channel::new(
            (0..nu * ny)
                .map(|c| p.v1_given_u().row(c / ny).to_vec())
                .collect(),
        )?;
        let z_yu = conditional(&rj.marginal(&[0, 2, 4])?, nu * ny, nz)?;
        let p_z = Dist::from_arith(rj.marginal(&[4])?.mass().to_vec())?;
        let prof = info_profile(&p)?;
        let h_z_xy = rj.entropy_of(&[1, 2, 4])? - rj.entropy_of(&[1, 2])?;
        Ok(Side {
            n,
            delta,
            nu,
            nx,
            ny,
            p_u: p.p_u().clone(),
            x_u: p.v1_given_u().clone(),
            y_u: p.v2_given_u().clone(),
            x_yu,
            z_yu,
            p_z,
            we: p.mac().eve(),
            h_z_xy,
            i_z_x_yu: prof.z_v1_g_v2u,
            i_z_xy: prof.z_v1v2,
        })
    }

    fn nz(&self) -> usize {
        self.p_z.len()
    }

    fn context(&self, u: &[usize], y: &[usize]) -> Vec<usize> {
        u.iter().zip(y).map(|(&a, &b)| a * self.ny + b).collect()
    }

    fn member(
        &self,
        law: TypicalLaw,
        delta: f64,
        s: &[usize],
        ctx: Option<&[usize]>,
    ) -> Result<bool> {
        typical_membership(
            &TypicalitySpec {
                law,
                delta,
                n: self.n,
            },
            s,
            ctx,
        )
    }

    fn x_in_xyu(&self, x: &[usize], u: &[usize], y: &[usize]) -> Result<bool> {
        self.member(
            TypicalLaw::Conditional(self.x_yu.clone()),
            self.delta,
            x,
            Some(&self.context(u, y)),
        )
    }

    fn pair(&self, x: &[usize], y: &[usize]) -> Vec<usize> {
        x.iter().zip(y).map(|(&a, &b)| a * self.ny + b).collect()
    }

    /// `2^{−n(H(Z|XY) − f2)}`.
    fn channel_cap(&self, slack: f64) -> f64 {
        2f64.powf(-(self.n as f64) * (self.h_z_xy - slack))
    }

    /// Minimum over typical `(u, y)` of the truncated probability that
    /// `X ∈ T_{X|YU}(y, u)`; one representative per joint type.
    fn mu_min(&self) -> Result<f64> {
        let n = self.n;
        let pairs = self.nu * self.ny;
        let reps = compositions(pairs, n);
        check_budget(
            "conditional typicality minimum",
            (reps.len() as u128).saturating_mul(pow_sat(self.nx, n)),
        )?;
        let u_law = TypicalLaw::Marginal(self.p_u.clone());
        let y_law = TypicalLaw::Conditional(self.y_u.clone());
        let x_law = TypicalLaw::Conditional(self.x_u.clone());
        let xs = pow_sat(self.nx, n) as usize;
        let vals = reps
            .par_iter()
            .map(|comp| -> Result<Option<f64>> {
                let mut u = Vec::with_capacity(n);
                let mut y = Vec::with_capacity(n);
                for (c, &cnt) in comp.iter().enumerate() {
                    for _ in 0..cnt {
                        u.push(c / self.ny);
                        y.push(c % self.ny);
                    }
                }
                if !self.member(u_law.clone(), self.delta, &u, None)?
                    || !self.member(y_law.clone(), self.delta, &y, Some(&u))?
                {
                    return Ok(None);
                }
                let (mut inside, mut total) = (0.0, 0.0);
                for xi in 0..xs {
                    let x = index_to_seq(xi, self.nx, n);
                    if !self.member(x_law.clone(), self.delta, &x, Some(&u))? {
                        continue;
                    }
                    let px = product_prob(&self.x_u, &u, &x);
                    total += px;
                    if self.x_in_xyu(&x, &u, &y)? {
                        inside += px;
                    }
                }
                Ok(if total > 0.0 {
                    Some(inside / total)
                } else {
                    None
                })
            })
            .collect::<Result<Vec<_>>>()?;
        vals.into_iter().flatten().reduce(f64::min).ok_or_else(|| {
            Error::DegenerateTypicality(format!("no typical (u, y) pair at n = {n}"))
        })
    }
}

/// All compositions of `n` into `k` nonnegative parts.
fn compositions(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, n, &mut Vec::new(), &mut out);
    out
}

fn check(lemma: &str, bound: f64, failures: &[f64], estimated: bool) -> LemmaCheck {
    let t = failures.len() as f64;
    let mean = failures.iter().sum::<f64>() / t;
    let var = failures.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (t - 1.0).max(1.0);
    let bc = bound.min(1.0);
    LemmaCheck {
        lemma: lemma.to_string(),
        bound,
        empirical: mean,
        stderr: (var / t).sqrt(),
        trials: failures.len(),
        exceeds: mean > bound + 3.0 * (bc * (1.0 - bc) / t).sqrt(),
        vacuous: bound >= 1.0,
        estimated_reference: estimated,
    }
}

fn stream(seed: u64, tag: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag << 32 | i as u64);
    rng
}

/// One conditioning draw `(u, y)` and `count` codewords `X ∼ P^n_{X|U}(·|u)`.
fn draw_block(
    side: &Side,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<usize>, Vec<usize>, Vec<Vec<usize>>)> {
    let u = truncated_typical_dist(
        &TypicalLaw::Marginal(side.p_u.clone()),
        side.n,
        side.delta,
        None,
    )?
    .sample(rng);
    let y = truncated_typical_dist(
        &TypicalLaw::Conditional(side.y_u.clone()),
        side.n,
        side.delta,
        Some(&u),
    )?
    .sample(rng);
    let xd = truncated_typical_dist(
        &TypicalLaw::Conditional(side.x_u.clone()),
        side.n,
        side.delta,
        Some(&u),
    )?;
    let xs = (0..count).map(|_| xd.sample(rng)).collect();
    Ok((u, y, xs))
}

/// Failure indicator of `|{l: X^l ∈ T_{X|YU}(y, u)}| ≥ (1−ε) μ_lower L`.
fn count_event(
    side: &Side,
    count: usize,
    mu_lower: f64,
    eps: f64,
    seed: u64,
    tag: u64,
    resamples: usize,
) -> Result<Vec<f64>> {
    (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, tag, i);
            let (u, y, xs) = draw_block(side, count, &mut rng)?;
            let mut hits = 0;
            for x in &xs {
                if side.x_in_xyu(x, &u, &y)? {
                    hits += 1;
                }
            }
            Ok(((hits as f64) < (1.0 - eps) * mu_lower * count as f64) as u8 as f64)
        })
        .collect()
}

/// Same count for the `L0` level, where every `l0` draws its own
/// `(u, x, y)`.
fn count_event_l0(
    side: &Side,
    count: usize,
    mu_lower: f64,
    eps: f64,
    seed: u64,
    tag: u64,
    resamples: usize,
) -> Result<Vec<f64>> {
    (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, tag, i);
            let mut hits = 0;
            for _ in 0..count {
                let (u, y, xs) = draw_block(side, 1, &mut rng)?;
                if side.x_in_xyu(&xs[0], &u, &y)? {
                    hits += 1;
                }
            }
            Ok(((hits as f64) < (1.0 - eps) * mu_lower * count as f64) as u8 as f64)
        })
        .collect()
}

/// Reference measure `ϑ_{uy}` (the `E1`-truncated mixture) and the
/// membership of each `z` in `T_{Z|YU, 2|X|δ}(y, u)`.
fn theta_uy(side: &Side, u: &[usize], y: &[usize], slack: f64) -> Result<(Vec<f64>, Vec<bool>)> {
    let n = side.n;
    let zs = pow_sat(side.nz(), n) as usize;
    let ctx = side.context(u, y);
    let zlaw = TypicalLaw::Conditional(side.z_yu.clone());
    let wide = 2.0 * side.nx as f64 * side.delta;
    let in_t = (0..zs)
        .map(|zi| {
            side.member(
                zlaw.clone(),
                wide,
                &index_to_seq(zi, side.nz(), n),
                Some(&ctx),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let xd = truncated_typical_dist(
        &TypicalLaw::Conditional(side.x_u.clone()),
        n,
        side.delta,
        Some(u),
    )?;
    let cap = side.channel_cap(slack);
    let mut theta = vec![0.0; zs];
    for xi in 0..pow_sat(side.nx, n) as usize {
        let x = index_to_seq(xi, side.nx, n);
        let px = xd.prob(&x);
        if px == 0.0 {
            continue;
        }
        let pair = side.pair(&x, y);
        for zi in 0..zs {
            if in_t[zi] {
                let w = product_prob(&side.we, &pair, &index_to_seq(zi, side.nz(), n));
                if w <= cap {
                    theta[zi] += px * w;
                }
            }
        }
    }
    Ok((theta, in_t))
}

/// Fraction of `z ∈ F1(u, y)` at which the empirical `E2`-mixture leaves
/// `[(1 ± ε) ϑ̂(z)]`, one value per resample.
fn aw3_event(side: &Side, cfg: &ConcentrationConfig, count: usize, tag: u64) -> Result<Vec<f64>> {
    let n = side.n;
    let zs = pow_sat(side.nz(), n) as usize;
    let cap = side.channel_cap(cfg.slack);
    let mut cache: HashMap<(Vec<usize>, Vec<usize>), (Vec<f64>, Vec<bool>)> = HashMap::new();
    let draws = (0..cfg.resamples)
        .map(|i| draw_block(side, count, &mut stream(cfg.seed, tag, i)))
        .collect::<Result<Vec<_>>>()?;
    for (u, y, _) in &draws {
        let key = (u.clone(), y.clone());
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(key) {
            let v = theta_uy(side, u, y, cfg.slack)?;
            e.insert(v);
        }
    }
    draws
        .par_iter()
        .map(|(u, y, xs)| {
            let (theta, in_t) = &cache[&(u.clone(), y.clone())];
            let t_size = in_t.iter().filter(|&&b| b).count().max(1) as f64;
            let pairs: Vec<Vec<usize>> = xs.iter().map(|x| side.pair(x, y)).collect();
            let (mut fails, mut tested) = (0usize, 0usize);
            for zi in 0..zs {
                if !in_t[zi] || theta[zi] < cfg.eps / t_size {
                    continue;
                }
                let z = index_to_seq(zi, side.nz(), n);
                let mean = pairs
                    .iter()
                    .map(|pr| product_prob(&side.we, pr, &z))
                    .filter(|&w| w <= cap)
                    .sum::<f64>()
                    / count as f64;
                tested += 1;
                if mean < (1.0 - cfg.eps) * theta[zi] || mean > (1.0 + cfg.eps) * theta[zi] {
                    fails += 1;
                }
            }
            Ok(if tested == 0 {
                0.0
            } else {
                fails as f64 / tested as f64
            })
        })
        .collect()
}

/// `L0`-level version with the reference measure estimated from
/// independent draws of `(U, X, Y)`.
fn aw1_event(side: &Side, cfg: &ConcentrationConfig, count: usize, tag: u64) -> Result<Vec<f64>> {
    let n = side.n;
    let nz = side.nz();
    let zs = pow_sat(nz, n) as usize;
    let cap = side.channel_cap(cfg.slack);
    let wide = 4.0 * (side.nx * side.ny * side.nu) as f64 * side.delta;
    let zlaw = TypicalLaw::Marginal(side.p_z.clone());
    let zseq: Vec<Vec<usize>> = (0..zs).map(|zi| index_to_seq(zi, nz, n)).collect();
    let in_wide = zseq
        .iter()
        .map(|z| side.member(zlaw.clone(), wide, z, None))
        .collect::<Result<Vec<_>>>()?;
    let t_delta = zseq
        .iter()
        .map(|z| side.member(zlaw.clone(), side.delta, z, None))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&b| b)
        .count()
        .max(1) as f64;
    let triple = |rng: &mut ChaCha8Rng| -> Result<Vec<usize>> {
        let (_, y, xs) = draw_block(side, 1, rng)?;
        Ok(side.pair(&xs[0], &y))
    };
    let e_law = |pair: &[usize]| -> Vec<f64> {
        zseq.iter()
            .zip(&in_wide)
            .map(|(z, &ok)| {
                if !ok {
                    return 0.0;
                }
                let w = product_prob(&side.we, pair, z);
                if w <= cap {
                    w
                } else {
                    0.0
                }
            })
            .collect()
    };
    let refs = (0..cfg.reference_draws)
        .into_par_iter()
        .map(|i| Ok(e_law(&triple(&mut stream(cfg.seed, tag + 1, i))?)))
        .collect::<Result<Vec<_>>>()?;
    let mut theta = vec![0.0; zs];
    for r in &refs {
        for (a, b) in theta.iter_mut().zip(r) {
            *a += b / refs.len() as f64;
        }
    }
    let f: Vec<usize> = (0..zs)
        .filter(|&zi| in_wide[zi] && theta[zi] >= cfg.eps / t_delta)
        .collect();
    (0..cfg.resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, tag, i);
            let mut mean = vec![0.0; zs];
            for _ in 0..count {
                for (a, b) in mean.iter_mut().zip(e_law(&triple(&mut rng)?)) {
                    *a += b / count as f64;
                }
            }
            let fails = f
                .iter()
                .filter(|&&zi| {
                    mean[zi] < (1.0 - cfg.eps) * theta[zi] || mean[zi] > (1.0 + cfg.eps) * theta[zi]
                })
                .count();
            Ok(if f.is_empty() {
                0.0
            } else {
                fails as f64 / f.len() as f64
            })
        })
        .collect()
}

/// Empirical failure frequencies of the concentration events of a random
/// codebook family against their Chernoff-type bounds.
///
/// Applicable events: the `L1` (and, roles exchanged, `L2`) conditional
/// typicality count and the `E2`-mixture concentration when `L1 > 1`
/// (`L2 > 1`); the `L0` versions when `L1 = L2 = 1`.
pub fn concentration_report(
    p: &FactoredInput,
    cfg: &ConcentrationConfig,
) -> Result<ConcentrationReport> {
    if cfg.n == 0 || cfg.resamples == 0 || cfg.l.contains(&0) {
        return Err(Error::validation(
            "n, resamples and the sizes L must be positive",
        ));
    }
    if !(cfg.eps > 0.0 && cfg.eps < 0.5) {
        return Err(Error::precondition(format!(
            "ε must lie in (0, 1/2), got {}",
            cfg.eps
        )));
    }
    if !(cfg.delta > 0.0) || !(cfg.slack >= 0.0) {
        return Err(Error::validation(
            "δ must be positive and the slack nonnegative",
        ));
    }
    let [l0, l1, l2] = cfg.l;
    let mut sides = Vec::new();
    if l1 > 1 {
        sides.push(("", Side::new(p, cfg.n, cfg.delta)?, l1, 1u64));
    }
    if l2 > 1 {
        sides.push(("'", Side::new(&p.swap_roles(), cfg.n, cfg.delta)?, l2, 3u64));
    }
    let l0_level = l1 == 1 && l2 == 1 && l0 > 1;
    if l0_level {
        sides.push(("", Side::new(p, cfg.n, cfg.delta)?, l0, 5u64));
    }
    let mut skipped: Vec<String> = ["joint", "theucase", "joint2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    if sides.is_empty() {
        skipped.push("all: no randomization size exceeds one".into());
        return Ok(ConcentrationReport {
            checks: Vec::new(),
            c_tilde: cfg.c_tilde.unwrap_or(f64::INFINITY),
            mu_min: 1.0,
            mu_lower: 1.0,
            partial: false,
            skipped,
        });
    }
    let mu_min = sides
        .iter()
        .map(|s| s.1.mu_min())
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(1.0, f64::min);
    let nd2 = cfg.n as f64 * cfg.delta * cfg.delta;
    let c_tilde = match cfg.c_tilde {
        Some(c) if c > 0.0 => c,
        Some(c) => return Err(Error::validation(format!("c̃ must be positive, got {c}"))),
        None if mu_min >= 1.0 => f64::INFINITY,
        None => -((1.0 - mu_min) / 2.0).log2() / nd2,
    };
    let mu_lower = (1.0 - 2.0 * 2f64.powf(-nd2 * c_tilde)).max(0.0);
    let mut checks = Vec::new();
    let mut partial = false;
    let e = cfg.eps;
    for (mark, side, count, tag) in &sides {
        let count = *count;
        let typ_bound = (-(count as f64) * e * e * mu_lower / (2.0 * LN_2)).exp();
        let mix_cells = pow_sat(side.nx, cfg.n).saturating_mul(pow_sat(side.nz(), cfg.n));
        if l0_level {
            let f = count_event_l0(side, count, mu_lower, e, cfg.seed, *tag, cfg.resamples)?;
            checks.push(check("lemgemtyp1", typ_bound, &f, false));
            let zc =
                pow_sat(side.nz(), cfg.n).saturating_mul(count.max(cfg.reference_draws) as u128);
            if zc > MAX_CELLS {
                partial = true;
                skipped.push(format!("AW1: |Z|^n × draws = {zc} over budget"));
                continue;
            }
            let exp = cfg.n as f64 * (side.i_z_xy + 2.0 * cfg.slack);
            let bound = 2.0 * (-(count as f64) * e.powi(3) * 2f64.powf(-exp) / (2.0 * LN_2)).exp();
            let f = aw1_event(side, cfg, count, tag + 10)?;
            checks.push(check("AW1", bound, &f, true));
        } else {
            let f = count_event(side, count, mu_lower, e, cfg.seed, *tag, cfg.resamples)?;
            checks.push(check(&format!("lemgemtyp3{mark}"), typ_bound, &f, false));
            if mix_cells > MAX_CELLS {
                partial = true;
                skipped.push(format!("AW3{mark}: |X|^n |Z|^n = {mix_cells} over budget"));
                continue;
            }
            let exp = cfg.n as f64 * (side.i_z_x_yu + 2.0 * cfg.slack);
            let bound = 2.0 * (-(count as f64) * e.powi(3) * 2f64.powf(-exp) / (2.0 * LN_2)).exp();
            let f = aw3_event(side, cfg, count, tag + 10)?;
            checks.push(check(&format!("AW3{mark}"), bound, &f, false));
        }
    }
    Ok(ConcentrationReport {
        checks,
        c_tilde,
        mu_min,
        mu_lower,
        partial,
        skipped,
    })
}

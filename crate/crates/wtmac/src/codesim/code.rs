//! Stochastic wiretap encoders on top of a codebook family, and the
//! joint-typicality decoder.

use serde::{Deserialize, Serialize};

use super::family::{sample_family_stream, CodeSizes, CodebookFamily};
use crate::probkit::{Channel, FactoredInput, JointDist};
use crate::regions::{elementary_region_profile, info_profile, CaseLabel, InfoProfile};
use crate::{Error, Result};

/// Slack added to the typicality comparison against rounding.
const COUNT_EPS: f64 = 1e-12;

/// Largest blocklength tried when estimating a feasible `n`.
const MAX_REQUIRED_N: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildConfig {
    /// Length of the first (α = 1 end) part.
    pub n: usize,
    /// Length of the second (α = 0 end) part; zero disables time-sharing.
    pub n_prime: usize,
    pub delta: f64,
    /// Additive window slack in bits per use.
    pub slack: f64,
    pub seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            n: 6,
            n_prime: 0,
            delta: 0.1,
            slack: 0.05,
            seed: 0,
        }
    }
}

/// One time-sharing block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodePart {
    pub family: CodebookFamily,
    /// End of the α-interval this block realizes (1 or 0).
    pub end: f64,
    /// Leakage rates `J_ν` the randomization sizes must cover; `None`
    /// where the size is forced to one.
    pub window: [Option<f64>; 3],
}

impl CodePart {
    pub fn n(&self) -> usize {
        self.family.n
    }

    pub fn sizes(&self) -> CodeSizes {
        self.family.sizes
    }

    /// Number of messages `K0 K1 K2` of this block.
    pub fn messages(&self) -> usize {
        self.family.sizes.messages()
    }

    pub fn message_index(&self, k: [usize; 3]) -> usize {
        let s = self.family.sizes.k;
        (k[0] * s[1] + k[1]) * s[2] + k[2]
    }

    pub fn message_tuple(&self, mut m: usize) -> [usize; 3] {
        let s = self.family.sizes.k;
        let k2 = m % s[2];
        m /= s[2];
        [m / s[1], m % s[1], k2]
    }

    /// Codeword pair sent for message `k` and randomization `l`.
    pub fn codeword(&self, k: [usize; 3], l: [usize; 3]) -> (&[usize], &[usize], &[usize]) {
        let f = &self.family;
        (
            f.u_word(k[0], l[0]),
            f.x_word(k[0], l[0], k[1], l[1]),
            f.y_word(k[0], l[0], k[2], l[2]),
        )
    }

    /// All `(k, l)` pairs in lexicographic order.
    pub(crate) fn tuples(&self) -> impl Iterator<Item = ([usize; 3], [usize; 3])> + '_ {
        let s = self.family.sizes;
        let m = s.messages();
        let r = s.randomization();
        (0..m).flat_map(move |mi| {
            let k = self.message_tuple(mi);
            (0..r).map(move |ri| {
                let l2 = ri % s.l[2];
                let rest = ri / s.l[2];
                (k, [rest / s.l[1], rest % s.l[1], l2])
            })
        })
    }
}

/// Decoded indices of one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartDecision {
    pub k: [usize; 3],
    pub l: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub parts: Vec<PartDecision>,
    /// Message `(m0, m1, m2)` of the whole code, mixed-radix over blocks.
    pub message: [usize; 3],
}

/// A wiretap code for the prefixed channel `V1 × V2 → T × Z`.
///
/// Encoder: `G0(l0|k0) = 1/L0`, `G1(·|k0,k1,l0)` uniform over the
/// `L1` words `x^{(k0 l0)(k1 l1)}`, likewise `G2`. Blocks of a time-shared
/// code carry independent message parts.
#[derive(Clone, Debug)]
pub struct WiretapCode {
    pub case: CaseLabel,
    pub hc: f64,
    pub rates: [f64; 3],
    pub delta: f64,
    pub slack: f64,
    pub parts: Vec<CodePart>,
    input: FactoredInput,
    law: JointDist,
}

impl WiretapCode {
    /// Wraps explicit families. `p` is the input on the original channel;
    /// codewords index its auxiliary alphabets.
    pub fn from_parts(
        p: &FactoredInput,
        case: CaseLabel,
        hc: f64,
        delta: f64,
        parts: Vec<CodePart>,
    ) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::validation("a code needs at least one block"));
        }
        if !(delta > 0.0) {
            return Err(Error::precondition("typicality needs δ > 0"));
        }
        let input = p.prefixed()?;
        let (nu, n1, n2) = input.aux_sizes();
        let mut log_l0 = 0.0;
        let mut total_n = 0;
        for part in &parts {
            let f = &part.family;
            if f.alphabets != [nu, n1, n2] {
                return Err(Error::validation(format!(
                    "family alphabets {:?} do not match the input ({nu}, {n1}, {n2})",
                    f.alphabets
                )));
            }
            let [w0, w1, w2] = f.sizes.words();
            if f.u.len() != w0 || f.x.len() != w0 || f.y.len() != w0 {
                return Err(Error::validation(
                    "family has the wrong number of U codewords",
                ));
            }
            for g0 in 0..w0 {
                if f.x[g0].len() != w1 || f.y[g0].len() != w2 {
                    return Err(Error::validation(
                        "family has the wrong number of X or Y codewords",
                    ));
                }
                let words = std::iter::once((&f.u[g0], nu))
                    .chain(f.x[g0].iter().map(|w| (w, n1)))
                    .chain(f.y[g0].iter().map(|w| (w, n2)));
                for (w, base) in words {
                    if w.len() != f.n || w.iter().any(|&a| a >= base) {
                        return Err(Error::validation(
                            "codeword of wrong length or with a symbol out of range",
                        ));
                    }
                }
            }
            if case == CaseLabel::Case0 && (f.sizes.k[0] != 1 || f.sizes.l[0] != 1) {
                return Err(Error::precondition("without common randomness K0 = L0 = 1"));
            }
            log_l0 += (f.sizes.l[0] as f64).log2();
            total_n += f.n;
        }
        if log_l0 > total_n as f64 * hc + 1e-9 {
            return Err(Error::Constraint(format!(
                "(1/n) log L0 = {} exceeds H_C = {hc}",
                log_l0 / total_n as f64
            )));
        }
        let law = input.reduced_joint()?.marginal(&[0, 1, 2, 3])?;
        Ok(WiretapCode {
            case,
            hc,
            rates: [0.0; 3],
            delta,
            slack: 0.0,
            parts,
            input,
            law,
        })
    }

    /// Input on the prefixed channel.
    pub fn input(&self) -> &FactoredInput {
        &self.input
    }

    /// Bob's prefixed channel, input index `v1·|V2| + v2`.
    pub fn bob(&self) -> Channel {
        self.input.mac().bob()
    }

    pub fn eve(&self) -> Channel {
        self.input.mac().eve()
    }

    pub fn total_n(&self) -> usize {
        self.parts.iter().map(|p| p.n()).sum()
    }

    /// `(K0, K1, K2)` of the whole code.
    pub fn message_sizes(&self) -> [usize; 3] {
        let mut k = [1usize; 3];
        for p in &self.parts {
            for (a, b) in k.iter_mut().zip(p.sizes().k) {
                *a *= b;
            }
        }
        k
    }

    pub fn messages(&self) -> usize {
        self.message_sizes().iter().product()
    }

    /// `(1/n) log K_ν`.
    pub fn realized_rates(&self) -> [f64; 3] {
        let n = self.total_n() as f64;
        self.message_sizes().map(|k| (k as f64).log2() / n)
    }

    /// `(1/n) log L_ν`.
    pub fn randomization_rates(&self) -> [f64; 3] {
        let n = self.total_n() as f64;
        let mut r = [0.0; 3];
        for p in &self.parts {
            for (a, l) in r.iter_mut().zip(p.sizes().l) {
                *a += (l as f64).log2();
            }
        }
        r.map(|v| v / n)
    }

    /// `(|U|, |V1|, |V2|, |T|)` of the decoder law.
    pub(crate) fn law_sizes(&self) -> [usize; 4] {
        let s = self.law.sizes();
        [s[0], s[1], s[2], s[3]]
    }

    /// Joint typicality of `(u, x, y, t)` against `P_{U V1 V2 T}`.
    pub(crate) fn typical(
        &self,
        u: &[usize],
        x: &[usize],
        y: &[usize],
        t: &[usize],
        delta: f64,
        counts: &mut Vec<usize>,
    ) -> bool {
        let [_, n1, n2, nt] = self.law_sizes();
        let mass = self.law.mass();
        counts.clear();
        counts.resize(mass.len(), 0);
        for i in 0..t.len() {
            counts[((u[i] * n1 + x[i]) * n2 + y[i]) * nt + t[i]] += 1;
        }
        let n = t.len() as f64;
        counts.iter().zip(mass).all(|(&c, &p)| {
            if p == 0.0 {
                c == 0
            } else {
                (c as f64 / n - p).abs() <= delta + COUNT_EPS
            }
        })
    }

    /// Unique jointly typical `(k, l)` of one block, `None` on no match or
    /// on a tie.
    pub(crate) fn decode_part(
        &self,
        part: &CodePart,
        t: &[usize],
        delta: f64,
        counts: &mut Vec<usize>,
    ) -> Option<PartDecision> {
        let mut found = None;
        for (k, l) in part.tuples() {
            let (u, x, y) = part.codeword(k, l);
            if self.typical(u, x, y, t, delta, counts) {
                if found.is_some() {
                    return None;
                }
                found = Some(PartDecision { k, l });
            }
        }
        found
    }

    /// Combines per-block message tuples into the message of the code.
    pub(crate) fn combine(&self, ks: &[[usize; 3]]) -> [usize; 3] {
        let mut m = [0usize; 3];
        for (part, k) in self.parts.iter().zip(ks) {
            for nu in 0..3 {
                m[nu] = m[nu] * part.sizes().k[nu] + k[nu];
            }
        }
        m
    }
}

/// Decides for the unique tuple whose codewords are jointly typical with
/// `t` (blocks concatenated in order); ties and misses are failures.
pub fn joint_typicality_decode(
    code: &WiretapCode,
    delta: f64,
    t: &[usize],
) -> Result<Option<Decision>> {
    if t.len() != code.total_n() {
        return Err(Error::validation(format!(
            "output length {} does not match blocklength {}",
            t.len(),
            code.total_n()
        )));
    }
    let nt = code.law_sizes()[3];
    if let Some(&s) = t.iter().find(|&&s| s >= nt) {
        return Err(Error::validation(format!("output symbol {s} out of range")));
    }
    let mut counts = Vec::new();
    let mut parts = Vec::with_capacity(code.parts.len());
    let mut start = 0;
    for part in &code.parts {
        match code.decode_part(part, &t[start..start + part.n()], delta, &mut counts) {
            Some(d) => parts.push(d),
            None => return Ok(None),
        }
        start += part.n();
    }
    let ks: Vec<[usize; 3]> = parts.iter().map(|d| d.k).collect();
    let message = code.combine(&ks);
    Ok(Some(Decision { parts, message }))
}

/// Leakage rates each randomization size must cover at one α-end, with
/// `None` marking a size forced to one.
pub fn window_rates(prof: &InfoProfile, case: CaseLabel, end_one: bool) -> [Option<f64>; 3] {
    let p = prof;
    match (case, end_one) {
        (CaseLabel::Case0, true) => [None, Some(p.z_v1_g_v2u), Some(p.z_v2_g_u)],
        (CaseLabel::Case0, false) => [None, Some(p.z_v1_g_u), Some(p.z_v2_g_v1u)],
        (CaseLabel::Case1, true) => [Some(p.z_u), Some(p.z_v1_g_v2u), Some(p.z_v2_g_u)],
        (CaseLabel::Case1, false) => [Some(p.z_u), Some(p.z_v1_g_u), Some(p.z_v2_g_v1u)],
        (CaseLabel::Case2, true) => [Some(p.z_v2u), Some(p.z_v1_g_v2u), None],
        (CaseLabel::Case2, false) => [Some(p.z_v1u), None, Some(p.z_v2_g_v1u)],
        (CaseLabel::Case3, _) => [Some(p.z_v1v2), None, None],
    }
}

fn size_for(n: usize, rate: f64) -> f64 {
    (2f64.powf(n as f64 * rate) - 1e-9).ceil().max(1.0)
}

fn l0_cap(n: usize, hc: f64) -> f64 {
    (2f64.powf(n as f64 * hc) + 1e-9).floor()
}

/// Message and randomization sizes of one block of length `n`.
fn block_sizes(
    n: usize,
    rates: [f64; 3],
    window: [Option<f64>; 3],
    case: CaseLabel,
    hc: f64,
    slack: f64,
) -> Result<CodeSizes> {
    let mut k = rates.map(|r| ((2f64.powf(n as f64 * r) + 1e-9).floor() as usize).max(1));
    if case == CaseLabel::Case0 {
        k[0] = 1;
    }
    let mut l = [1usize; 3];
    for nu in 0..3 {
        if let Some(j) = window[nu] {
            let size = size_for(n, j + slack);
            if size > u32::MAX as f64 {
                return Err(Error::resource(
                    "randomization index",
                    size as u128,
                    u32::MAX as u128,
                ));
            }
            l[nu] = size as usize;
        }
    }
    if let Some(j0) = window[0] {
        if j0 + slack > hc {
            return Err(Error::precondition(format!(
                "L0 window starts at {} bits per use, above H_C = {hc}",
                j0 + slack
            )));
        }
        if l[0] as f64 > l0_cap(n, hc) {
            let required_n = (n + 1..=MAX_REQUIRED_N)
                .find(|&m| size_for(m, j0 + slack) <= l0_cap(m, hc))
                .unwrap_or(MAX_REQUIRED_N);
            return Err(Error::BlocklengthTooSmall {
                reason: format!(
                    "no integer L0 in [2^(n·{:.6}), 2^(n·{hc})] at n = {n}",
                    j0 + slack
                ),
                required_n,
            });
        }
    }
    CodeSizes::new(k, l)
}

/// Random code for `case` at rate target `rates = (R0, R1, R2)`.
///
/// The two blocks (lengths `n` and `n′`) realize the α = 1 and α = 0 ends,
/// so the time-sharing fraction is `n/(n+n′)`; each block carries the full
/// rate target per use and randomization sized by its window.
pub fn build_wiretap_code(
    p: &FactoredInput,
    case: CaseLabel,
    rates: [f64; 3],
    hc: f64,
    cfg: &BuildConfig,
) -> Result<WiretapCode> {
    if cfg.n + cfg.n_prime == 0 {
        return Err(Error::validation("total blocklength must be positive"));
    }
    if !(cfg.slack >= 0.0 && cfg.slack.is_finite()) {
        return Err(Error::validation(
            "slack must be a finite nonnegative number",
        ));
    }
    if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) || !(hc.is_finite() && hc >= 0.0) {
        return Err(Error::validation(
            "rates and H_C must be finite and nonnegative",
        ));
    }
    let prof = info_profile(p)?;
    let alpha = cfg.n as f64 / (cfg.n + cfg.n_prime) as f64;
    let region = elementary_region_profile(&prof, hc, case, alpha)?;
    if !region.contains(&rates, 1e-9)? {
        return Err(Error::precondition(format!(
            "rate target {rates:?} is outside the {case} elementary region at α = {alpha}"
        )));
    }
    let prefixed = p.prefixed()?;
    let mut parts = Vec::new();
    for (idx, (len, end_one)) in [(cfg.n, true), (cfg.n_prime, false)]
        .into_iter()
        .enumerate()
    {
        if len == 0 {
            continue;
        }
        let window = window_rates(&prof, case, end_one);
        let sizes = block_sizes(len, rates, window, case, hc, cfg.slack)?;
        let family =
            sample_family_stream(&prefixed, len, sizes, cfg.delta, cfg.seed, idx as u64 + 1)?;
        parts.push(CodePart {
            family,
            end: if end_one { 1.0 } else { 0.0 },
            window,
        });
    }
    let mut code = WiretapCode::from_parts(p, case, hc, cfg.delta, parts)?;
    code.rates = rates;
    code.slack = cfg.slack;
    Ok(code)
}

//! Exact and Monte Carlo performance of wiretap codes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::secrecy_from_variation;
use super::code::{CodePart, WiretapCode};
use crate::probkit::seq::{index_to_seq, output_law_pair, product_prob};
use crate::probkit::{check_budget, entropy, pow_sat, variation_distance, Channel};
use crate::regions::CaseLabel;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ErrorMode {
    Exact,
    MonteCarlo { trials: usize, seed: u64 },
}

/// Probability estimate with a 95% interval (degenerate when exact).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Zero for exact evaluation.
    pub trials: usize,
}

impl ErrorEstimate {
    fn exact(v: f64) -> Self {
        ErrorEstimate {
            value: v,
            ci_low: v,
            ci_high: v,
            trials: 0,
        }
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(failures: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054;
    let n = trials as f64;
    let ph = failures as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (ph + z * z / (2.0 * n)) / denom;
    let half = z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if failures == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

/// Error of the deterministic MAC code behind a stochastic code, whose
/// messages are the full index tuples `(k, l)` under a uniform prior.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacError {
    /// `P[decoded k ≠ sent k]`.
    pub message_part: f64,
    /// `P[decoded (k, l) ≠ sent (k, l)]`.
    pub full_tuple: f64,
}

fn check_bob(code: &WiretapCode, wb: &Channel) -> Result<()> {
    let [_, n1, n2, nt] = code.law_sizes();
    if wb.n_in() != n1 * n2 || wb.n_out() != nt {
        return Err(Error::validation(format!(
            "Bob's channel is {}×{}, the code needs {}×{nt}",
            wb.n_in(),
            wb.n_out(),
            n1 * n2
        )));
    }
    Ok(())
}

fn check_eve(code: &WiretapCode, we: &Channel) -> Result<()> {
    let [_, n1, n2, _] = code.law_sizes();
    if we.n_in() != n1 * n2 {
        return Err(Error::validation(format!(
            "Eve's channel has {} inputs, the code needs {}",
            we.n_in(),
            n1 * n2
        )));
    }
    Ok(())
}

fn n2(code: &WiretapCode) -> usize {
    code.law_sizes()[2]
}

fn tuple_count(part: &CodePart) -> u128 {
    part.messages() as u128 * part.sizes().randomization() as u128
}

/// Decoder output for every `t ∈ T^n` of one block.
fn decode_table(
    code: &WiretapCode,
    part: &CodePart,
    nt: usize,
) -> Result<Vec<Option<super::code::PartDecision>>> {
    let outs = pow_sat(nt, part.n());
    check_budget(
        "exact decoding table",
        outs.saturating_mul(tuple_count(part)),
    )?;
    Ok((0..outs as usize)
        .into_par_iter()
        .map_init(Vec::new, |counts, ti| {
            let t = index_to_seq(ti, nt, part.n());
            code.decode_part(part, &t, code.delta, counts)
        })
        .collect())
}

/// Per-block success probabilities `(stochastic, mac message part, mac full tuple)`.
fn part_success(code: &WiretapCode, part: &CodePart, wb: &Channel) -> Result<(f64, f64, f64)> {
    let nt = wb.n_out();
    let table = decode_table(code, part, nt)?;
    let (nm, nr) = (part.messages(), part.sizes().randomization());
    // stochastic code: mix the output law over l first
    let stochastic: Vec<f64> = (0..nm)
        .into_par_iter()
        .map(|m| -> Result<f64> {
            let k = part.message_tuple(m);
            let mut mix = vec![0.0; table.len()];
            for (_, l) in part.tuples().skip(m * nr).take(nr) {
                let (_, x, y) = part.codeword(k, l);
                for (a, b) in mix.iter_mut().zip(output_law_pair(wb, n2(code), x, y)?) {
                    *a += b / nr as f64;
                }
            }
            Ok(mix
                .iter()
                .zip(&table)
                .filter(|(_, d)| d.is_some_and(|d| d.k == k))
                .map(|(p, _)| p)
                .sum())
        })
        .collect::<Result<_>>()?;
    // MAC view: one deterministic codeword per (k, l)
    let tuples: Vec<_> = part.tuples().collect();
    let mac: Vec<(f64, f64)> = tuples
        .par_iter()
        .map(|&(k, l)| -> Result<(f64, f64)> {
            let (_, x, y) = part.codeword(k, l);
            let law = output_law_pair(wb, n2(code), x, y)?;
            let (mut msg, mut full) = (0.0, 0.0);
            for (p, d) in law.iter().zip(&table) {
                if let Some(d) = d {
                    if d.k == k {
                        msg += p;
                        if d.l == l {
                            full += p;
                        }
                    }
                }
            }
            Ok((msg, full))
        })
        .collect::<Result<_>>()?;
    let s = stochastic.iter().sum::<f64>() / nm as f64;
    let total = tuples.len() as f64;
    let m = mac.iter().map(|v| v.0).sum::<f64>() / total;
    let f = mac.iter().map(|v| v.1).sum::<f64>() / total;
    Ok((s, m, f))
}

/// Exact error of the stochastic code and of its underlying MAC code.
pub fn exact_errors(code: &WiretapCode, wb: &Channel) -> Result<(f64, MacError)> {
    check_bob(code, wb)?;
    let (mut s, mut m, mut f) = (1.0, 1.0, 1.0);
    for part in &code.parts {
        let (a, b, c) = part_success(code, part, wb)?;
        s *= a;
        m *= b;
        f *= c;
    }
    Ok((
        1.0 - s,
        MacError {
            message_part: 1.0 - m,
            full_tuple: 1.0 - f,
        },
    ))
}

/// Error of the underlying deterministic MAC code.
pub fn mac_code_error(code: &WiretapCode, wb: &Channel) -> Result<MacError> {
    Ok(exact_errors(code, wb)?.1)
}

/// Cumulative rows for inverse-CDF draws.
fn cumulative(ch: &Channel) -> Vec<Vec<f64>> {
    (0..ch.n_in())
        .map(|i| {
            let mut acc = 0.0;
            ch.row(i)
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect()
        })
        .collect()
}

fn draw(cum: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let r: f64 = rng.gen::<f64>() * cum[cum.len() - 1];
    cum.iter().position(|&c| r < c).unwrap_or(cum.len() - 1)
}

/// Sends a uniformly random message with uniform randomization; returns
/// `(message tuples per block, (k, l) per block, channel output)`.
fn transmit(
    code: &WiretapCode,
    cum: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Vec<[usize; 3]>, Vec<usize>) {
    let n2 = n2(code);
    let mut ms = Vec::new();
    let mut ks = Vec::new();
    let mut out = Vec::with_capacity(code.total_n());
    for part in &code.parts {
        let s = part.sizes();
        let m = rng.gen_range(0..part.messages());
        let k = part.message_tuple(m);
        let l = [
            rng.gen_range(0..s.l[0]),
            rng.gen_range(0..s.l[1]),
            rng.gen_range(0..s.l[2]),
        ];
        let (_, x, y) = part.codeword(k, l);
        for (&a, &b) in x.iter().zip(y) {
            out.push(draw(&cum[a * n2 + b], rng));
        }
        ms.push(m);
        ks.push(k);
    }
    (ms, ks, out)
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// `P[φ(T^n) ≠ (M0, M1, M2)]` under uniform messages.
pub fn average_error(code: &WiretapCode, wb: &Channel, mode: ErrorMode) -> Result<ErrorEstimate> {
    check_bob(code, wb)?;
    match mode {
        ErrorMode::Exact => Ok(ErrorEstimate::exact(exact_errors(code, wb)?.0)),
        ErrorMode::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::validation("Monte Carlo needs at least one trial"));
            }
            let cum = cumulative(wb);
            let failures: usize = (0..trials)
                .into_par_iter()
                .map_init(Vec::new, |counts, i| {
                    let mut rng = trial_rng(seed, i);
                    let (_, ks, t) = transmit(code, &cum, &mut rng);
                    let mut start = 0;
                    for (part, k) in code.parts.iter().zip(&ks) {
                        let d =
                            code.decode_part(part, &t[start..start + part.n()], code.delta, counts);
                        if d.is_none_or(|d| d.k != *k) {
                            return 1;
                        }
                        start += part.n();
                    }
                    0
                })
                .sum();
            let (lo, hi) = wilson_interval(failures, trials);
            Ok(ErrorEstimate {
                value: failures as f64 / trials as f64,
                ci_low: lo,
                ci_high: hi,
                trials,
            })
        }
    }
}

/// `P_{Z^n|M=m}` for every message of one block.
fn eve_laws(code: &WiretapCode, part: &CodePart, we: &Channel) -> Result<Vec<Vec<f64>>> {
    let outs = pow_sat(we.n_out(), part.n());
    check_budget("exact leakage", outs.saturating_mul(tuple_count(part)))?;
    let nr = part.sizes().randomization();
    (0..part.messages())
        .into_par_iter()
        .map(|m| {
            let k = part.message_tuple(m);
            let mut mix = vec![0.0; outs as usize];
            for (_, l) in part.tuples().skip(m * nr).take(nr) {
                let (_, x, y) = part.codeword(k, l);
                for (a, b) in mix.iter_mut().zip(output_law_pair(we, n2(code), x, y)?) {
                    *a += b / nr as f64;
                }
            }
            Ok(mix)
        })
        .collect()
}

fn average(laws: &[Vec<f64>]) -> Vec<f64> {
    let mut avg = vec![0.0; laws[0].len()];
    for law in laws {
        for (a, b) in avg.iter_mut().zip(law) {
            *a += b;
        }
    }
    avg.iter_mut().for_each(|a| *a /= laws.len() as f64);
    avg
}

/// Eve's view of a code, from exact enumeration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EveAnalysis {
    /// `I(Z^n ∧ M0 M1 M2)` in bits.
    pub leakage: f64,
    /// `max_m ‖P_{Z^n} − P_{Z^n|M=m}‖` (L1).
    pub max_variation: f64,
    /// Average over messages of the total variation `‖·‖/2`.
    pub mean_total_variation: f64,
    /// Average error of Eve's MAP decoder.
    pub map_error: f64,
}

/// One block: leakage, per-message L1 variations, MAP success, laws.
struct BlockView {
    leakage: f64,
    laws: Vec<Vec<f64>>,
    avg: Vec<f64>,
    map_success: f64,
}

fn block_view(code: &WiretapCode, part: &CodePart, we: &Channel) -> Result<BlockView> {
    let laws = eve_laws(code, part, we)?;
    let avg = average(&laws);
    let h_cond = laws.iter().map(|l| entropy(l)).sum::<Result<f64>>()? / laws.len() as f64;
    let leakage = (entropy(&avg)? - h_cond).max(0.0);
    let map_success = (0..avg.len())
        .map(|z| laws.iter().map(|l| l[z]).fold(0.0, f64::max))
        .sum::<f64>()
        / laws.len() as f64;
    Ok(BlockView {
        leakage,
        laws,
        avg,
        map_success,
    })
}

fn tensor(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

pub fn eve_analysis(code: &WiretapCode, we: &Channel) -> Result<EveAnalysis> {
    check_eve(code, we)?;
    let views = code
        .parts
        .iter()
        .map(|p| block_view(code, p, we))
        .collect::<Result<Vec<_>>>()?;
    let leakage = views.iter().map(|v| v.leakage).sum();
    let map_error = 1.0 - views.iter().map(|v| v.map_success).product::<f64>();
    // variations of the product laws over all message combinations
    let mut joint: Vec<Vec<f64>> = vec![vec![1.0]];
    let mut avg = vec![1.0];
    for v in &views {
        let cells = pow_sat(we.n_out(), code.total_n())
            .saturating_mul(joint.len() as u128 * v.laws.len() as u128);
        check_budget("joint message laws", cells)?;
        joint = joint
            .iter()
            .flat_map(|a| v.laws.iter().map(move |b| tensor(a, b)))
            .collect();
        avg = tensor(&avg, &v.avg);
    }
    let vars = joint
        .iter()
        .map(|l| variation_distance(l, &avg))
        .collect::<Result<Vec<_>>>()?;
    Ok(EveAnalysis {
        leakage,
        max_variation: vars.iter().cloned().fold(0.0, f64::max),
        mean_total_variation: vars.iter().sum::<f64>() / (2.0 * vars.len() as f64),
        map_error,
    })
}

/// `I(Z^n ∧ M)` by enumeration of `P_{Z^n|M=m}`.
pub fn exact_leakage(code: &WiretapCode, we: &Channel) -> Result<f64> {
    check_eve(code, we)?;
    code.parts
        .iter()
        .map(|p| Ok(block_view(code, p, we)?.leakage))
        .sum()
}

/// Average error of Eve's maximum-a-posteriori message decoder.
pub fn eve_map_error(code: &WiretapCode, we: &Channel) -> Result<f64> {
    check_eve(code, we)?;
    let mut success = 1.0;
    for p in &code.parts {
        success *= block_view(code, p, we)?.map_success;
    }
    Ok(1.0 - success)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageEstimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// `P_{Z|M=m}(z)` of one block at an explicit output, by summing over
/// randomization.
fn point_law(code: &WiretapCode, part: &CodePart, we: &Channel, m: usize, z: &[usize]) -> f64 {
    let k = part.message_tuple(m);
    let nr = part.sizes().randomization();
    let n2 = n2(code);
    part.tuples()
        .skip(m * nr)
        .take(nr)
        .map(|(_, l)| {
            let (_, x, y) = part.codeword(k, l);
            let pair: Vec<usize> = x.iter().zip(y).map(|(&a, &b)| a * n2 + b).collect();
            product_prob(we, &pair, z)
        })
        .sum::<f64>()
        / nr as f64
}

/// Unbiased Monte Carlo estimate of `I(Z^n ∧ M)` as the mean of
/// `log P(z|m)/P(z)` over simulated transmissions.
pub fn mc_leakage(
    code: &WiretapCode,
    we: &Channel,
    trials: usize,
    seed: u64,
) -> Result<LeakageEstimate> {
    check_eve(code, we)?;
    if trials < 2 {
        return Err(Error::validation(
            "Monte Carlo leakage needs at least two trials",
        ));
    }
    let cum = cumulative(we);
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let (ms, _, z) = transmit(code, &cum, &mut rng);
            let mut start = 0;
            let mut s = 0.0;
            for (part, &m) in code.parts.iter().zip(&ms) {
                let zp = &z[start..start + part.n()];
                let cond = point_law(code, part, we, m, zp);
                let marg = (0..part.messages())
                    .map(|mm| point_law(code, part, we, mm, zp))
                    .sum::<f64>()
                    / part.messages() as f64;
                s += (cond / marg).log2();
                start += part.n();
            }
            s
        })
        .collect();
    let n = trials as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(LeakageEstimate {
        value: mean,
        stderr: (var / n).sqrt(),
        trials,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub mode: ErrorMode,
    /// Monte Carlo leakage trials when the exact computation is skipped.
    pub leakage_trials: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mode: ErrorMode::Exact,
            leakage_trials: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub case: CaseLabel,
    /// Block lengths.
    pub n: Vec<usize>,
    pub target_rates: [f64; 3],
    pub realized_rates: [f64; 3],
    pub randomization_rates: [f64; 3],
    pub message_sizes: [usize; 3],
    pub error: ErrorEstimate,
    pub mac_error: Option<MacError>,
    /// Exact leakage in bits, or the Monte Carlo estimate.
    pub leakage: f64,
    pub leakage_stderr: f64,
    pub max_variation: Option<f64>,
    /// `ε log(|Z|^n/ε)` at the measured variation, when `ε ≤ 1/2`.
    pub variation_bound: Option<f64>,
    pub eve_map_error: Option<f64>,
    /// `1 − 1/K − mean total variation`.
    pub eve_map_lower_tv: Option<f64>,
    /// `1 − 1/K − sqrt(I ln 2 / 2)`.
    pub eve_map_lower_pinsker: Option<f64>,
    pub seeds: Vec<u64>,
    pub delta: f64,
    pub slack: f64,
    pub hc: f64,
}

/// Runs the error and secrecy evaluations of `code` on its own channel.
pub fn simulate(code: &WiretapCode, cfg: &SimConfig) -> Result<SimReport> {
    let (wb, we) = (code.bob(), code.eve());
    let k = code.messages() as f64;
    let (error, mac_error) = match cfg.mode {
        ErrorMode::Exact => {
            let (e, m) = exact_errors(code, &wb)?;
            (ErrorEstimate::exact(e), Some(m))
        }
        mc => (average_error(code, &wb, mc)?, None),
    };
    let mut report = SimReport {
        case: code.case,
        n: code.parts.iter().map(|p| p.n()).collect(),
        target_rates: code.rates,
        realized_rates: code.realized_rates(),
        randomization_rates: code.randomization_rates(),
        message_sizes: code.message_sizes(),
        error,
        mac_error,
        leakage: 0.0,
        leakage_stderr: 0.0,
        max_variation: None,
        variation_bound: None,
        eve_map_error: None,
        eve_map_lower_tv: None,
        eve_map_lower_pinsker: None,
        seeds: code.parts.iter().map(|p| p.family.seed).collect(),
        delta: code.delta,
        slack: code.slack,
        hc: code.hc,
    };
    match (cfg.mode, eve_analysis(code, &we)) {
        (_, Ok(a)) => {
            report.leakage = a.leakage;
            report.max_variation = Some(a.max_variation);
            if a.max_variation <= 0.5 {
                report.variation_bound = Some(secrecy_from_variation(
                    a.max_variation,
                    we.n_out(),
                    code.total_n(),
                )?);
            }
            report.eve_map_error = Some(a.map_error);
            report.eve_map_lower_tv = Some(1.0 - 1.0 / k - a.mean_total_variation);
            report.eve_map_lower_pinsker =
                Some(1.0 - 1.0 / k - (a.leakage * std::f64::consts::LN_2 / 2.0).sqrt());
        }
        (ErrorMode::MonteCarlo { seed, .. }, Err(Error::Resource { .. })) => {
            let est = mc_leakage(code, &we, cfg.leakage_trials, seed)?;
            report.leakage = est.value;
            report.leakage_stderr = est.stderr;
        }
        (_, Err(e)) => return Err(e),
    }
    Ok(report)
}

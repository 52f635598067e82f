//! Randomized search over `p ∈ Π` for inner estimates of the achievable
//! regions and of the single-sender secrecy capacity.
//!
//! Every reported point comes with the input that generates it and is
//! re-checked against that input's region before it is returned. The
//! estimates are inner bounds only: the auxiliary alphabets `V1`, `V2`
//! have no known cardinality bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conferencing::{
    convex_hull_2d, region_conferencing_profile, ConfRegion, ConferencingCapacities,
};
use crate::probkit::{Channel, Dist, FactoredInput, FactoredJson, WiretapMAC};
use crate::regions::{
    classify_profile, info_profile, region_from_profile, CaseLabel, InfoProfile, RatePolytope,
};
use crate::{Error, Result};

/// Channel prefixing `W̃(t,z|v1,v2) = Σ W(t,z|x,y) P(x|v1) P(y|v2)`.
pub fn prefix_channel(
    w: &WiretapMAC,
    x_given_v1: &Channel,
    y_given_v2: &Channel,
) -> Result<WiretapMAC> {
    w.prefixed(x_given_v1, y_given_v2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SearchMode {
    /// Common message and common randomness `H_C`; points are `(R0, R1, R2)`.
    Common { hc: f64 },
    /// Conferencing encoders; points are `(R1, R2)`.
    Conferencing { c1: f64, c2: f64 },
}

impl SearchMode {
    pub fn dim(&self) -> usize {
        match self {
            SearchMode::Common { .. } => 3,
            SearchMode::Conferencing { .. } => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// `|U|`; `None` means `|X||Y| + 5`.
    pub u_size: Option<usize>,
    /// `|V1|`; `None` means `|X|`.
    pub v1_size: Option<usize>,
    /// `|V2|`; `None` means `|Y|`.
    pub v2_size: Option<usize>,
    /// Restrict to `|U| = 1`, i.e. independent channel inputs.
    pub independent_only: bool,
    /// Search over the prefix channels `P_{X|V1}`, `P_{Y|V2}`; otherwise
    /// `V1 = X` and `V2 = Y`.
    pub prefixing: bool,
    /// Scalarization directions (weights on the simplex).
    pub directions: usize,
    pub restarts: usize,
    /// Local moves per restart.
    pub refine_iters: usize,
    /// Initial and final probability mass moved by one local move.
    pub step_start: f64,
    pub step_end: f64,
    /// α values used for Case-2 conferencing regions.
    pub alpha_grid: usize,
    /// Upper bound on objective evaluations; beyond it the refinement is cut
    /// and the estimate is flagged partial.
    pub max_evaluations: u64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            u_size: None,
            v1_size: None,
            v2_size: None,
            independent_only: false,
            prefixing: true,
            directions: 64,
            restarts: 8,
            refine_iters: 2000,
            step_start: 0.2,
            step_end: 1e-4,
            alpha_grid: 21,
            max_evaluations: 5_000_000,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let sizes = [self.u_size, self.v1_size, self.v2_size];
        if sizes.contains(&Some(0)) {
            return Err(Error::validation("auxiliary alphabet sizes must be >= 1"));
        }
        if self.directions == 0 || self.restarts == 0 {
            return Err(Error::validation(
                "search needs at least one direction and one restart",
            ));
        }
        if !(self.step_start > 0.0
            && self.step_end > 0.0
            && self.step_end <= self.step_start
            && self.step_start <= 1.0)
        {
            return Err(Error::validation(
                "step schedule must satisfy 0 < step_end <= step_start <= 1",
            ));
        }
        if self.alpha_grid == 0 {
            return Err(Error::validation("alpha grid needs at least one point"));
        }
        Ok(())
    }

    fn sizes(&self, w: &WiretapMAC) -> (usize, usize, usize) {
        let u = if self.independent_only {
            1
        } else {
            self.u_size.unwrap_or(w.nx() * w.ny() + 5)
        };
        if self.prefixing {
            (
                u,
                self.v1_size.unwrap_or(w.nx()),
                self.v2_size.unwrap_or(w.ny()),
            )
        } else {
            (u, w.nx(), w.ny())
        }
    }
}

/// Factor tables of one candidate input.
#[derive(Clone, Debug)]
struct Factors {
    /// `p_u`, then the rows of `V1|U`, `V2|U`, `X|V1`, `Y|V2` as separate simplices.
    blocks: Vec<Vec<Vec<f64>>>,
    prefixing: bool,
}

/// Starting point families, cycled over the restarts.
#[derive(Clone, Copy, Debug)]
enum Start {
    /// Every row drawn uniformly from its simplex.
    Spread,
    /// Deterministic auxiliary and prefix maps with spread `P_U`.
    Deterministic,
    /// Deterministic maps where both senders apply the same function of `U`
    /// wherever the alphabets allow it: fully correlated inputs.
    Coupled,
}

impl Start {
    fn of_restart(r: usize) -> Start {
        [Start::Spread, Start::Deterministic, Start::Coupled][r % 3]
    }
}

fn vertex(cols: usize, i: usize) -> Vec<f64> {
    let mut r = vec![0.0; cols];
    r[i] = 1.0;
    r
}

impl Factors {
    fn random<R: Rng + ?Sized>(
        rng: &mut R,
        w: &WiretapMAC,
        sizes: (usize, usize, usize),
        prefixing: bool,
        start: Start,
    ) -> Self {
        let (nu, n1, n2) = sizes;
        let table = |rng: &mut R, rows: usize, cols: usize| -> Vec<Vec<f64>> {
            (0..rows)
                .map(|_| match start {
                    Start::Spread => simplex(rng, cols),
                    _ => vertex(cols, rng.gen_range(0..cols)),
                })
                .collect()
        };
        let mut blocks = vec![vec![simplex(rng, nu)], table(rng, nu, n1)];
        let v2 = table(rng, nu, n2);
        let v2 = match start {
            Start::Coupled => blocks[1]
                .iter()
                .zip(v2)
                .map(|(a, b)| copy_vertex(a, b))
                .collect(),
            _ => v2,
        };
        blocks.push(v2);
        if prefixing {
            // coupled prefixes are cyclic shifts, injective where the sizes allow
            let x = match start {
                Start::Coupled => {
                    let off = rng.gen_range(0..w.nx());
                    (0..n1)
                        .map(|i| vertex(w.nx(), (i + off) % w.nx()))
                        .collect()
                }
                _ => table(rng, n1, w.nx()),
            };
            let y = table(rng, n2, w.ny());
            let y = match start {
                Start::Coupled if n1 == n2 => {
                    x.iter().zip(y).map(|(a, b)| copy_vertex(a, b)).collect()
                }
                _ => y,
            };
            blocks.push(x);
            blocks.push(y);
        }
        Factors { blocks, prefixing }
    }

    fn input(&self, w: &WiretapMAC) -> Result<FactoredInput> {
        let (x, y) = if self.prefixing {
            (
                Channel::from_arith(self.blocks[3].clone())?,
                Channel::from_arith(self.blocks[4].clone())?,
            )
        } else {
            (Channel::identity(w.nx())?, Channel::identity(w.ny())?)
        };
        FactoredInput::new(
            Dist::from_arith(self.blocks[0][0].clone())?,
            Channel::from_arith(self.blocks[1].clone())?,
            Channel::from_arith(self.blocks[2].clone())?,
            x,
            y,
            w.clone(),
        )
    }

    /// One random local move on one row: usually a mass transfer of size
    /// at most `step` between two entries, sometimes a jump to a vertex.
    fn perturbed<R: Rng + ?Sized>(&self, rng: &mut R, step: f64) -> Option<Factors> {
        // block first, then a row, so the single row of P_U is not starved
        let blocks: Vec<usize> = (0..self.blocks.len())
            .filter(|&b| self.blocks[b][0].len() > 1)
            .collect();
        if blocks.is_empty() {
            return None;
        }
        let b = blocks[rng.gen_range(0..blocks.len())];
        let r = rng.gen_range(0..self.blocks[b].len());
        let mut next = self.clone();
        let row = &mut next.blocks[b][r];
        // P_U stays spread; the conditional rows may jump to a vertex
        if b > 0 && rng.gen_bool(0.15) {
            *row = vertex(row.len(), rng.gen_range(0..row.len()));
            return Some(next);
        }
        let support: Vec<usize> = (0..row.len()).filter(|&k| row[k] > 0.0).collect();
        let i = support[rng.gen_range(0..support.len())];
        let mut j = rng.gen_range(0..row.len() - 1);
        if j >= i {
            j += 1;
        }
        let delta = (step * rng.gen_range(0.0..1.0)).min(row[i]);
        row[i] -= delta;
        row[j] += delta;
        Some(next)
    }
}

/// `b` reshaped to put its unit mass where `a` has it, when both are vertices of the same size.
fn copy_vertex(a: &[f64], b: Vec<f64>) -> Vec<f64> {
    match a.iter().position(|&x| x == 1.0) {
        Some(i) if i < b.len() => vertex(b.len(), i),
        _ => b,
    }
}

/// Hill climbing with a geometric step schedule; moves that do not lower
/// the score are accepted so that flat plateaus are crossed.
fn refine<R: Rng + ?Sized, S, F>(
    rng: &mut R,
    start: Factors,
    iters: usize,
    cfg: &SearchConfig,
    mut eval: F,
) -> Result<(Factors, f64, S, u64)>
where
    F: FnMut(&Factors) -> Result<(f64, S)>,
{
    let mut cur = start;
    let (mut cur_score, mut cur_aux) = eval(&cur)?;
    let mut evaluations = 1;
    for k in 0..iters {
        let frac = if iters > 1 {
            k as f64 / (iters - 1) as f64
        } else {
            1.0
        };
        let step = cfg.step_start * (cfg.step_end / cfg.step_start).powf(frac);
        let Some(next) = cur.perturbed(rng, step) else {
            break;
        };
        let (s, aux) = eval(&next)?;
        evaluations += 1;
        if s >= cur_score {
            cur = next;
            cur_score = s;
            cur_aux = aux;
        }
    }
    Ok((cur, cur_score, cur_aux, evaluations))
}

fn simplex<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

/// Scalarization weights: evenly spaced angles in the quarter plane, or a
/// lattice on the 3-simplex with at least `n` points.
pub fn directions(dim: usize, n: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => {
            if n == 1 {
                return vec![vec![1.0, 1.0]];
            }
            (0..n)
                .map(|k| {
                    let th = std::f64::consts::FRAC_PI_2 * k as f64 / (n - 1) as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect()
        }
        _ => {
            if n == 1 {
                return vec![vec![1.0, 1.0, 1.0]];
            }
            let mut m = 1;
            while (m + 1) * (m + 2) / 2 < n {
                m += 1;
            }
            let mut out = Vec::new();
            for a in 0..=m {
                for b in 0..=m - a {
                    let c = m - a - b;
                    out.push(vec![
                        a as f64 / m as f64,
                        b as f64 / m as f64,
                        c as f64 / m as f64,
                    ]);
                }
            }
            out
        }
    }
}

/// Largest `w · R` over one input's region with the maximizing point and case.
fn best_point(
    prof: &InfoProfile,
    mode: SearchMode,
    w: &[f64],
    alpha_grid: usize,
) -> Result<Option<(f64, Vec<f64>, CaseLabel)>> {
    let mut best: Option<(f64, Vec<f64>, CaseLabel)> = None;
    let mut consider = |v: f64, pt: Vec<f64>, case: CaseLabel| {
        if best.as_ref().is_none_or(|b| v > b.0) {
            best = Some((v, pt, case));
        }
    };
    match mode {
        SearchMode::Common { hc } => {
            for case in classify_profile(prof, hc)?.cases {
                if let Some((v, pt)) = region_from_profile(prof, hc, case).max_weighted(w) {
                    consider(v, pt, case);
                }
            }
        }
        SearchMode::Conferencing { c1, c2 } => {
            let caps = ConferencingCapacities::new(c1, c2)?;
            let cases = if caps.total() == 0.0 {
                vec![CaseLabel::Case0]
            } else {
                vec![CaseLabel::Case1, CaseLabel::Case2, CaseLabel::Case3]
            };
            let cls = classify_profile(prof, caps.total())?;
            for case in cases.into_iter().filter(|c| cls.contains(*c)) {
                match region_conferencing_profile(prof, &caps, case, alpha_grid)? {
                    ConfRegion::Polytope(p) => {
                        if let Some((v, pt)) = p.max_weighted(w) {
                            consider(v, pt, case);
                        }
                    }
                    ConfRegion::Union { parts, .. } => {
                        for p in parts {
                            if let Some((v, pt)) = p.max_weighted(w) {
                                consider(v, pt, case);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Search objective: the weighted rate, nudged by `I(T∧V1V2) − I(Z∧V1V2)`
/// so that flat zero-rate plateaus still have a slope.
fn score(best: &Option<(f64, Vec<f64>, CaseLabel)>, prof: &InfoProfile) -> f64 {
    best.as_ref().map_or(0.0, |b| b.0.max(0.0)) + 1e-3 * (prof.t_v1v2 - prof.z_v1v2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatePoint {
    /// `(R0, R1, R2)` in common mode, `(R1, R2)` with conferencing.
    pub rates: Vec<f64>,
    pub case: CaseLabel,
    /// Index into `RegionEstimate::inputs`.
    pub input_id: usize,
    pub direction: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionEstimate {
    pub mode: SearchMode,
    pub points: Vec<EstimatePoint>,
    pub inputs: Vec<FactoredJson>,
    /// Convex hull of the `(R1, R2)` projection of the cloud and the origin.
    pub hull: Vec<Vec<f64>>,
    pub evaluations: u64,
    /// The evaluation budget cut the refinement short.
    pub partial: bool,
    /// Points dropped because they failed re-certification.
    pub rejected: usize,
}

impl RegionEstimate {
    /// Largest `R1 + R2` among the points (0 if there are none).
    pub fn max_private_sum(&self) -> f64 {
        let off = self.mode.dim() - 2;
        self.points
            .iter()
            .map(|p| p.rates[off] + p.rates[off + 1])
            .fold(0.0, f64::max)
    }

    /// Largest total rate (including `R0` in common mode).
    pub fn max_total_rate(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.rates.iter().sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest single coordinate among the points.
    pub fn max_coordinate(&self) -> f64 {
        self.points
            .iter()
            .flat_map(|p| p.rates.iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(if self.mode.dim() == 3 {
            "r0,r1,r2,case,input_id,direction\n"
        } else {
            "r1,r2,case,input_id,direction\n"
        });
        for p in &self.points {
            for r in &p.rates {
                s.push_str(&format!("{r:.12e},"));
            }
            s.push_str(&format!("{},{},{}\n", p.case, p.input_id, p.direction));
        }
        s
    }
}

struct TaskResult {
    direction: usize,
    best: Option<(f64, Vec<f64>, CaseLabel)>,
    factors: Factors,
    evaluations: u64,
}

fn run_task(
    w: &WiretapMAC,
    mode: SearchMode,
    cfg: &SearchConfig,
    weights: &[f64],
    direction: usize,
    restart: usize,
    iters: usize,
) -> Result<TaskResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream((direction * cfg.restarts + restart) as u64);
    let sizes = cfg.sizes(w);
    let eval = |f: &Factors| -> Result<(f64, Option<(f64, Vec<f64>, CaseLabel)>)> {
        let prof = info_profile(&f.input(w)?)?;
        let best = best_point(&prof, mode, weights, cfg.alpha_grid)?;
        Ok((score(&best, &prof), best))
    };
    let start = Factors::random(
        &mut rng,
        w,
        sizes,
        cfg.prefixing,
        Start::of_restart(restart),
    );
    let (factors, _, best, evaluations) = refine(&mut rng, start, iters, cfg, eval)?;
    Ok(TaskResult {
        direction,
        best,
        factors,
        evaluations,
    })
}

/// Inner estimate of the achievable region of `w` by weighted-sum sweeps.
/// Deterministic given `cfg.seed`, independent of the thread count.
pub fn achievable_region_estimate(
    w: &WiretapMAC,
    mode: SearchMode,
    cfg: &SearchConfig,
) -> Result<RegionEstimate> {
    cfg.validate()?;
    match mode {
        SearchMode::Common { hc } if !(hc >= 0.0 && hc.is_finite()) => {
            return Err(Error::validation("H_C must be finite and >= 0"))
        }
        SearchMode::Conferencing { c1, c2 } => {
            ConferencingCapacities::new(c1, c2)?;
        }
        _ => {}
    }
    let dirs = directions(mode.dim(), cfg.directions);
    let tasks = (dirs.len() * cfg.restarts) as u64;
    let wanted = tasks * (1 + cfg.refine_iters as u64);
    let (iters, partial) = if wanted > cfg.max_evaluations {
        (
            (cfg.max_evaluations / tasks).saturating_sub(1) as usize,
            true,
        )
    } else {
        (cfg.refine_iters, false)
    };
    let jobs: Vec<(usize, usize)> = (0..dirs.len())
        .flat_map(|d| (0..cfg.restarts).map(move |r| (d, r)))
        .collect();
    let results: Vec<TaskResult> = jobs
        .par_iter()
        .map(|&(d, r)| run_task(w, mode, cfg, &dirs[d], d, r, iters))
        .collect::<Result<_>>()?;

    let mut est = RegionEstimate {
        mode,
        points: Vec::new(),
        inputs: Vec::new(),
        hull: Vec::new(),
        evaluations: results.iter().map(|r| r.evaluations).sum(),
        partial,
        rejected: 0,
    };
    for res in results {
        let Some((_, rates, case)) = res.best else {
            continue;
        };
        let p = res.factors.input(w)?;
        if certify(&p, mode, case, &rates, cfg.alpha_grid)? {
            est.points.push(EstimatePoint {
                rates,
                case,
                input_id: est.inputs.len(),
                direction: res.direction,
            });
            est.inputs.push(p.to_json());
        } else {
            est.rejected += 1;
        }
    }
    let off = mode.dim() - 2;
    let mut proj: Vec<Vec<f64>> = est
        .points
        .iter()
        .map(|p| vec![p.rates[off], p.rates[off + 1]])
        .collect();
    proj.push(vec![0.0, 0.0]);
    est.hull = convex_hull_2d(&proj);
    Ok(est)
}

/// Recomputes the profile of `p` and checks `rates` against its region.
pub fn certify(
    p: &FactoredInput,
    mode: SearchMode,
    case: CaseLabel,
    rates: &[f64],
    alpha_grid: usize,
) -> Result<bool> {
    let prof = info_profile(p)?;
    const TOL: f64 = 1e-9;
    match mode {
        SearchMode::Common { hc } => {
            if !classify_profile(&prof, hc)?.contains(case) {
                return Ok(false);
            }
            region_from_profile(&prof, hc, case).contains(rates, TOL)
        }
        SearchMode::Conferencing { c1, c2 } => {
            let caps = ConferencingCapacities::new(c1, c2)?;
            match region_conferencing_profile(&prof, &caps, case, alpha_grid) {
                Ok(r) => r.contains(rates, TOL),
                Err(Error::Precondition(_)) => Ok(false),
                Err(e) => Err(e),
            }
        }
    }
}

/// Re-certifies every stored point of an estimate against the channel.
pub fn recertify(w: &WiretapMAC, est: &RegionEstimate, alpha_grid: usize) -> Result<bool> {
    for pt in &est.points {
        let p = FactoredInput::from_json(&est.inputs[pt.input_id], w.clone())?;
        if !certify(&p, est.mode, pt.case, &pt.rates, alpha_grid)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecrecyEstimate {
    /// Best `I(T∧V1V2) − I(Z∧V1V2)` found (at least 0).
    pub value: f64,
    pub input: Option<FactoredJson>,
    pub evaluations: u64,
}

/// Lower estimate of `max_{p∈Π} I(T∧V1V2) − I(Z∧V1V2)`.
pub fn single_sender_secrecy_estimate(
    w: &WiretapMAC,
    cfg: &SearchConfig,
) -> Result<SecrecyEstimate> {
    cfg.validate()?;
    let sizes = cfg.sizes(w);
    let per = (cfg.max_evaluations / cfg.restarts as u64).saturating_sub(1) as usize;
    let iters = cfg.refine_iters.min(per);
    let results: Vec<(f64, Factors, u64)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| -> Result<(f64, Factors, u64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(restart as u64);
            let eval = |f: &Factors| -> Result<(f64, ())> {
                let prof = info_profile(&f.input(w)?)?;
                Ok((prof.t_v1v2 - prof.z_v1v2, ()))
            };
            let start = Factors::random(
                &mut rng,
                w,
                sizes,
                cfg.prefixing,
                Start::of_restart(restart),
            );
            let (f, v, _, n) = refine(&mut rng, start, iters, cfg, eval)?;
            Ok((v, f, n))
        })
        .collect::<Result<_>>()?;
    let evaluations = results.iter().map(|r| r.2).sum();
    let best = results
        .into_iter()
        .fold(None::<(f64, Factors)>, |acc, (v, f, _)| match acc {
            Some((bv, _)) if bv >= v => acc,
            _ => Some((v, f)),
        });
    Ok(match best {
        Some((v, f)) if v > 0.0 => SecrecyEstimate {
            value: v,
            input: Some(f.input(w)?.to_json()),
            evaluations,
        },
        _ => SecrecyEstimate {
            value: 0.0,
            input: None,
            evaluations,
        },
    })
}

/// `single_sender_secrecy_estimate(w, cfg).value`.
pub fn single_sender_secrecy_capacity(w: &WiretapMAC, cfg: &SearchConfig) -> Result<f64> {
    Ok(single_sender_secrecy_estimate(w, cfg)?.value)
}

/// Best `R0 + R1 + R2` over a set of common-message polytopes.
pub fn max_total_rate(polys: &[RatePolytope]) -> f64 {
    polys
        .iter()
        .filter_map(|p| p.max_weighted(&vec![1.0; p.dim]))
        .map(|b| b.0)
        .fold(0.0, f64::max)
}

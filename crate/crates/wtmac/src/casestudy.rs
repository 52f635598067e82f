//! The two worked examples: the additive channels on which conferencing
//! enables secrecy, and the binary channel that forces time-sharing, plus
//! the random search that finds channels of either kind.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::probkit::{Alphabet, Axis, Channel, Dist, FactoredInput, WiretapMAC};
use crate::regions::{
    alpha_bounds_case1, classify_profile, info_profile, AlphaRange, CaseLabel, InfoProfile, EQ_TOL,
};
use crate::{Error, Result};

/// `t = x + y + N1 (mod 3)` and `z = 2x − 2y + N2` with fair-coin noise.
/// Eve's symbol `z` sits at index `z + 2`.
pub fn discussion_channels() -> WiretapMAC {
    let mut wb = vec![vec![0.0; 3]; 4];
    let mut we = vec![vec![0.0; 6]; 4];
    for x in 0..2usize {
        for y in 0..2usize {
            for noise in 0..2usize {
                wb[2 * x + y][(x + y + noise) % 3] += 0.5;
                let z = 2 * x as i64 - 2 * y as i64 + noise as i64;
                we[2 * x + y][(z + 2) as usize] += 0.5;
            }
        }
    }
    let labels = |v: &[&str]| {
        Alphabet::with_labels(v.iter().map(|s| s.to_string()).collect()).expect("labels")
    };
    WiretapMAC::from_marginals(
        2,
        2,
        &Channel::new(wb).expect("stochastic"),
        &Channel::new(we).expect("stochastic"),
    )
    .and_then(|w| {
        w.with_labels(
            labels(&["0", "1"]),
            labels(&["0", "1"]),
            labels(&["0", "1", "2"]),
            labels(&["-2", "-1", "0", "1", "2", "3"]),
        )
    })
    .expect("discussion channels are well formed")
}

fn check_interior(q: f64, r: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0 && r > 0.0 && r < 1.0) {
        return Err(Error::validation(format!(
            "(q, r) = ({q}, {r}) must lie in the open unit square"
        )));
    }
    Ok(())
}

fn h2(terms: &[(f64, f64)]) -> f64 {
    // Σ −w log2(m/2) with weights w and masses m
    terms
        .iter()
        .map(|&(w, m)| if w > 0.0 { -w * (m / 2.0).log2() } else { 0.0 })
        .sum()
}

/// `H(Z)` for independent inputs with `P[X=0] = q`, `P[Y=0] = r`.
pub fn f_z(q: f64, r: f64) -> f64 {
    let eq = q * r + (1.0 - q) * (1.0 - r);
    h2(&[
        (q * (1.0 - r), q * (1.0 - r)),
        (eq, eq),
        ((1.0 - q) * r, (1.0 - q) * r),
    ])
}

/// `H(T)` for independent inputs with `P[X=0] = q`, `P[Y=0] = r`.
pub fn f_t(q: f64, r: f64) -> f64 {
    let (a, b, c) = sums(q, r);
    h2(&[(a / 2.0, a), (b / 2.0, b), (c / 2.0, c)])
}

fn sums(q: f64, r: f64) -> (f64, f64, f64) {
    (
        q * r + (1.0 - q) * (1.0 - r),
        q * r + q * (1.0 - r) + (1.0 - q) * r,
        q * (1.0 - r) + (1.0 - q) * r + (1.0 - q) * (1.0 - r),
    )
}

/// `∂²f_Z/∂q²` in bits.
pub fn d2_f_z(q: f64, r: f64) -> f64 {
    let (a, _, _) = sums(q, r);
    (-(1.0 - r) / q - (2.0 * r - 1.0).powi(2) / a - r / (1.0 - q)) / LN_2
}

/// `∂²f_T/∂q²` in bits.
pub fn d2_f_t(q: f64, r: f64) -> f64 {
    let (a, b, c) = sums(q, r);
    (-(2.0 * r - 1.0).powi(2) / (2.0 * a) - (1.0 - r).powi(2) / (2.0 * b) - r * r / (2.0 * c))
        / LN_2
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapValue {
    /// `f_Z − f_T = I(Z∧XY) − I(T∧XY)`, since both conditional entropies are 1.
    pub gap: f64,
    /// The simplified closed form of `∂²(f_Z − f_T)/∂q²`, in bits.
    pub d2_gap_dq2: f64,
}

/// Information gap of the discussion channels and its second `q`-derivative.
pub fn lessnoisy_gap(q: f64, r: f64) -> Result<GapValue> {
    check_interior(q, r)?;
    let (a, _, _) = sums(q, r);
    let d2 = -(1.0 - r) / (2.0 * q) * (q + 2.0 * r - q * r) / (q + r - q * r)
        - (2.0 * r - 1.0).powi(2) / (2.0 * a)
        - r / (2.0 * (1.0 - q)) * (2.0 - r - q * r) / (1.0 - q * r);
    Ok(GapValue {
        gap: f_z(q, r) - f_t(q, r),
        d2_gap_dq2: d2 / LN_2,
    })
}

/// Values of the gap on an interior grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSurface {
    /// Grid coordinates `k/(m+1)`, `k = 1..=m`, shared by `q` and `r`.
    pub coords: Vec<f64>,
    /// `gap[i][j]` at `(coords[i], coords[j])`.
    pub gap: Vec<Vec<f64>>,
    pub d2_gap_dq2: Vec<Vec<f64>>,
}

pub fn gap_surface(m: usize) -> Result<GapSurface> {
    if m == 0 {
        return Err(Error::validation(
            "gap grid needs at least one point per axis",
        ));
    }
    let coords: Vec<f64> = (1..=m).map(|k| k as f64 / (m + 1) as f64).collect();
    let mut gap = vec![vec![0.0; m]; m];
    let mut d2 = vec![vec![0.0; m]; m];
    for (i, &q) in coords.iter().enumerate() {
        for (j, &r) in coords.iter().enumerate() {
            let v = lessnoisy_gap(q, r)?;
            gap[i][j] = v.gap;
            d2[i][j] = v.d2_gap_dq2;
        }
    }
    Ok(GapSurface {
        coords,
        gap,
        d2_gap_dq2: d2,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub grid: usize,
    pub points: usize,
    /// Grid points `(q, r, value)` where the second derivative is not negative.
    pub violations: Vec<(f64, f64, f64)>,
    /// Largest (least negative) second derivative on the grid.
    pub max_d2: f64,
    /// `min |∂²(f_Z − f_T)/∂q²|` over the grid.
    pub min_margin: f64,
}

impl ConcavityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `∂²(f_Z − f_T)/∂q² < 0` on an `m × m` interior grid. By symmetry
/// of the gap in `(q, r)` the `r`-direction needs no separate scan.
pub fn concavity_scan(m: usize) -> Result<ConcavityReport> {
    let s = gap_surface(m)?;
    let mut violations = Vec::new();
    let mut max_d2 = f64::NEG_INFINITY;
    let mut min_margin = f64::INFINITY;
    for (i, row) in s.d2_gap_dq2.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            max_d2 = max_d2.max(v);
            min_margin = min_margin.min(v.abs());
            if !(v < 0.0) {
                violations.push((s.coords[i], s.coords[j], v));
            }
        }
    }
    Ok(ConcavityReport {
        grid: m,
        points: m * m,
        violations,
        max_d2,
        min_margin,
    })
}

/// Input of the discussion channels with `X = Y = U`, `P[U = 0] = p0`.
pub fn equal_input(p0: f64) -> Result<FactoredInput> {
    let pu = Dist::new(vec![p0, 1.0 - p0])?;
    let id = Channel::identity(2)?;
    FactoredInput::new(
        pu,
        id.clone(),
        id.clone(),
        id.clone(),
        id,
        discussion_channels(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EqualInputWitness {
    pub p0: f64,
    /// `I(T∧XY)`.
    pub i_t: f64,
    /// `I(Z∧XY)`.
    pub i_z: f64,
    /// `I(Z∧U)`, the randomness a conference has to supply.
    pub i_z_u: f64,
}

pub fn equal_input_info(p0: f64) -> Result<EqualInputWitness> {
    let prof = info_profile(&equal_input(p0)?)?;
    Ok(EqualInputWitness {
        p0,
        i_t: prof.t_v1v2,
        i_z: prof.z_v1v2,
        i_z_u: prof.z_u,
    })
}

/// The equal-input witness at `p(0) = p(1) = 1/2`.
pub fn equal_input_witness() -> Result<EqualInputWitness> {
    equal_input_info(0.5)
}

/// Entropies of the binary example, in bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example62Values {
    pub h_t_g_xy: f64,
    pub h_z_g_xy: f64,
    pub h_t_g_x: f64,
    pub h_z_g_x: f64,
    pub h_t_g_y: f64,
    pub h_z_g_y: f64,
    pub h_t: f64,
    pub h_z: f64,
    pub i_t_xy: f64,
    pub i_z_xy: f64,
    pub i_t_x_g_y: f64,
    pub i_z_x_g_y: f64,
    pub i_t_y_g_x: f64,
    pub i_z_y_g_x: f64,
    pub i_z_x: f64,
    pub i_z_y: f64,
}

impl Example62Values {
    /// `(name, value)` in the order the example lists them.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("H(T|XY)", self.h_t_g_xy),
            ("H(Z|XY)", self.h_z_g_xy),
            ("H(T|X)", self.h_t_g_x),
            ("H(Z|X)", self.h_z_g_x),
            ("H(T|Y)", self.h_t_g_y),
            ("H(Z|Y)", self.h_z_g_y),
            ("H(T)", self.h_t),
            ("H(Z)", self.h_z),
            ("I(T∧XY)", self.i_t_xy),
            ("I(Z∧XY)", self.i_z_xy),
            ("I(T∧X|Y)", self.i_t_x_g_y),
            ("I(Z∧X|Y)", self.i_z_x_g_y),
            ("I(T∧Y|X)", self.i_t_y_g_x),
            ("I(Z∧Y|X)", self.i_z_y_g_x),
            ("I(Z∧X)", self.i_z_x),
            ("I(Z∧Y)", self.i_z_y),
        ]
    }
}

/// One `(V1, V2)` role assignment of the binary example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoleReport {
    /// `"V1=X"` or `"V1=Y"`.
    pub assignment: String,
    pub profile: InfoProfile,
    pub alpha: AlphaRange,
    /// `I(Z∧V1|U) ≤ I(T∧V1|V2U)`.
    pub hc01: bool,
    /// `I(Z∧V2|U) ≤ I(T∧V2|V1U)`.
    pub hc02: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example62Report {
    pub wb: Vec<Vec<f64>>,
    pub we: Vec<Vec<f64>>,
    pub q: f64,
    pub r: f64,
    pub values: Example62Values,
    pub roles: [RoleReport; 2],
}

pub const EXAMPLE62_Q: f64 = 0.6933;
pub const EXAMPLE62_R: f64 = 0.3151;

pub fn example62_channels() -> (Channel, Channel) {
    let wb = Channel::new(vec![
        vec![0.6178, 0.3822],
        vec![0.0624, 0.9376],
        vec![0.9350, 0.0650],
        vec![0.2353, 0.7647],
    ])
    .expect("stochastic");
    let we = Channel::new(vec![
        vec![0.0729, 0.9271],
        vec![0.7264, 0.2736],
        vec![0.3662, 0.6338],
        vec![0.4643, 0.5357],
    ])
    .expect("stochastic");
    (wb, we)
}

/// Product input `p^(q) ⊗ p^(r)` of the binary example with `V1 = X`.
pub fn example62_input() -> FactoredInput {
    let (wb, we) = example62_channels();
    let mac = WiretapMAC::from_marginals(2, 2, &wb, &we).expect("valid marginals");
    FactoredInput::product(
        mac,
        &Dist::bernoulli(EXAMPLE62_Q).expect("q in [0,1]"),
        &Dist::bernoulli(EXAMPLE62_R).expect("r in [0,1]"),
    )
    .expect("product input")
}

fn role_report(p: &FactoredInput, assignment: &str) -> Result<RoleReport> {
    let profile = info_profile(p)?;
    Ok(RoleReport {
        assignment: assignment.to_string(),
        alpha: alpha_bounds_case1(&profile),
        hc01: profile.z_v1_g_u <= profile.t_v1_g_v2u + EQ_TOL,
        hc02: profile.z_v2_g_u <= profile.t_v2_g_v1u + EQ_TOL,
        profile,
    })
}

fn values_of(p: &FactoredInput) -> Result<Example62Values> {
    let j = p.joint()?;
    let (x, y, t, z) = (Axis::X.idx(), Axis::Y.idx(), Axis::T.idx(), Axis::Z.idx());
    let h = |axes: &[usize]| j.entropy_of(axes);
    let cond = |a: &[usize], c: &[usize]| -> Result<f64> {
        let ac: Vec<usize> = a.iter().chain(c).copied().collect();
        Ok(h(&ac)? - h(c)?)
    };
    let mi = |a: usize, b: &[usize], c: &[usize]| -> Result<f64> {
        let bc: Vec<usize> = b.iter().chain(c).copied().collect();
        Ok(cond(&[a], c)? - cond(&[a], &bc)?)
    };
    Ok(Example62Values {
        h_t_g_xy: cond(&[t], &[x, y])?,
        h_z_g_xy: cond(&[z], &[x, y])?,
        h_t_g_x: cond(&[t], &[x])?,
        h_z_g_x: cond(&[z], &[x])?,
        h_t_g_y: cond(&[t], &[y])?,
        h_z_g_y: cond(&[z], &[y])?,
        h_t: h(&[t])?,
        h_z: h(&[z])?,
        i_t_xy: mi(t, &[x, y], &[])?,
        i_z_xy: mi(z, &[x, y], &[])?,
        i_t_x_g_y: mi(t, &[x], &[y])?,
        i_z_x_g_y: mi(z, &[x], &[y])?,
        i_t_y_g_x: mi(t, &[y], &[x])?,
        i_z_y_g_x: mi(z, &[y], &[x])?,
        i_z_x: mi(z, &[x], &[])?,
        i_z_y: mi(z, &[y], &[])?,
    })
}

/// The binary time-sharing example, evaluated under both role assignments.
pub fn example62() -> Result<Example62Report> {
    let (wb, we) = example62_channels();
    let p = example62_input();
    Ok(Example62Report {
        wb: wb.rows(),
        we: we.rows(),
        q: EXAMPLE62_Q,
        r: EXAMPLE62_R,
        values: values_of(&p)?,
        roles: [
            role_report(&p, "V1=X")?,
            role_report(&p.swap_roles(), "V1=Y")?,
        ],
    })
}

/// What a brute-force search looks for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SearchPredicate {
    /// A product input in Π_0 (so (HC01), (HC02) hold) with a nonempty α^(1)-interval
    /// that does not reach both ends: `α0 > tol` or `α1 < 1 − tol`.
    NeedsTimeSharing { tol: f64 },
    /// Independent inputs see a gap `I(Z∧XY) − I(T∧XY)` concave in each input
    /// on the check grid, while some correlated input has `I(T∧XY) > I(Z∧XY)`.
    ConferencingHelps { grid: usize, margin: f64 },
    /// Matches nothing.
    Never,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Certificate {
    TimeSharing {
        /// `"V1=X"` or `"V1=Y"`.
        assignment: String,
        z_v1_g_u: f64,
        t_v1_g_v2u: f64,
        z_v2_g_u: f64,
        t_v2_g_v1u: f64,
        z_v1_g_v2u: f64,
        z_v2_g_v1u: f64,
        alpha0: f64,
        alpha1: f64,
    },
    Conferencing {
        /// Largest second difference of the gap along either input on the grid.
        max_second_difference: f64,
        /// Correlated input law over `(x, y)`, row `2x + y`.
        joint_input: Vec<f64>,
        i_t: f64,
        i_z: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoundChannel {
    /// Sample index within the search.
    pub index: u64,
    pub wb: Vec<Vec<f64>>,
    pub we: Vec<Vec<f64>>,
    pub q: f64,
    pub r: f64,
    pub certificate: Certificate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Number of random channels examined at most.
    pub samples: u64,
    /// Stop after this many matches.
    pub max_found: usize,
    pub seed: u64,
}

const SHARD: u64 = 4096;

fn simplex_row<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn sample_instance(seed: u64, index: u64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let wb = (0..4).map(|_| simplex_row(2, &mut rng)).collect();
    let we = (0..4).map(|_| simplex_row(2, &mut rng)).collect();
    let q = rng.gen_range(0.05..0.95);
    let r = rng.gen_range(0.05..0.95);
    (wb, we, q, r)
}

fn mac_of(wb: &[Vec<f64>], we: &[Vec<f64>]) -> Result<WiretapMAC> {
    WiretapMAC::from_marginals(
        2,
        2,
        &Channel::from_arith(wb.to_vec())?,
        &Channel::from_arith(we.to_vec())?,
    )
}

fn time_sharing_certificate(
    p: &FactoredInput,
    assignment: &str,
    tol: f64,
) -> Result<Option<Certificate>> {
    let rep = role_report(p, assignment)?;
    if !(rep.hc01 && rep.hc02) || !classify_profile(&rep.profile, 0.0)?.contains(CaseLabel::Case0) {
        return Ok(None);
    }
    let AlphaRange::Interval { alpha0, alpha1 } = rep.alpha else {
        return Ok(None);
    };
    if alpha0 > alpha1 || !(alpha0 > tol || alpha1 < 1.0 - tol) {
        return Ok(None);
    }
    let f = &rep.profile;
    Ok(Some(Certificate::TimeSharing {
        assignment: assignment.to_string(),
        z_v1_g_u: f.z_v1_g_u,
        t_v1_g_v2u: f.t_v1_g_v2u,
        z_v2_g_u: f.z_v2_g_u,
        t_v2_g_v1u: f.t_v2_g_v1u,
        z_v1_g_v2u: f.z_v1_g_v2u,
        z_v2_g_v1u: f.z_v2_g_v1u,
        alpha0,
        alpha1,
    }))
}

/// `I(Z∧XY) − I(T∧XY)` for the joint input law `pxy` (row `2x + y`).
fn gap_for_input(mac: &WiretapMAC, pxy: &[f64]) -> Result<(f64, f64)> {
    let pu = Dist::from_arith(pxy.to_vec())?;
    let x_of = Channel::deterministic(&[0, 0, 1, 1], 2)?;
    let y_of = Channel::deterministic(&[0, 1, 0, 1], 2)?;
    let p = FactoredInput::superposition(mac.clone(), pu, x_of, y_of)?;
    let prof = info_profile(&p)?;
    Ok((prof.t_v1v2, prof.z_v1v2))
}

fn product_law(q: f64, r: f64) -> Vec<f64> {
    vec![q * r, q * (1.0 - r), (1.0 - q) * r, (1.0 - q) * (1.0 - r)]
}

fn conferencing_certificate(
    mac: &WiretapMAC,
    grid: usize,
    margin: f64,
) -> Result<Option<Certificate>> {
    let m = grid.max(3);
    let h = 1.0 / (m + 1) as f64;
    let gap = |q: f64, r: f64| -> Result<f64> {
        let (it, iz) = gap_for_input(mac, &product_law(q, r))?;
        Ok(iz - it)
    };
    let mut table = vec![vec![0.0; m + 2]; m + 2];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = gap(
                (i as f64 * h).clamp(0.0, 1.0),
                (j as f64 * h).clamp(0.0, 1.0),
            )?;
        }
    }
    let mut max_sd = f64::NEG_INFINITY;
    for i in 1..=m {
        for j in 1..=m {
            let dq = table[i + 1][j] - 2.0 * table[i][j] + table[i - 1][j];
            let dr = table[i][j + 1] - 2.0 * table[i][j] + table[i][j - 1];
            max_sd = max_sd.max(dq).max(dr);
        }
    }
    if max_sd > 0.0 {
        return Ok(None);
    }
    // correlated inputs: a coarse grid over the 4-point simplex
    let steps = 10usize;
    let mut best: Option<(Vec<f64>, f64, f64)> = None;
    for a in 0..=steps {
        for b in 0..=steps - a {
            for c in 0..=steps - a - b {
                let d = steps - a - b - c;
                let law: Vec<f64> = [a, b, c, d]
                    .iter()
                    .map(|&k| k as f64 / steps as f64)
                    .collect();
                let (it, iz) = gap_for_input(mac, &law)?;
                if best.as_ref().is_none_or(|(_, bt, bz)| it - iz > bt - bz) {
                    best = Some((law, it, iz));
                }
            }
        }
    }
    let (law, it, iz) = best.expect("grid is nonempty");
    if it - iz <= margin {
        return Ok(None);
    }
    Ok(Some(Certificate::Conferencing {
        max_second_difference: max_sd,
        joint_input: law,
        i_t: it,
        i_z: iz,
    }))
}

fn evaluate(
    pred: SearchPredicate,
    wb: &[Vec<f64>],
    we: &[Vec<f64>],
    q: f64,
    r: f64,
) -> Result<Option<Certificate>> {
    match pred {
        SearchPredicate::Never => Ok(None),
        SearchPredicate::NeedsTimeSharing { tol } => {
            let mac = mac_of(wb, we)?;
            let p = FactoredInput::product(mac, &Dist::bernoulli(q)?, &Dist::bernoulli(r)?)?;
            if let Some(c) = time_sharing_certificate(&p, "V1=X", tol)? {
                return Ok(Some(c));
            }
            time_sharing_certificate(&p.swap_roles(), "V1=Y", tol)
        }
        SearchPredicate::ConferencingHelps { grid, margin } => {
            conferencing_certificate(&mac_of(wb, we)?, grid, margin)
        }
    }
}

/// Random search over binary channels `W_b, W_e: {0,1}² → P({0,1})` and
/// product inputs with `q, r ∈ [0.05, 0.95]`. Instance `i` is drawn from
/// stream `i` of a ChaCha8 generator seeded with `seed`, so results do not
/// depend on the thread count.
pub fn bruteforce_search(
    budget: SearchBudget,
    predicate: SearchPredicate,
) -> Result<Vec<FoundChannel>> {
    let mut found = Vec::new();
    let mut start = 0u64;
    let wave = SHARD * rayon::current_num_threads().max(1) as u64;
    while start < budget.samples && found.len() < budget.max_found {
        let end = (start + wave).min(budget.samples);
        let shards: Vec<(u64, u64)> = (start..end)
            .step_by(SHARD as usize)
            .map(|s| (s, (s + SHARD).min(end)))
            .collect();
        let hits: Vec<Vec<FoundChannel>> = shards
            .par_iter()
            .map(|&(s, e)| -> Result<Vec<FoundChannel>> {
                let mut out = Vec::new();
                for index in s..e {
                    let (wb, we, q, r) = sample_instance(budget.seed, index);
                    if let Some(certificate) = evaluate(predicate, &wb, &we, q, r)? {
                        out.push(FoundChannel {
                            index,
                            wb,
                            we,
                            q,
                            r,
                            certificate,
                        });
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        found.extend(hits.into_iter().flatten());
        start = end;
    }
    found.truncate(budget.max_found);
    Ok(found)
}

/// Recomputes a certificate from the stored channel and input.
pub fn revalidate(found: &FoundChannel, predicate: SearchPredicate) -> Result<bool> {
    let again = evaluate(predicate, &found.wb, &found.we, found.q, found.r)?;
    Ok(match (again, &found.certificate) {
        (
            Some(Certificate::TimeSharing {
                alpha0,
                alpha1,
                assignment,
                ..
            }),
            Certificate::TimeSharing {
                alpha0: a0,
                alpha1: a1,
                assignment: asg,
                ..
            },
        ) => assignment == *asg && (alpha0 - a0).abs() < 1e-12 && (alpha1 - a1).abs() < 1e-12,
        (
            Some(Certificate::Conferencing { i_t, i_z, .. }),
            Certificate::Conferencing { i_t: t, i_z: z, .. },
        ) => (i_t - t).abs() < 1e-12 && (i_z - z).abs() < 1e-12,
        _ => false,
    })
}

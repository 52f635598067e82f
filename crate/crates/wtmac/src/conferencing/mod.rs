//! Conferencing-encoder regions, β-decompositions, the reduction to the
//! common-message problem, and one-shot stochastic conferences.

mod willems;

use serde::{Deserialize, Serialize};

use crate::probkit::{pos, FactoredInput};
use crate::regions::{
    alpha_range, classify_profile, elementary_from_profile, info_profile, region_from_profile,
    CaseLabel, InfoProfile, RatePolytope, EQ_TOL,
};
use crate::{Error, Result};

pub use willems::{build_conference, ConferenceRound, WillemsConference};

/// Default number of α values for Case-2 conferencing regions.
pub const ALPHA_GRID: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConferencingCapacities {
    pub c1: f64,
    pub c2: f64,
}

impl ConferencingCapacities {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite() && c1 >= 0.0 && c2 >= 0.0) {
            return Err(Error::validation(format!(
                "conferencing capacities must be finite and >= 0, got ({c1}, {c2})"
            )));
        }
        Ok(ConferencingCapacities { c1, c2 })
    }

    /// Common randomness the conference can supply, `C1 + C2`.
    pub fn total(&self) -> f64 {
        self.c1 + self.c2
    }
}

/// Randomness `J_0^(α)` Eve's observation forces the encoders to share.
pub fn j0_alpha(prof: &InfoProfile, case: CaseLabel, alpha: f64) -> Result<f64> {
    match case {
        CaseLabel::Case0 => Err(Error::precondition("J_0 is not defined for Case 0")),
        CaseLabel::Case1 => Ok(prof.z_u),
        CaseLabel::Case2 => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::precondition(format!("α = {alpha} outside [0, 1]")));
            }
            Ok(alpha * prof.z_v2u + (1.0 - alpha) * prof.z_v1u)
        }
        CaseLabel::Case3 => Ok(prof.z_v1v2),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BetaRange {
    Interval {
        beta0: f64,
        beta1: f64,
    },
    /// `J_0 = 0`: no shared randomness is needed and every β is equivalent.
    NoRandomnessNeeded,
}

impl BetaRange {
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            BetaRange::Interval { beta0, beta1 } => (beta0, beta1),
            BetaRange::NoRandomnessNeeded => (0.0, 1.0),
        }
    }

    pub fn is_feasible(&self) -> bool {
        let (a, b) = self.bounds();
        a <= b + EQ_TOL
    }
}

/// `[β0, β1]` splitting `J_0^(α)` between the two conferencing links.
pub fn beta_bounds(
    prof: &InfoProfile,
    case: CaseLabel,
    alpha: f64,
    caps: &ConferencingCapacities,
) -> Result<BetaRange> {
    let j0 = j0_alpha(prof, case, alpha)?;
    if j0 <= 0.0 {
        return Ok(BetaRange::NoRandomnessNeeded);
    }
    Ok(BetaRange::Interval {
        beta0: pos(1.0 - caps.c2 / j0),
        beta1: (caps.c1 / j0).min(1.0),
    })
}

fn poly2() -> RatePolytope {
    RatePolytope::new(2)
}

fn sum_rhs(prof: &InfoProfile, caps: &ConferencingCapacities) -> f64 {
    (prof.t_v1v2_g_u + caps.total()).min(prof.t_v1v2) - prof.z_v1v2
}

/// Case-1 common-message bounds on `R1`, `R2` (without randomness terms).
fn case1_bounds(p: &InfoProfile) -> (f64, f64) {
    (
        p.t_v1_g_v2u - p.z_v1_g_u - pos(p.z_v2_g_v1u - p.t_v2_g_v1u),
        p.t_v2_g_v1u - p.z_v2_g_u - pos(p.z_v1_g_v2u - p.t_v1_g_v2u),
    )
}

/// `R^(2)_α(p, C1, C2)`.
pub fn conf_case2_alpha(
    prof: &InfoProfile,
    alpha: f64,
    caps: &ConferencingCapacities,
) -> RatePolytope {
    let j0 = alpha * prof.z_v2u + (1.0 - alpha) * prof.z_v1u;
    poly2()
        .with(
            vec![1.0, 0.0],
            prof.t_v1_g_v2u - alpha * prof.z_v1_g_v2u + caps.c1 - pos(j0 - caps.c2),
            "R1 bound",
        )
        .with(
            vec![0.0, 1.0],
            prof.t_v2_g_v1u - (1.0 - alpha) * prof.z_v2_g_v1u + caps.c2 - pos(j0 - caps.c1),
            "R2 bound",
        )
        .with(vec![1.0, 1.0], sum_rhs(prof, caps), "R1+R2 bound")
}

/// A conferencing region: one polytope, or a union over an α-grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConfRegion {
    Polytope(RatePolytope),
    Union {
        alphas: Vec<f64>,
        parts: Vec<RatePolytope>,
        /// Convex hull of all part vertices, counter-clockwise.
        hull: Vec<Vec<f64>>,
    },
}

impl ConfRegion {
    pub fn contains(&self, point: &[f64], tol: f64) -> Result<bool> {
        match self {
            ConfRegion::Polytope(p) => p.contains(point, tol),
            ConfRegion::Union { parts, .. } => {
                for p in parts {
                    if p.contains(point, tol)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Extreme points: polytope vertices, or the hull of the union.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match self {
            ConfRegion::Polytope(p) => p.vertices(),
            ConfRegion::Union { hull, .. } => hull.clone(),
        }
    }

    /// `max R1 + R2` with a maximizing point, or `None` if empty.
    pub fn max_sum_rate(&self) -> Option<(f64, Vec<f64>)> {
        self.vertices()
            .into_iter()
            .map(|v| (v[0] + v[1], v))
            .fold(None, |best, cur| match best {
                Some((b, _)) if b >= cur.0 => best,
                _ => Some(cur),
            })
    }
}

/// Convex hull of planar points (Andrew's monotone chain).
pub fn convex_hull_2d(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    if pts.len() < 3 {
        return pts.iter().map(|p| p.to_vec()).collect();
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 1e-15
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull.iter().map(|p| p.to_vec()).collect()
}

/// α-grid of `n` points over `[lo, hi]` (a single point if they coincide).
pub fn alpha_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || hi - lo <= 0.0 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Case 0 is admitted only without conferencing (`C1 = C2 = 0`), where the
/// region is `R^(0)(p)` restricted to `R0 = 0`.
fn require_conf_case(
    prof: &InfoProfile,
    caps: &ConferencingCapacities,
    case: CaseLabel,
) -> Result<()> {
    let no_conf = caps.total() == 0.0;
    if no_conf != (case == CaseLabel::Case0) {
        return Err(Error::precondition(if no_conf {
            format!("{case} needs C1 + C2 > 0; without conferencing only Case0 applies")
        } else {
            "Case0 is the no-conferencing region and needs C1 = C2 = 0".to_string()
        }));
    }
    let cls = classify_profile(prof, caps.total())?;
    if !cls.contains(case) {
        return Err(Error::precondition(format!(
            "{case} does not apply at H_C = C1 + C2 = {} (applicable: {:?})",
            caps.total(),
            cls.cases
        )));
    }
    Ok(())
}

/// `R^(ν)(p, C1, C2)` from a profile, Case 2 unioned over `grid` α values.
pub fn region_conferencing_profile(
    prof: &InfoProfile,
    caps: &ConferencingCapacities,
    case: CaseLabel,
    grid: usize,
) -> Result<ConfRegion> {
    require_conf_case(prof, caps, case)?;
    Ok(match case {
        CaseLabel::Case0 => {
            ConfRegion::Polytope(region_from_profile(prof, 0.0, case).slice_r0(0.0))
        }
        CaseLabel::Case1 => {
            let (b1, b2) = case1_bounds(prof);
            ConfRegion::Polytope(
                poly2()
                    .with(
                        vec![1.0, 0.0],
                        b1 + caps.c1 - pos(prof.z_u - caps.c2),
                        "R1 bound",
                    )
                    .with(
                        vec![0.0, 1.0],
                        b2 + caps.c2 - pos(prof.z_u - caps.c1),
                        "R2 bound",
                    )
                    .with(vec![1.0, 1.0], sum_rhs(prof, caps), "R1+R2 bound"),
            )
        }
        CaseLabel::Case2 => {
            let (lo, hi) = alpha_range(prof, caps.total(), CaseLabel::Case2)?.bounds();
            let alphas = alpha_grid(lo, hi, grid);
            let parts: Vec<RatePolytope> = alphas
                .iter()
                .map(|&a| conf_case2_alpha(prof, a, caps))
                .collect();
            let all: Vec<Vec<f64>> = parts.iter().flat_map(|p| p.vertices()).collect();
            ConfRegion::Union {
                hull: convex_hull_2d(&all),
                alphas,
                parts,
            }
        }
        CaseLabel::Case3 => ConfRegion::Polytope(
            poly2()
                .with(
                    vec![1.0, 0.0],
                    prof.t_v1_g_v2u + caps.c1 - pos(prof.z_v1v2 - caps.c2),
                    "R1 bound",
                )
                .with(
                    vec![0.0, 1.0],
                    prof.t_v2_g_v1u + caps.c2 - pos(prof.z_v1v2 - caps.c1),
                    "R2 bound",
                )
                .with(vec![1.0, 1.0], sum_rhs(prof, caps), "R1+R2 bound"),
        ),
    })
}

/// `R^(ν)(p, C1, C2)` over `(R1, R2)`.
pub fn region_conferencing(
    p: &FactoredInput,
    caps: &ConferencingCapacities,
    case: CaseLabel,
) -> Result<ConfRegion> {
    region_conferencing_profile(&info_profile(p)?, caps, case, ALPHA_GRID)
}

/// Elementary region for given α, β without range checks. Case 0 gives
/// the `R0 = 0` slice of `R^(0)_α(p)` and ignores β and the capacities.
pub fn elementary_conf_from_profile(
    prof: &InfoProfile,
    case: CaseLabel,
    alpha: f64,
    beta: f64,
    caps: &ConferencingCapacities,
) -> Result<RatePolytope> {
    if case == CaseLabel::Case0 {
        return Ok(elementary_from_profile(prof, case, alpha).slice_r0(0.0));
    }
    let j0 = j0_alpha(prof, case, alpha)?;
    let total = prof.t_v1v2 - prof.z_v1v2;
    let (r1, r2, sum) = match case {
        CaseLabel::Case0 => unreachable!("handled above"),
        CaseLabel::Case1 => {
            let (b1, b2) = case1_bounds(prof);
            (
                b1 - beta * j0 + caps.c1,
                b2 - (1.0 - beta) * j0 + caps.c2,
                prof.t_v1v2_g_u - prof.z_v1v2_g_u - j0 + caps.total(),
            )
        }
        CaseLabel::Case2 => (
            prof.t_v1_g_v2u - alpha * prof.z_v1_g_v2u + caps.c1 - beta * j0,
            prof.t_v2_g_v1u - (1.0 - alpha) * prof.z_v2_g_v1u + caps.c2 - (1.0 - beta) * j0,
            prof.t_v1v2_g_u - alpha * prof.z_v1_g_v2u - (1.0 - alpha) * prof.z_v2_g_v1u
                + caps.total()
                - j0,
        ),
        CaseLabel::Case3 => (
            prof.t_v1_g_v2u + caps.c1 - beta * j0,
            prof.t_v2_g_v1u + caps.c2 - (1.0 - beta) * j0,
            prof.t_v1v2_g_u + caps.total() - j0,
        ),
    };
    Ok(poly2()
        .with(vec![1.0, 0.0], r1, "R1 bound")
        .with(vec![0.0, 1.0], r2, "R2 bound")
        .with(vec![1.0, 1.0], sum.min(total), "R1+R2 bound"))
}

/// Checks `case`, α and β against their admissible ranges at `H_C = C1 + C2`.
fn check_alpha_beta(
    prof: &InfoProfile,
    case: CaseLabel,
    alpha: f64,
    beta: f64,
    caps: &ConferencingCapacities,
) -> Result<()> {
    require_conf_case(prof, caps, case)?;
    if case == CaseLabel::Case0 {
        let (lo, hi) = alpha_range(prof, 0.0, case)?.bounds();
        if !(alpha >= lo - EQ_TOL && alpha <= hi + EQ_TOL) {
            return Err(Error::precondition(format!(
                "α = {alpha} outside [{lo}, {hi}]"
            )));
        }
        return Ok(());
    }
    if case == CaseLabel::Case2 {
        let r = alpha_range(prof, caps.total(), case)?;
        let (lo, hi) = r.bounds();
        if !(alpha >= lo - EQ_TOL && alpha <= hi + EQ_TOL) {
            return Err(Error::precondition(format!(
                "α = {alpha} outside [{lo}, {hi}]"
            )));
        }
    }
    let (b0, b1) = beta_bounds(prof, case, alpha, caps)?.bounds();
    if !(beta >= b0 - EQ_TOL && beta <= b1 + EQ_TOL) {
        return Err(Error::precondition(format!(
            "β = {beta} outside [{b0}, {b1}]"
        )));
    }
    Ok(())
}

/// `R^(1)_β`, `R^(2)_{α,β}` or `R^(3)_β` of `(p, C1, C2)`; α is ignored
/// outside Case 2.
pub fn elementary_conf_region(
    p: &FactoredInput,
    case: CaseLabel,
    alpha: f64,
    beta: f64,
    caps: &ConferencingCapacities,
) -> Result<RatePolytope> {
    let prof = info_profile(p)?;
    check_alpha_beta(&prof, case, alpha, beta, caps)?;
    elementary_conf_from_profile(&prof, case, alpha, beta, caps)
}

/// Rates after moving part of each private message into a common message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSplit {
    pub case: CaseLabel,
    pub alpha: f64,
    pub beta: f64,
    pub r0_from_1: f64,
    pub r0_from_2: f64,
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    /// Common-message region the triple `(r0, r1, r2)` was checked against.
    pub target: RatePolytope,
}

impl RateSplit {
    pub fn triple(&self) -> [f64; 3] {
        [self.r0, self.r1, self.r2]
    }
}

/// Moves `min(Rν, Cν − β-share of J0)` of each rate into the common message
/// and checks the triple against the common-message region at
/// `H_C = C1 + C2` (Case 1: `R^(1)(p)`, Case 2: `R^(2)_α(p)`, Case 3:
/// `R^(3)(p)`).
#[allow(clippy::too_many_arguments)]
pub fn rate_split(
    r1: f64,
    r2: f64,
    prof: &InfoProfile,
    case: CaseLabel,
    alpha: f64,
    beta: f64,
    caps: &ConferencingCapacities,
) -> Result<RateSplit> {
    check_alpha_beta(prof, case, alpha, beta, caps)?;
    let elem = elementary_conf_from_profile(prof, case, alpha, beta, caps)?;
    if elem.violation(&[r1, r2]) > 1e-9 {
        return Err(Error::precondition(format!(
            "({r1}, {r2}) is not in the elementary conferencing region; violates {:?}",
            elem.violated(&[r1, r2], 1e-9)
        )));
    }
    let j0 = if case == CaseLabel::Case0 {
        0.0
    } else {
        j0_alpha(prof, case, alpha)?
    };
    let r0_from_1 = r1.min(caps.c1 - beta * j0);
    let r0_from_2 = r2.min(caps.c2 - (1.0 - beta) * j0);
    let target = match case {
        CaseLabel::Case0 | CaseLabel::Case2 => elementary_from_profile(prof, case, alpha),
        _ => region_from_profile(prof, caps.total(), case),
    };
    let split = RateSplit {
        case,
        alpha,
        beta,
        r0_from_1,
        r0_from_2,
        r0: r0_from_1 + r0_from_2,
        r1: r1 - r0_from_1,
        r2: r2 - r0_from_2,
        target,
    };
    let t = split.triple();
    let worst = split
        .target
        .constraints
        .iter()
        .map(|c| (c.excess(&t), c.label.clone()))
        .chain(
            t.iter()
                .enumerate()
                .map(|(i, &x)| (-x, format!("R{i} >= 0"))),
        )
        .fold((f64::NEG_INFINITY, String::new()), |a, b| {
            if b.0 > a.0 {
                b
            } else {
                a
            }
        });
    if worst.0 > 1e-9 {
        return Err(Error::ReductionInfeasible {
            constraint: worst.1,
            excess: worst.0,
        });
    }
    Ok(split)
}

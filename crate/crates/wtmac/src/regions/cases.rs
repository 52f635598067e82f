use serde::{Deserialize, Serialize};

use super::{InfoProfile, RatePolytope};
use crate::probkit::{pos, FactoredInput};
use crate::{Error, Result};

/// Tolerance for equalities between information quantities and for the
/// non-strict gate inequalities.
pub const EQ_TOL: f64 = 1e-12;
/// Strict gates closer than this to their boundary raise a warning.
pub const BOUNDARY_WARN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    Case0,
    Case1,
    Case2,
    Case3,
}

impl CaseLabel {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(CaseLabel::Case0),
            1 => Ok(CaseLabel::Case1),
            2 => Ok(CaseLabel::Case2),
            3 => Ok(CaseLabel::Case3),
            _ => Err(Error::validation(format!("no case {i}; expected 0..=3"))),
        }
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Case{}", self.index())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub cases: Vec<CaseLabel>,
    pub warnings: Vec<String>,
}

impl Classification {
    pub fn contains(&self, c: CaseLabel) -> bool {
        self.cases.contains(&c)
    }
}

/// α-interval of an elementary decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum AlphaRange {
    /// Formula values; the decomposition is usable iff `alpha0 <= alpha1`.
    Interval { alpha0: f64, alpha1: f64 },
    /// The two conditional terms coincide; the region is achieved without
    /// an α-decomposition.
    DegenerateEqual,
}

impl AlphaRange {
    pub fn is_feasible(&self) -> bool {
        match *self {
            AlphaRange::Interval { alpha0, alpha1 } => alpha0 <= alpha1 + EQ_TOL,
            AlphaRange::DegenerateEqual => true,
        }
    }

    /// Admissible α values (`[0, 1]` for the degenerate case).
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            AlphaRange::Interval { alpha0, alpha1 } => (alpha0, alpha1),
            AlphaRange::DegenerateEqual => (0.0, 1.0),
        }
    }
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() < BOUNDARY_WARN
}

/// Case membership computed from a profile.
pub fn classify_profile(prof: &InfoProfile, hc: f64) -> Result<Classification> {
    if !(hc >= 0.0) || !hc.is_finite() {
        return Err(Error::precondition(
            "common randomness bound H_C must be finite and >= 0",
        ));
    }
    let p = prof;
    let mut out = Classification::default();
    let warn = |out: &mut Classification, msg: String| out.warnings.push(msg);

    if p.z_v1v2 > p.t_v1v2 + EQ_TOL {
        return Ok(out);
    }
    if near(p.z_v1v2, p.t_v1v2) {
        warn(
            &mut out,
            "common condition I(Z∧V1V2) <= I(T∧V1V2) holds with near equality".into(),
        );
    }

    if hc == 0.0 {
        let independent = p.u_v1v2 <= 1e-10;
        let hc01 = p.z_v1_g_u <= p.t_v1_g_v2u + EQ_TOL;
        let hc02 = p.z_v2_g_u <= p.t_v2_g_v1u + EQ_TOL;
        if independent && hc01 && hc02 {
            out.cases.push(CaseLabel::Case0);
        }
        return Ok(out);
    }

    // Case 1
    if p.z_u < hc {
        let c1 = p.z_v1_g_u <= p.t_v1_g_v2u + EQ_TOL;
        let c2 = p.z_v2_g_u <= p.t_v2_g_v1u + EQ_TOL;
        let c3 = p.z_v1v2_g_u <= p.t_v1_g_v2u + p.t_v2_g_v1u + EQ_TOL;
        if c1 && c2 && c3 {
            out.cases.push(CaseLabel::Case1);
            if near(p.z_u, hc) {
                warn(
                    &mut out,
                    format!("Case1 gate I(Z∧U) < H_C is within {BOUNDARY_WARN:e} of its boundary"),
                );
            }
        }
    }

    // Case 2
    let lo = p.z_v1u.min(p.z_v2u);
    if lo < hc && hc <= p.z_v1v2 && case2_alpha_formula(p, hc).is_feasible() {
        out.cases.push(CaseLabel::Case2);
        if near(lo, hc) {
            warn(
                &mut out,
                format!("Case2 gate min(I(Z∧V1U), I(Z∧V2U)) < H_C is within {BOUNDARY_WARN:e} of its boundary"),
            );
        }
    }

    // Case 3
    if p.z_v1v2 < hc {
        out.cases.push(CaseLabel::Case3);
        if near(p.z_v1v2, hc) {
            warn(
                &mut out,
                format!("Case3 gate I(Z∧V1V2) < H_C is within {BOUNDARY_WARN:e} of its boundary"),
            );
        }
    }
    Ok(out)
}

/// Every case whose membership conditions `p` satisfies at `hc`.
pub fn classify_case(p: &FactoredInput, hc: f64) -> Result<Classification> {
    classify_profile(&super::info_profile(p)?, hc)
}

/// Interval `[α^(1)_0, α^(1)_1]` for Cases 0 and 1.
pub fn alpha_bounds_case1(p: &InfoProfile) -> AlphaRange {
    let d1 = p.z_v1_g_v2u - p.z_v1_g_u;
    let d2 = p.z_v2_g_v1u - p.z_v2_g_u;
    if d1.abs() <= EQ_TOL || d2.abs() <= EQ_TOL {
        return AlphaRange::DegenerateEqual;
    }
    let alpha0 = pos((p.t_v2_g_v1u - p.z_v2_g_v1u) / (p.z_v2_g_u - p.z_v2_g_v1u));
    let alpha1 = ((p.t_v1_g_v2u - p.z_v1_g_u) / d1).min(1.0);
    AlphaRange::Interval { alpha0, alpha1 }
}

/// Ratio that only matters when its denominator is positive; a zero
/// denominator makes the corresponding bound vacuous.
fn ratio_or(num: f64, den: f64, vacuous: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        vacuous
    }
}

/// `α^(2)` formulas without the Case-2 gate.
pub fn case2_alpha_formula(p: &InfoProfile, hc: f64) -> AlphaRange {
    let a = p.z_v1_g_v2u;
    let b = p.z_v2_g_v1u;
    if (a - b).abs() <= EQ_TOL {
        return AlphaRange::DegenerateEqual;
    }
    let t1 = p.t_v1_g_v2u;
    let t2 = p.t_v2_g_v1u;
    let t12 = p.t_v1v2_g_u;
    if a > b {
        let alpha0 = ((p.z_v1u - hc) / (a - b))
            .max(1.0 - ratio_or(t2, b, f64::INFINITY))
            .max(0.0);
        let alpha1 = ratio_or(t1, a, f64::INFINITY)
            .min((t12 - b) / (a - b))
            .min(1.0);
        AlphaRange::Interval { alpha0, alpha1 }
    } else {
        let alpha0 = (1.0 - ratio_or(t2, b, f64::INFINITY))
            .max((t12 - b) / (a - b))
            .max(0.0);
        let alpha1 = ((hc - p.z_v1u) / (b - a))
            .min(ratio_or(t1, a, f64::INFINITY))
            .min(1.0);
        AlphaRange::Interval { alpha0, alpha1 }
    }
}

/// `[α^(2)_0, α^(2)_1]`; requires the Case-2 gate.
pub fn alpha_bounds_case2(p: &InfoProfile, hc: f64) -> Result<AlphaRange> {
    let lo = p.z_v1u.min(p.z_v2u);
    if !(lo < hc && hc <= p.z_v1v2) {
        return Err(Error::precondition(format!(
            "Case-2 gate min(I(Z∧V1U), I(Z∧V2U)) < H_C <= I(Z∧V1V2) fails: {lo} < {hc} <= {}",
            p.z_v1v2
        )));
    }
    Ok(case2_alpha_formula(p, hc))
}

fn tail(mut poly: RatePolytope, p: &InfoProfile) -> RatePolytope {
    poly.push(
        vec![1.0, 1.0, 1.0],
        p.t_v1v2 - p.z_v1v2,
        "R0+R1+R2 <= I(T∧V1V2) - I(Z∧V1V2)",
    )
    .expect("well formed");
    poly
}

fn region_case01(p: &InfoProfile, zero_r0: bool) -> RatePolytope {
    let mut poly = RatePolytope::new(3);
    if zero_r0 {
        poly = poly.with(vec![1.0, 0.0, 0.0], 0.0, "R0 = 0");
    }
    let poly = poly
        .with(
            vec![0.0, 1.0, 0.0],
            p.t_v1_g_v2u - p.z_v1_g_u - pos(p.z_v2_g_v1u - p.t_v2_g_v1u),
            "R1 bound",
        )
        .with(
            vec![0.0, 0.0, 1.0],
            p.t_v2_g_v1u - p.z_v2_g_u - pos(p.z_v1_g_v2u - p.t_v1_g_v2u),
            "R2 bound",
        )
        .with(
            vec![0.0, 1.0, 1.0],
            p.t_v1v2_g_u - p.z_v1v2_g_u,
            "R1+R2 bound",
        );
    tail(poly, p)
}

/// `R^(2)(p)` for `I(Z∧V1|V2U) > I(Z∧V2|V1U)` given the interval.
fn region_case2_ordered(p: &InfoProfile, alpha0: f64, alpha1: f64) -> RatePolytope {
    let a = p.z_v1_g_v2u;
    let b = p.z_v2_g_v1u;
    let poly = RatePolytope::new(3)
        .with(vec![0.0, 1.0, 0.0], p.t_v1_g_v2u - alpha0 * a, "R1 bound")
        .with(
            vec![0.0, 0.0, 1.0],
            p.t_v2_g_v1u - (1.0 - alpha1) * b,
            "R2 bound",
        )
        .with(
            vec![0.0, 1.0, 1.0],
            p.t_v1v2_g_u - alpha0 * a - (1.0 - alpha0) * b,
            "R1+R2 bound",
        )
        .with(
            vec![0.0, b, a],
            b * p.t_v1_g_u + a * p.t_v2_g_v1u - a * b,
            "weighted sum bound",
        );
    tail(poly, p)
}

/// Case-2 region formula at `hc` without the gate.
pub fn region_case2_formula(p: &InfoProfile, hc: f64) -> RatePolytope {
    let a = p.z_v1_g_v2u;
    let b = p.z_v2_g_v1u;
    if (a - b).abs() <= EQ_TOL {
        let poly = RatePolytope::new(3)
            .with(vec![0.0, 1.0, 0.0], p.t_v1_g_v2u, "R1 bound")
            .with(vec![0.0, 0.0, 1.0], p.t_v2_g_v1u, "R2 bound")
            .with(vec![0.0, 1.0, 1.0], p.t_v1v2_g_u - a, "R1+R2 bound");
        return tail(poly, p);
    }
    if a > b {
        let (alpha0, alpha1) = case2_alpha_formula(p, hc).bounds();
        region_case2_ordered(p, alpha0, alpha1)
    } else {
        let s = p.swap();
        let (alpha0, alpha1) = case2_alpha_formula(&s, hc).bounds();
        region_case2_ordered(&s, alpha0, alpha1).swap_coords(1, 2)
    }
}

fn region_case3(p: &InfoProfile) -> RatePolytope {
    let poly = RatePolytope::new(3)
        .with(vec![0.0, 1.0, 0.0], p.t_v1_g_v2u, "R1 bound")
        .with(vec![0.0, 0.0, 1.0], p.t_v2_g_v1u, "R2 bound")
        .with(vec![0.0, 1.0, 1.0], p.t_v1v2_g_u, "R1+R2 bound");
    tail(poly, p)
}

/// Region formula of `case` evaluated on `p` without checking membership.
pub fn region_from_profile(p: &InfoProfile, hc: f64, case: CaseLabel) -> RatePolytope {
    match case {
        CaseLabel::Case0 => region_case01(p, true),
        CaseLabel::Case1 => region_case01(p, false),
        CaseLabel::Case2 => region_case2_formula(p, hc),
        CaseLabel::Case3 => region_case3(p),
    }
}

fn require_case(p: &InfoProfile, hc: f64, case: CaseLabel) -> Result<()> {
    let cls = classify_profile(p, hc)?;
    if !cls.contains(case) {
        return Err(Error::precondition(format!(
            "{case} does not apply at H_C = {hc} (applicable: {:?})",
            cls.cases
        )));
    }
    Ok(())
}

/// `R^(ν)(p)` for a case that `p` belongs to at `hc`.
pub fn region_common(p: &FactoredInput, hc: f64, case: CaseLabel) -> Result<RatePolytope> {
    let prof = super::info_profile(p)?;
    region_common_profile(&prof, hc, case)
}

pub fn region_common_profile(prof: &InfoProfile, hc: f64, case: CaseLabel) -> Result<RatePolytope> {
    require_case(prof, hc, case)?;
    Ok(region_from_profile(prof, hc, case))
}

/// Elementary region for one α, without range or gate checks.
pub fn elementary_from_profile(p: &InfoProfile, case: CaseLabel, alpha: f64) -> RatePolytope {
    match case {
        CaseLabel::Case0 | CaseLabel::Case1 => {
            let mut poly = RatePolytope::new(3);
            if case == CaseLabel::Case0 {
                poly = poly.with(vec![1.0, 0.0, 0.0], 0.0, "R0 = 0");
            }
            let poly = poly
                .with(
                    vec![0.0, 1.0, 0.0],
                    p.t_v1_g_v2u - alpha * p.z_v1_g_v2u - (1.0 - alpha) * p.z_v1_g_u,
                    "R1 bound",
                )
                .with(
                    vec![0.0, 0.0, 1.0],
                    p.t_v2_g_v1u - alpha * p.z_v2_g_u - (1.0 - alpha) * p.z_v2_g_v1u,
                    "R2 bound",
                )
                .with(
                    vec![0.0, 1.0, 1.0],
                    p.t_v1v2_g_u - p.z_v1v2_g_u,
                    "R1+R2 bound",
                );
            tail(poly, p)
        }
        CaseLabel::Case2 => {
            let a = p.z_v1_g_v2u;
            let b = p.z_v2_g_v1u;
            let poly = RatePolytope::new(3)
                .with(vec![0.0, 1.0, 0.0], p.t_v1_g_v2u - alpha * a, "R1 bound")
                .with(
                    vec![0.0, 0.0, 1.0],
                    p.t_v2_g_v1u - (1.0 - alpha) * b,
                    "R2 bound",
                )
                .with(
                    vec![0.0, 1.0, 1.0],
                    p.t_v1v2_g_u - alpha * a - (1.0 - alpha) * b,
                    "R1+R2 bound",
                );
            tail(poly, p)
        }
        CaseLabel::Case3 => region_case3(p),
    }
}

/// α-interval that `elementary_region` accepts for `case`.
pub fn alpha_range(p: &InfoProfile, hc: f64, case: CaseLabel) -> Result<AlphaRange> {
    match case {
        CaseLabel::Case0 | CaseLabel::Case1 => Ok(alpha_bounds_case1(p)),
        CaseLabel::Case2 => alpha_bounds_case2(p, hc),
        CaseLabel::Case3 => Ok(AlphaRange::DegenerateEqual),
    }
}

/// `R^(ν)_α(p)`.
pub fn elementary_region(
    p: &FactoredInput,
    hc: f64,
    case: CaseLabel,
    alpha: f64,
) -> Result<RatePolytope> {
    let prof = super::info_profile(p)?;
    elementary_region_profile(&prof, hc, case, alpha)
}

pub fn elementary_region_profile(
    prof: &InfoProfile,
    hc: f64,
    case: CaseLabel,
    alpha: f64,
) -> Result<RatePolytope> {
    require_case(prof, hc, case)?;
    let (lo, hi) = alpha_range(prof, hc, case)?.bounds();
    if !(alpha >= lo - EQ_TOL && alpha <= hi + EQ_TOL) {
        return Err(Error::precondition(format!(
            "α = {alpha} outside the admissible interval [{lo}, {hi}] for {case}"
        )));
    }
    Ok(elementary_from_profile(prof, case, alpha))
}

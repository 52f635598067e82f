//! Sampling checks of the two polytope decomposition lemmas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RatePolytope;
use crate::{Error, Result};

/// Parameters of the α-union lemma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionLemmaInstance {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c: f64,
    pub d: f64,
    pub r1: f64,
    pub r2: f64,
    pub r12: f64,
    pub r012: f64,
    pub alpha0: f64,
    pub alpha1: f64,
}

/// Parameters of the convex-hull lemma.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullLemmaInstance {
    pub r1: f64,
    pub r2: f64,
    pub r12: f64,
    pub r012: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha0: f64,
    pub alpha1: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaOptions {
    /// Points sampled per instance, split between the two inclusions.
    pub samples: usize,
    pub alpha_step: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        LemmaOptions {
            samples: 200,
            alpha_step: 1e-3,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    /// `"K in union"` or `"union in K"` (hull variants read `"K in hull"`, `"hull in K"`).
    pub direction: String,
    pub point: Vec<f64>,
    pub detail: String,
}

/// How a sampled point of `K` is covered.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub alpha: f64,
    /// Exact admissible α-interval for the point.
    pub interval: (f64, f64),
    pub on_grid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub trivially_equal: bool,
    pub note: String,
    pub points_checked: usize,
    pub counterexamples: Vec<Counterexample>,
    /// A few witnesses, for inspection.
    pub witnesses: Vec<Witness>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

const MAX_WITNESSES: usize = 5;

fn nonneg(name: &str, vals: &[(&str, f64)]) -> Result<()> {
    for (n, v) in vals {
        if !(v.is_finite() && *v >= 0.0) {
            return Err(Error::precondition(format!(
                "{name}: {n} = {v} must be a nonnegative real"
            )));
        }
    }
    Ok(())
}

fn check_alphas(name: &str, a0: f64, a1: f64) -> Result<()> {
    if !(0.0 <= a0 && a0 <= a1 && a1 <= 1.0) {
        return Err(Error::precondition(format!(
            "{name}: need 0 <= α0 <= α1 <= 1, got [{a0}, {a1}]"
        )));
    }
    Ok(())
}

/// Grid `α0, α0+step, …` together with `α1`.
fn alpha_grid(a0: f64, a1: f64, step: f64) -> Vec<f64> {
    let mut g = Vec::new();
    let mut k = 0usize;
    loop {
        let a = a0 + k as f64 * step;
        if a >= a1 {
            break;
        }
        g.push(a);
        k += 1;
    }
    g.push(a1);
    g
}

/// Intersection of `{α : coef·α ≤ rhs}` over `rows` with `[lo, hi]`, or
/// `None` when empty beyond `tol`.
fn alpha_interval(rows: &[(f64, f64)], mut lo: f64, mut hi: f64, tol: f64) -> Option<(f64, f64)> {
    for &(coef, rhs) in rows {
        if coef > 0.0 {
            hi = hi.min(rhs / coef);
        } else if coef < 0.0 {
            lo = lo.max(rhs / coef);
        } else if rhs < -tol {
            return None;
        }
    }
    if lo <= hi + tol {
        Some((lo, hi.max(lo)))
    } else {
        None
    }
}

/// Prefers an α on the grid anchored at `a0`; falls back to the interval end.
fn pick_alpha(iv: (f64, f64), a0: f64, step: f64) -> (f64, bool) {
    let k = ((iv.0 - a0) / step).ceil().max(0.0);
    let g = a0 + k * step;
    if g <= iv.1 {
        (g, true)
    } else {
        (iv.0, false)
    }
}

impl UnionLemmaInstance {
    pub fn k_alpha(&self, alpha: f64) -> RatePolytope {
        RatePolytope::new(3)
            .with(
                vec![0.0, 1.0, 0.0],
                self.r1 - alpha * self.a1 - (1.0 - alpha) * self.b1,
                "R1",
            )
            .with(
                vec![0.0, 0.0, 1.0],
                self.r2 - alpha * self.a2 - (1.0 - alpha) * self.b2,
                "R2",
            )
            .with(vec![0.0, 1.0, 1.0], self.r12 - self.c, "R1+R2")
            .with(vec![1.0, 1.0, 1.0], self.r012 - self.d, "R0+R1+R2")
    }

    pub fn k(&self) -> RatePolytope {
        RatePolytope::new(3)
            .with(
                vec![0.0, 1.0, 0.0],
                self.r1 - self.alpha0 * self.a1 - (1.0 - self.alpha0) * self.b1,
                "R1",
            )
            .with(
                vec![0.0, 0.0, 1.0],
                self.r2 - self.alpha1 * self.a2 - (1.0 - self.alpha1) * self.b2,
                "R2",
            )
            .with(vec![0.0, 1.0, 1.0], self.r12 - self.c, "R1+R2")
            .with(vec![1.0, 1.0, 1.0], self.r012 - self.d, "R0+R1+R2")
    }

    /// α-constraints `coef·α ≤ rhs` for `point ∈ K_α`.
    fn rows(&self, p: &[f64]) -> [(f64, f64); 4] {
        [
            (self.a1 - self.b1, self.r1 - self.b1 - p[1]),
            (self.a2 - self.b2, self.r2 - self.b2 - p[2]),
            (0.0, self.r12 - self.c - p[1] - p[2]),
            (0.0, self.r012 - self.d - p[0] - p[1] - p[2]),
        ]
    }

    /// Checks the hypotheses; `Ok(true)` means both sides are empty.
    pub fn validate(&self) -> Result<bool> {
        let name = "α-union lemma";
        nonneg(
            name,
            &[
                ("a1", self.a1),
                ("a2", self.a2),
                ("b1", self.b1),
                ("b2", self.b2),
                ("c", self.c),
                ("d", self.d),
                ("r1", self.r1),
                ("r2", self.r2),
                ("r12", self.r12),
                ("r012", self.r012),
            ],
        )?;
        let tol = 1e-9;
        if !(self.a1 > self.b1 && self.a2 < self.b2) {
            return Err(Error::precondition(format!(
                "{name}: need a1 > b1 and a2 < b2"
            )));
        }
        if (self.a1 + self.a2 - self.c).abs() > tol || (self.b1 + self.b2 - self.c).abs() > tol {
            return Err(Error::precondition(format!(
                "{name}: need a1 + a2 = b1 + b2 = c"
            )));
        }
        if self.r1 + self.r2 < self.r12 - tol {
            return Err(Error::precondition(format!("{name}: need r1 + r2 >= r12")));
        }
        check_alphas(name, self.alpha0, self.alpha1)?;
        if self.d > self.r012 {
            return Ok(true);
        }
        for &al in &[self.alpha0, self.alpha1] {
            if self.k_alpha(al).constraints.iter().any(|c| c.rhs < -tol) {
                return Err(Error::precondition(format!(
                    "{name}: K_α is empty at α = {al}"
                )));
            }
        }
        Ok(false)
    }
}

impl HullLemmaInstance {
    pub fn k_alpha(&self, alpha: f64) -> RatePolytope {
        RatePolytope::new(3)
            .with(vec![0.0, 1.0, 0.0], self.r1 - alpha * self.a, "R1")
            .with(vec![0.0, 0.0, 1.0], self.r2 - (1.0 - alpha) * self.b, "R2")
            .with(
                vec![0.0, 1.0, 1.0],
                self.r12 - alpha * self.a - (1.0 - alpha) * self.b,
                "R1+R2",
            )
            .with(vec![1.0, 1.0, 1.0], self.r012 - self.c, "R0+R1+R2")
    }

    /// The claimed hull. For `a > b` every role is exchanged
    /// (`R1↔R2`, `r1↔r2`, `a↔b`, `α↔1−α`).
    pub fn k(&self) -> RatePolytope {
        let (a, b, a0, a1) = (self.a, self.b, self.alpha0, self.alpha1);
        let poly = RatePolytope::new(3)
            .with(vec![0.0, 1.0, 0.0], self.r1 - a0 * a, "R1")
            .with(vec![0.0, 0.0, 1.0], self.r2 - (1.0 - a1) * b, "R2");
        let poly = if a <= b {
            poly.with(
                vec![0.0, 1.0, 1.0],
                self.r12 - a1 * a - (1.0 - a1) * b,
                "R1+R2",
            )
            .with(
                vec![0.0, b, a],
                self.r12 * a + self.r1 * (b - a) - a * b,
                "bR1+aR2",
            )
        } else {
            poly.with(
                vec![0.0, 1.0, 1.0],
                self.r12 - a0 * a - (1.0 - a0) * b,
                "R1+R2",
            )
            .with(
                vec![0.0, b, a],
                self.r12 * b + self.r2 * (a - b) - a * b,
                "bR1+aR2",
            )
        };
        poly.with(vec![1.0, 1.0, 1.0], self.r012 - self.c, "R0+R1+R2")
    }

    fn rows(&self, p: &[f64]) -> [(f64, f64); 4] {
        [
            (self.a, self.r1 - p[1]),
            (-self.b, self.r2 - self.b - p[2]),
            (self.a - self.b, self.r12 - self.b - p[1] - p[2]),
            (0.0, self.r012 - self.c - p[0] - p[1] - p[2]),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let name = "convex-hull lemma";
        nonneg(
            name,
            &[
                ("r1", self.r1),
                ("r2", self.r2),
                ("r12", self.r12),
                ("r012", self.r012),
                ("a", self.a),
                ("b", self.b),
                ("c", self.c),
            ],
        )?;
        let tol = 1e-9;
        if !(self.r1.max(self.r2) <= self.r12 + tol && self.r12 <= self.r1 + self.r2 + tol) {
            return Err(Error::precondition(format!(
                "{name}: need max(r1, r2) <= r12 <= r1 + r2"
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha0) || !(0.0..=1.0).contains(&self.alpha1) {
            return Err(Error::precondition(format!(
                "{name}: α0, α1 must lie in [0, 1]"
            )));
        }
        if self.alpha0 > self.alpha1 {
            return Err(Error::precondition(format!("{name}: empty α-interval")));
        }
        for &al in &[self.alpha0, self.alpha1] {
            if self.k_alpha(al).constraints.iter().any(|c| c.rhs < -tol) {
                return Err(Error::precondition(format!(
                    "{name}: K_α is empty at α = {al}"
                )));
            }
        }
        Ok(())
    }
}

/// `∪_{α0≤α≤α1} K_α = K` checked in both directions on sampled points.
pub fn verify_union_lemma(inst: &UnionLemmaInstance, opts: &LemmaOptions) -> Result<LemmaReport> {
    let mut report = LemmaReport {
        lemma: "alpha-union".into(),
        trivially_equal: false,
        note: String::new(),
        points_checked: 0,
        counterexamples: Vec::new(),
        witnesses: Vec::new(),
    };
    if inst.validate()? {
        report.trivially_equal = true;
        report.note = "trivially equal (both empty): d > r012".into();
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let k = inst.k();
    let half = opts.samples / 2;

    for p in k.sample_points(opts.samples - half, &mut rng) {
        report.points_checked += 1;
        let iv = alpha_interval(&inst.rows(&p), inst.alpha0, inst.alpha1, opts.tol);
        let Some(iv) = iv else {
            report.counterexamples.push(Counterexample {
                direction: "K in union".into(),
                point: p,
                detail: "no α in [α0, α1] places the point in K_α".into(),
            });
            continue;
        };
        let (alpha, on_grid) = pick_alpha(iv, inst.alpha0, opts.alpha_step);
        if inst.k_alpha(alpha).violation(&p) > opts.tol {
            report.counterexamples.push(Counterexample {
                direction: "K in union".into(),
                point: p,
                detail: format!("witness α = {alpha} fails membership"),
            });
        } else if report.witnesses.len() < MAX_WITNESSES {
            report.witnesses.push(Witness {
                point: p,
                alpha,
                interval: iv,
                on_grid,
            });
        }
    }

    let grid = alpha_grid(inst.alpha0, inst.alpha1, opts.alpha_step);
    for _ in 0..half {
        let alpha = grid[rng.gen_range(0..grid.len())];
        let ka = inst.k_alpha(alpha);
        for p in ka.sample_points(1, &mut rng) {
            report.points_checked += 1;
            if k.violation(&p) > opts.tol {
                report.counterexamples.push(Counterexample {
                    direction: "union in K".into(),
                    detail: format!(
                        "point of K_α (α = {alpha}) violates {:?}",
                        k.violated(&p, opts.tol)
                    ),
                    point: p,
                });
            }
        }
    }
    Ok(report)
}

/// `conv(∪ K_α) = K` checked in both directions on sampled points.
pub fn verify_convexhull_lemma(
    inst: &HullLemmaInstance,
    opts: &LemmaOptions,
) -> Result<LemmaReport> {
    inst.validate()?;
    let mut report = LemmaReport {
        lemma: "convex-hull".into(),
        trivially_equal: false,
        note: String::new(),
        points_checked: 0,
        counterexamples: Vec::new(),
        witnesses: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let k = inst.k();
    let half = opts.samples / 2;

    // Every point of K already lies in a single K_α, which is stronger
    // than lying in the hull.
    for p in k.sample_points(opts.samples - half, &mut rng) {
        report.points_checked += 1;
        let Some(iv) = alpha_interval(&inst.rows(&p), inst.alpha0, inst.alpha1, opts.tol) else {
            report.counterexamples.push(Counterexample {
                direction: "K in hull".into(),
                point: p,
                detail: "no α in [α0, α1] places the point in K_α".into(),
            });
            continue;
        };
        let (alpha, on_grid) = pick_alpha(iv, inst.alpha0, opts.alpha_step);
        if inst.k_alpha(alpha).violation(&p) > opts.tol {
            report.counterexamples.push(Counterexample {
                direction: "K in hull".into(),
                point: p,
                detail: format!("witness α = {alpha} fails membership"),
            });
        } else if report.witnesses.len() < MAX_WITNESSES {
            report.witnesses.push(Witness {
                point: p,
                alpha,
                interval: iv,
                on_grid,
            });
        }
    }

    let grid = alpha_grid(inst.alpha0, inst.alpha1, opts.alpha_step);
    for _ in 0..half {
        let m = rng.gen_range(1..=3);
        let mut point = [0.0; 3];
        let mut total = 0.0;
        for _ in 0..m {
            let alpha = grid[rng.gen_range(0..grid.len())];
            let w: f64 = rng.gen_range(0.0..1.0) + 1e-3;
            if let Some(q) = inst.k_alpha(alpha).sample_points(1, &mut rng).pop() {
                for i in 0..3 {
                    point[i] += w * q[i];
                }
                total += w;
            }
        }
        if total == 0.0 {
            continue;
        }
        let p: Vec<f64> = point.iter().map(|x| x / total).collect();
        report.points_checked += 1;
        if k.violation(&p) > opts.tol {
            report.counterexamples.push(Counterexample {
                direction: "hull in K".into(),
                detail: format!("convex combination violates {:?}", k.violated(&p, opts.tol)),
                point: p,
            });
        }
    }
    Ok(report)
}

fn random_alphas<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let x: f64 = rng.gen();
    if rng.gen_bool(0.1) {
        return (x, x);
    }
    let y: f64 = rng.gen();
    (x.min(y), x.max(y))
}

/// A random instance satisfying the α-union lemma's hypotheses.
pub fn random_union_instance<R: Rng + ?Sized>(rng: &mut R) -> UnionLemmaInstance {
    let c = rng.gen_range(0.1..2.0);
    let b1 = rng.gen_range(0.0..0.8 * c);
    let a1 = rng.gen_range(b1 + 0.01 * c..=c);
    let (a2, b2) = (c - a1, c - b1);
    let (alpha0, alpha1) = random_alphas(rng);
    let r1 = alpha1 * a1 + (1.0 - alpha1) * b1 + rng.gen_range(0.0..1.0);
    let mut r2 = alpha0 * a2 + (1.0 - alpha0) * b2 + rng.gen_range(0.0..1.0);
    if r1 + r2 < c {
        r2 += c - r1 - r2 + rng.gen_range(0.0..0.5);
    }
    let r12 = c + rng.gen_range(0.0..=1.0) * (r1 + r2 - c);
    let d = rng.gen_range(0.0..2.0);
    let r012 = d + rng.gen_range(0.0..2.0);
    UnionLemmaInstance {
        a1,
        a2,
        b1,
        b2,
        c,
        d,
        r1,
        r2,
        r12,
        r012,
        alpha0,
        alpha1,
    }
}

/// A random instance satisfying the convex-hull lemma's hypotheses.
pub fn random_hull_instance<R: Rng + ?Sized>(rng: &mut R) -> HullLemmaInstance {
    loop {
        let a = rng.gen_range(0.0..1.5);
        let b = if rng.gen_bool(0.1) {
            a
        } else {
            rng.gen_range(0.0..1.5)
        };
        let (alpha0, alpha1) = random_alphas(rng);
        let r1 = alpha1 * a + rng.gen_range(0.0..1.0);
        let r2 = (1.0 - alpha0) * b + rng.gen_range(0.0..1.0);
        let need = (alpha0 * a + (1.0 - alpha0) * b).max(alpha1 * a + (1.0 - alpha1) * b);
        let lo = r1.max(r2).max(need);
        let hi = r1 + r2;
        if lo > hi {
            continue;
        }
        let r12 = rng.gen_range(lo..=hi);
        let c = rng.gen_range(0.0..1.0);
        let r012 = c + rng.gen_range(0.0..2.0);
        let inst = HullLemmaInstance {
            r1,
            r2,
            r12,
            r012,
            a,
            b,
            c,
            alpha0,
            alpha1,
        };
        if inst.validate().is_ok() {
            return inst;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteEntry<I> {
    pub instance: I,
    pub report: LemmaReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteReport {
    pub instances: usize,
    pub samples_per_instance: usize,
    pub union_points: usize,
    pub hull_points: usize,
    pub union_counterexamples: usize,
    pub hull_counterexamples: usize,
    /// Failing instances with their reports (at most ten per lemma).
    pub union_failures: Vec<LemmaSuiteEntry<UnionLemmaInstance>>,
    pub hull_failures: Vec<LemmaSuiteEntry<HullLemmaInstance>>,
}

impl LemmaSuiteReport {
    pub fn passed(&self) -> bool {
        self.union_counterexamples == 0 && self.hull_counterexamples == 0
    }
}

/// Runs both verifiers on `instances` random instances each.
pub fn verify_lemma_suite(instances: usize, opts: &LemmaOptions) -> Result<LemmaSuiteReport> {
    let per = |i: usize, salt: u64| {
        opts.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((i as u64) << 1 | salt)
    };
    let union: Vec<(UnionLemmaInstance, LemmaReport)> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(per(i, 0));
            let inst = random_union_instance(&mut rng);
            let o = LemmaOptions {
                seed: rng.gen(),
                ..*opts
            };
            verify_union_lemma(&inst, &o).map(|r| (inst, r))
        })
        .collect::<Result<_>>()?;
    let hull: Vec<(HullLemmaInstance, LemmaReport)> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(per(i, 1));
            let inst = random_hull_instance(&mut rng);
            let o = LemmaOptions {
                seed: rng.gen(),
                ..*opts
            };
            verify_convexhull_lemma(&inst, &o).map(|r| (inst, r))
        })
        .collect::<Result<_>>()?;
    Ok(LemmaSuiteReport {
        instances,
        samples_per_instance: opts.samples,
        union_points: union.iter().map(|(_, r)| r.points_checked).sum(),
        hull_points: hull.iter().map(|(_, r)| r.points_checked).sum(),
        union_counterexamples: union.iter().map(|(_, r)| r.counterexamples.len()).sum(),
        hull_counterexamples: hull.iter().map(|(_, r)| r.counterexamples.len()).sum(),
        union_failures: union
            .into_iter()
            .filter(|(_, r)| !r.passed())
            .take(10)
            .map(|(instance, report)| LemmaSuiteEntry { instance, report })
            .collect(),
        hull_failures: hull
            .into_iter()
            .filter(|(_, r)| !r.passed())
            .take(10)
            .map(|(instance, report)| LemmaSuiteEntry { instance, report })
            .collect(),
    })
}

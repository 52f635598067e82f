use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Half-space `coeffs · R ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
}

/// Rate polytope over `(R0, R1, R2)` or `(R1, R2)`: a list of half-spaces
/// intersected with the nonnegative orthant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePolytope {
    pub dim: usize,
    pub constraints: Vec<Constraint>,
}

impl Constraint {
    /// Signed distance of `point` beyond the hyperplane.
    pub fn excess(&self, point: &[f64]) -> f64 {
        let lhs: f64 = self.coeffs.iter().zip(point).map(|(a, r)| a * r).sum();
        let norm = self.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt();
        (lhs - self.rhs) / norm
    }
}

impl RatePolytope {
    pub fn new(dim: usize) -> Self {
        RatePolytope {
            dim,
            constraints: Vec::new(),
        }
    }

    /// Adds `coeffs · R ≤ rhs`.
    pub fn push(&mut self, coeffs: Vec<f64>, rhs: f64, label: &str) -> Result<()> {
        if coeffs.len() != self.dim {
            return Err(Error::validation(format!(
                "constraint '{label}' has {} coefficients for a {}-dimensional polytope",
                coeffs.len(),
                self.dim
            )));
        }
        if coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::validation(format!(
                "constraint '{label}' has zero normal"
            )));
        }
        if !rhs.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation(format!(
                "constraint '{label}' is not finite"
            )));
        }
        self.constraints.push(Constraint {
            coeffs,
            rhs,
            label: label.to_string(),
        });
        Ok(())
    }

    pub(crate) fn with(mut self, coeffs: Vec<f64>, rhs: f64, label: &str) -> Self {
        self.push(coeffs, rhs, label)
            .expect("internal constraint is well formed");
        self
    }

    /// Largest violation of any constraint (orthant included), measured as
    /// distance to the bounding hyperplane; `≤ 0` inside.
    pub fn violation(&self, point: &[f64]) -> f64 {
        let mut worst = point.iter().map(|&r| -r).fold(f64::NEG_INFINITY, f64::max);
        for c in &self.constraints {
            worst = worst.max(c.excess(point));
        }
        worst
    }

    pub fn contains(&self, point: &[f64], tol: f64) -> Result<bool> {
        if point.len() != self.dim {
            return Err(Error::validation(format!(
                "point of dimension {} tested against a {}-dimensional polytope",
                point.len(),
                self.dim
            )));
        }
        Ok(self.violation(point) <= tol)
    }

    /// Labels of the constraints violated by more than distance `tol`.
    pub fn violated(&self, point: &[f64], tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for (i, &r) in point.iter().enumerate() {
            if r < -tol {
                out.push(format!("R{} >= 0", self.index_name(i)));
            }
        }
        for c in &self.constraints {
            if c.excess(point) > tol {
                out.push(if c.label.is_empty() {
                    format!("{:?}·R <= {}", c.coeffs, c.rhs)
                } else {
                    c.label.clone()
                });
            }
        }
        out
    }

    fn index_name(&self, i: usize) -> usize {
        if self.dim == 3 {
            i
        } else {
            i + 1
        }
    }

    /// All half-spaces including the orthant, as `(normal, rhs)`.
    fn planes(&self) -> Vec<(Vec<f64>, f64)> {
        let mut out: Vec<(Vec<f64>, f64)> = (0..self.dim)
            .map(|i| {
                let mut e = vec![0.0; self.dim];
                e[i] = -1.0;
                (e, 0.0)
            })
            .collect();
        out.extend(self.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs)));
        out
    }

    /// Vertices by intersecting every `dim`-subset of bounding planes
    /// (dimension 2 or 3). Assumes the polytope is bounded.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        const TOL: f64 = 1e-9;
        let planes = self.planes();
        let m = planes.len();
        let mut out: Vec<Vec<f64>> = Vec::new();
        let mut consider = |p: Vec<f64>| {
            if self.violation(&p) <= TOL && !out.iter().any(|q| dist_inf(q, &p) < 1e-9) {
                out.push(
                    p.iter()
                        .map(|&x| if x.abs() < 1e-13 { 0.0 } else { x })
                        .collect(),
                );
            }
        };
        match self.dim {
            2 => {
                for i in 0..m {
                    for j in i + 1..m {
                        if let Some(p) = solve2(&planes[i], &planes[j]) {
                            consider(p);
                        }
                    }
                }
            }
            3 => {
                for i in 0..m {
                    for j in i + 1..m {
                        for k in j + 1..m {
                            if let Some(p) = solve3(&planes[i], &planes[j], &planes[k]) {
                                consider(p);
                            }
                        }
                    }
                }
            }
            1 => {
                for (a, b) in &planes {
                    if a[0] != 0.0 {
                        consider(vec![b / a[0]]);
                    }
                }
            }
            _ => {}
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.vertices().is_empty()
    }

    /// `max w·R` over the polytope with a maximizing vertex, or `None` if empty.
    pub fn max_weighted(&self, w: &[f64]) -> Option<(f64, Vec<f64>)> {
        self.vertices()
            .into_iter()
            .map(|v| (w.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>(), v))
            .fold(None, |best, cur| match best {
                Some((b, _)) if b >= cur.0 => best,
                _ => Some(cur),
            })
    }

    /// Exchanges two coordinates in every constraint.
    pub fn swap_coords(&self, i: usize, j: usize) -> RatePolytope {
        let mut p = self.clone();
        for c in &mut p.constraints {
            c.coeffs.swap(i, j);
        }
        p
    }

    /// Drops the first coordinate of a 3-D polytope by fixing it at `r0`.
    pub fn slice_r0(&self, r0: f64) -> RatePolytope {
        assert_eq!(self.dim, 3);
        let mut p = RatePolytope::new(2);
        for c in &self.constraints {
            if c.coeffs[1] == 0.0 && c.coeffs[2] == 0.0 {
                continue;
            }
            p.constraints.push(Constraint {
                coeffs: vec![c.coeffs[1], c.coeffs[2]],
                rhs: c.rhs - c.coeffs[0] * r0,
                label: c.label.clone(),
            });
        }
        p
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("polytope serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let p: RatePolytope = serde_json::from_str(s).map_err(|e| {
            Error::validation(format!(
                "polytope JSON, line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        let mut out = RatePolytope::new(p.dim);
        for c in p.constraints {
            out.push(c.coeffs, c.rhs, &c.label)?;
        }
        Ok(out)
    }
}

fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn solve2(p: &(Vec<f64>, f64), q: &(Vec<f64>, f64)) -> Option<Vec<f64>> {
    let det = p.0[0] * q.0[1] - p.0[1] * q.0[0];
    if det.abs() < 1e-12 {
        return None;
    }
    Some(vec![
        (p.1 * q.0[1] - p.0[1] * q.1) / det,
        (p.0[0] * q.1 - p.1 * q.0[0]) / det,
    ])
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(p: &(Vec<f64>, f64), q: &(Vec<f64>, f64), r: &(Vec<f64>, f64)) -> Option<Vec<f64>> {
    let rows = [p, q, r];
    let m = [
        [p.0[0], p.0[1], p.0[2]],
        [q.0[0], q.0[1], q.0[2]],
        [r.0[0], r.0[1], r.0[2]],
    ];
    let d = det3(m);
    if d.abs() < 1e-12 {
        return None;
    }
    let mut x = vec![0.0; 3];
    for (col, xi) in x.iter_mut().enumerate() {
        let mut mc = m;
        for (row, plane) in rows.iter().enumerate() {
            mc[row][col] = plane.1;
        }
        *xi = det3(mc) / d;
    }
    Some(x)
}

impl RatePolytope {
    /// Points of the polytope: its vertices, random convex combinations of
    /// them, and uniform draws from the bounding box that land inside.
    /// Returns fewer than `n` points only when the polytope is empty.
    pub fn sample_points<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
        let verts = self.vertices();
        if verts.is_empty() || n == 0 {
            return Vec::new();
        }
        let mut out: Vec<Vec<f64>> = verts.iter().take(n / 4 + 1).cloned().collect();
        let mut lo = verts[0].clone();
        let mut hi = verts[0].clone();
        for v in &verts {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        let n_box = (n - out.len().min(n)) / 2;
        let mut attempts = 0;
        let mut boxed = 0;
        while boxed < n_box && attempts < 50 * n_box {
            attempts += 1;
            let p: Vec<f64> = (0..self.dim)
                .map(|i| rng.gen_range(lo[i]..=hi[i]))
                .collect();
            if self.violation(&p) <= 0.0 {
                out.push(p);
                boxed += 1;
            }
        }
        while out.len() < n {
            let w: Vec<f64> = verts.iter().map(|_| rng.sample::<f64, _>(Exp1)).collect();
            let total: f64 = w.iter().sum();
            let mut p = vec![0.0; self.dim];
            for (v, wi) in verts.iter().zip(&w) {
                for i in 0..self.dim {
                    p[i] += v[i] * wi / total;
                }
            }
            out.push(p);
        }
        out.truncate(n);
        out
    }
}

/// True iff `point` satisfies every constraint and nonnegativity within `tol`.
pub fn polytope_contains(poly: &RatePolytope, point: &[f64], tol: f64) -> Result<bool> {
    poly.contains(point, tol)
}

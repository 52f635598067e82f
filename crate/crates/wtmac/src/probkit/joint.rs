use serde::{Deserialize, Serialize};

use super::{check_budget, Channel, Dist, WiretapMAC, ARITH_TOL};
use crate::{Error, Result};

/// Axis positions of the joint law of `(U, V1, V2, X, Y, T, Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    U = 0,
    V1 = 1,
    V2 = 2,
    X = 3,
    Y = 4,
    T = 5,
    Z = 6,
}

impl Axis {
    pub fn idx(self) -> usize {
        self as usize
    }
}

/// `x log2 x` with `0 log 0 = 0`.
#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

pub(crate) fn entropy_of_mass(mass: &[f64]) -> f64 {
    -mass.iter().map(|&p| xlog2x(p)).sum::<f64>()
}

/// Shannon entropy in bits of a normalized mass vector.
pub fn entropy(mass: &[f64]) -> Result<f64> {
    let total: f64 = mass.iter().sum();
    if mass.iter().any(|p| !p.is_finite() || *p < 0.0) || (total - 1.0).abs() > ARITH_TOL {
        return Err(Error::validation(format!(
            "entropy of an unnormalized vector (total mass {total})"
        )));
    }
    Ok(entropy_of_mass(mass))
}

/// Dense joint distribution over an ordered list of finite axes, row-major
/// (last axis fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDist {
    sizes: Vec<usize>,
    mass: Vec<f64>,
}

impl JointDist {
    pub fn new(sizes: Vec<usize>, mass: Vec<f64>) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::validation("joint axis of size 0"));
        }
        let cells: u128 = sizes.iter().map(|&s| s as u128).product();
        check_budget("joint distribution", cells)?;
        if cells as usize != mass.len() {
            return Err(Error::validation(format!(
                "joint mass has {} cells, axes imply {cells}",
                mass.len()
            )));
        }
        let total: f64 = mass.iter().sum();
        if mass.iter().any(|p| !p.is_finite() || *p < 0.0) || (total - 1.0).abs() > ARITH_TOL {
            return Err(Error::validation(format!(
                "joint total mass {total} is not 1"
            )));
        }
        Ok(JointDist { sizes, mass })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn rank(&self) -> usize {
        self.sizes.len()
    }

    /// Marginal on `axes`, in the given order.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointDist> {
        let mass = self.marginal_mass(axes)?;
        Ok(JointDist {
            sizes: axes.iter().map(|&a| self.sizes[a]).collect(),
            mass,
        })
    }

    fn marginal_mass(&self, axes: &[usize]) -> Result<Vec<f64>> {
        let r = self.rank();
        let mut seen = vec![false; r];
        for &a in axes {
            if a >= r {
                return Err(Error::validation(format!(
                    "axis {a} out of range for rank {r}"
                )));
            }
            if seen[a] {
                return Err(Error::validation(format!("axis {a} listed twice")));
            }
            seen[a] = true;
        }
        // target stride of each source axis (0 if summed out)
        let mut tstride = vec![0usize; r];
        let mut s = 1usize;
        for &a in axes.iter().rev() {
            tstride[a] = s;
            s *= self.sizes[a];
        }
        let mut out = vec![0.0; s];
        let mut digits = vec![0usize; r];
        let mut t = 0usize;
        for &p in &self.mass {
            out[t] += p;
            // odometer increment, last axis fastest
            for k in (0..r).rev() {
                digits[k] += 1;
                t += tstride[k];
                if digits[k] < self.sizes[k] {
                    break;
                }
                t -= tstride[k] * digits[k];
                digits[k] = 0;
            }
        }
        Ok(out)
    }

    /// Entropy of the marginal on `axes` (empty set gives 0).
    pub fn entropy_of(&self, axes: &[usize]) -> Result<f64> {
        if axes.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy_of_mass(&self.marginal_mass(axes)?))
    }
}

/// `I(A ∧ B | C) = H(AC) + H(BC) − H(ABC) − H(C)` in bits.
pub fn mutual_information(j: &JointDist, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::validation(
            "mutual information needs nonempty groups",
        ));
    }
    for (x, y) in [(a, b), (a, c), (b, c)] {
        if x.iter().any(|v| y.contains(v)) {
            return Err(Error::validation("mutual information groups overlap"));
        }
    }
    let cat = |p: &[usize], q: &[usize]| -> Vec<usize> { p.iter().chain(q).copied().collect() };
    let ac = cat(a, c);
    let bc = cat(b, c);
    let abc = cat(&ac, b);
    Ok(j.entropy_of(&ac)? + j.entropy_of(&bc)? - j.entropy_of(&abc)? - j.entropy_of(c)?)
}

/// Joint law `P_U ⊗ P_{V1|U} ⊗ P_{V2|U} ⊗ P_{X|V1} ⊗ P_{Y|V2} ⊗ W` over
/// `(U, V1, V2, X, Y, T, Z)`.
pub fn joint_from_factors(
    p_u: &Dist,
    v1_given_u: &Channel,
    v2_given_u: &Channel,
    x_given_v1: &Channel,
    y_given_v2: &Channel,
    w: &WiretapMAC,
) -> Result<JointDist> {
    let nu = p_u.len();
    let (nv1, nv2) = (v1_given_u.n_out(), v2_given_u.n_out());
    let (nx, ny, nt, nz) = (w.nx(), w.ny(), w.nt(), w.nz());
    let shape_ok = v1_given_u.n_in() == nu
        && v2_given_u.n_in() == nu
        && x_given_v1.n_in() == nv1
        && y_given_v2.n_in() == nv2
        && x_given_v1.n_out() == nx
        && y_given_v2.n_out() == ny;
    if !shape_ok {
        return Err(Error::validation(format!(
            "factor dimensions do not chain: |U|={nu}, V1|U {}x{}, V2|U {}x{}, X|V1 {}x{}, Y|V2 {}x{}, channel inputs {nx}x{ny}",
            v1_given_u.n_in(),
            nv1,
            v2_given_u.n_in(),
            nv2,
            x_given_v1.n_in(),
            x_given_v1.n_out(),
            y_given_v2.n_in(),
            y_given_v2.n_out()
        )));
    }
    let sizes = vec![nu, nv1, nv2, nx, ny, nt, nz];
    let cells: u128 = sizes.iter().map(|&s| s as u128).product();
    check_budget("joint distribution", cells)?;
    let ntz = nt * nz;
    let mut mass = Vec::with_capacity(cells as usize);
    for u in 0..nu {
        let pu = p_u.mass()[u];
        for v1 in 0..nv1 {
            let p1 = pu * v1_given_u.prob(u, v1);
            for v2 in 0..nv2 {
                let p2 = p1 * v2_given_u.prob(u, v2);
                for x in 0..nx {
                    let p3 = p2 * x_given_v1.prob(v1, x);
                    for y in 0..ny {
                        let p4 = p3 * y_given_v2.prob(v2, y);
                        let row = w.row(x, y);
                        debug_assert_eq!(row.len(), ntz);
                        mass.extend(row.iter().map(|q| p4 * q));
                    }
                }
            }
        }
    }
    JointDist::new(sizes, mass)
}

use serde::{Deserialize, Serialize};

use crate::probkit::{FactoredInput, JointDist};
use crate::Result;

/// Every information quantity used by the rate bounds, in bits.
///
/// Field names read `<output>_<inputs>[_g_<condition>]`, so `z_v1_g_v2u`
/// is `I(Z∧V1|V2U)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoProfile {
    pub t_v1_g_v2u: f64,
    pub t_v2_g_v1u: f64,
    pub t_v1v2_g_u: f64,
    pub t_v1v2: f64,
    pub t_v1_g_u: f64,
    pub t_v2_g_u: f64,
    pub t_u: f64,
    pub z_v1_g_v2u: f64,
    pub z_v2_g_v1u: f64,
    pub z_v1v2_g_u: f64,
    pub z_v1v2: f64,
    pub z_v1_g_u: f64,
    pub z_v2_g_u: f64,
    pub z_u: f64,
    pub z_v1u: f64,
    pub z_v2u: f64,
    /// `I(U∧V1V2)`; zero exactly when the auxiliaries ignore `U`.
    pub u_v1v2: f64,
    /// `(|U|, |V1|, |V2|)` of the generating input.
    pub aux_sizes: (usize, usize, usize),
}

// axes of the reduced joint
const U: usize = 0;
const V1: usize = 1;
const V2: usize = 2;
const T: usize = 3;
const Z: usize = 4;

struct EntropyTable([f64; 32]);

impl EntropyTable {
    fn new(j: &JointDist) -> Result<Self> {
        let mut h = [0.0; 32];
        for (mask, slot) in h.iter_mut().enumerate().skip(1) {
            let axes: Vec<usize> = (0..5).filter(|a| mask & (1 << a) != 0).collect();
            *slot = j.entropy_of(&axes)?;
        }
        Ok(EntropyTable(h))
    }

    /// `I(A∧B|C)`, clamped at zero against roundoff.
    fn mi(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let m = |s: &[usize]| s.iter().fold(0usize, |acc, &x| acc | (1 << x));
        let (ma, mb, mc) = (m(a), m(b), m(c));
        let v = self.0[ma | mc] + self.0[mb | mc] - self.0[ma | mb | mc] - self.0[mc];
        v.max(0.0)
    }
}

impl InfoProfile {
    pub fn from_joint(j: &JointDist, aux_sizes: (usize, usize, usize)) -> Result<Self> {
        let h = EntropyTable::new(j)?;
        Ok(InfoProfile {
            t_v1_g_v2u: h.mi(&[T], &[V1], &[V2, U]),
            t_v2_g_v1u: h.mi(&[T], &[V2], &[V1, U]),
            t_v1v2_g_u: h.mi(&[T], &[V1, V2], &[U]),
            t_v1v2: h.mi(&[T], &[V1, V2], &[]),
            t_v1_g_u: h.mi(&[T], &[V1], &[U]),
            t_v2_g_u: h.mi(&[T], &[V2], &[U]),
            t_u: h.mi(&[T], &[U], &[]),
            z_v1_g_v2u: h.mi(&[Z], &[V1], &[V2, U]),
            z_v2_g_v1u: h.mi(&[Z], &[V2], &[V1, U]),
            z_v1v2_g_u: h.mi(&[Z], &[V1, V2], &[U]),
            z_v1v2: h.mi(&[Z], &[V1, V2], &[]),
            z_v1_g_u: h.mi(&[Z], &[V1], &[U]),
            z_v2_g_u: h.mi(&[Z], &[V2], &[U]),
            z_u: h.mi(&[Z], &[U], &[]),
            z_v1u: h.mi(&[Z], &[V1, U], &[]),
            z_v2u: h.mi(&[Z], &[V2, U], &[]),
            u_v1v2: h.mi(&[U], &[V1, V2], &[]),
            aux_sizes,
        })
    }

    /// The same quantities with the roles of `V1` and `V2` exchanged.
    pub fn swap(&self) -> InfoProfile {
        let (u, a, b) = self.aux_sizes;
        InfoProfile {
            t_v1_g_v2u: self.t_v2_g_v1u,
            t_v2_g_v1u: self.t_v1_g_v2u,
            t_v1_g_u: self.t_v2_g_u,
            t_v2_g_u: self.t_v1_g_u,
            z_v1_g_v2u: self.z_v2_g_v1u,
            z_v2_g_v1u: self.z_v1_g_v2u,
            z_v1_g_u: self.z_v2_g_u,
            z_v2_g_u: self.z_v1_g_u,
            z_v1u: self.z_v2u,
            z_v2u: self.z_v1u,
            aux_sizes: (u, b, a),
            ..self.clone()
        }
    }

    pub fn values(&self) -> [f64; 17] {
        [
            self.t_v1_g_v2u,
            self.t_v2_g_v1u,
            self.t_v1v2_g_u,
            self.t_v1v2,
            self.t_v1_g_u,
            self.t_v2_g_u,
            self.t_u,
            self.z_v1_g_v2u,
            self.z_v2_g_v1u,
            self.z_v1v2_g_u,
            self.z_v1v2,
            self.z_v1_g_u,
            self.z_v2_g_u,
            self.z_u,
            self.z_v1u,
            self.z_v2u,
            self.u_v1v2,
        ]
    }
}

/// Information profile of `p`, computed from the `(U,V1,V2,T,Z)` marginal.
pub fn info_profile(p: &FactoredInput) -> Result<InfoProfile> {
    InfoProfile::from_joint(&p.reduced_joint()?, p.aux_sizes())
}

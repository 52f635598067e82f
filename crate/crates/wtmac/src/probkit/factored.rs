use serde::{Deserialize, Serialize};

use super::{check_budget, joint_from_factors, Channel, Dist, JointDist, WiretapMAC};
use crate::{Error, Result};

/// A member of Π: `P_U ⊗ P_{V1|U} ⊗ P_{V2|U} ⊗ P_{X|V1} ⊗ P_{Y|V2} ⊗ W`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredInput {
    p_u: Dist,
    v1_given_u: Channel,
    v2_given_u: Channel,
    x_given_v1: Channel,
    y_given_v2: Channel,
    mac: WiretapMAC,
}

/// On-disk form of the input factors (the channel is stored separately).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactoredJson {
    pub p_u: Vec<f64>,
    pub v1_given_u: Vec<Vec<f64>>,
    pub v2_given_u: Vec<Vec<f64>>,
    pub x_given_v1: Vec<Vec<f64>>,
    pub y_given_v2: Vec<Vec<f64>>,
}

impl FactoredInput {
    pub fn new(
        p_u: Dist,
        v1_given_u: Channel,
        v2_given_u: Channel,
        x_given_v1: Channel,
        y_given_v2: Channel,
        mac: WiretapMAC,
    ) -> Result<Self> {
        let nu = p_u.len();
        let ok = v1_given_u.n_in() == nu
            && v2_given_u.n_in() == nu
            && x_given_v1.n_in() == v1_given_u.n_out()
            && y_given_v2.n_in() == v2_given_u.n_out()
            && x_given_v1.n_out() == mac.nx()
            && y_given_v2.n_out() == mac.ny();
        if !ok {
            return Err(Error::validation(format!(
                "factor dimensions do not chain: |U|={nu}, V1|U {}x{}, V2|U {}x{}, X|V1 {}x{}, Y|V2 {}x{}, channel inputs {}x{}",
                v1_given_u.n_in(),
                v1_given_u.n_out(),
                v2_given_u.n_in(),
                v2_given_u.n_out(),
                x_given_v1.n_in(),
                x_given_v1.n_out(),
                y_given_v2.n_in(),
                y_given_v2.n_out(),
                mac.nx(),
                mac.ny()
            )));
        }
        Ok(FactoredInput {
            p_u,
            v1_given_u,
            v2_given_u,
            x_given_v1,
            y_given_v2,
            mac,
        })
    }

    /// Independent inputs `P_X ⊗ P_Y` with trivial `U`, `V1 = X`, `V2 = Y`.
    pub fn product(mac: WiretapMAC, px: &Dist, py: &Dist) -> Result<Self> {
        Self::new(
            Dist::point(1, 0)?,
            Channel::new(vec![px.mass().to_vec()])?,
            Channel::new(vec![py.mass().to_vec()])?,
            Channel::identity(mac.nx())?,
            Channel::identity(mac.ny())?,
            mac,
        )
    }

    /// Inputs `(X, Y)` conditionally independent given `U`, with `V1 = X`, `V2 = Y`.
    pub fn superposition(
        mac: WiretapMAC,
        p_u: Dist,
        x_given_u: Channel,
        y_given_u: Channel,
    ) -> Result<Self> {
        let (nx, ny) = (mac.nx(), mac.ny());
        Self::new(
            p_u,
            x_given_u,
            y_given_u,
            Channel::identity(nx)?,
            Channel::identity(ny)?,
            mac,
        )
    }

    pub fn p_u(&self) -> &Dist {
        &self.p_u
    }
    pub fn v1_given_u(&self) -> &Channel {
        &self.v1_given_u
    }
    pub fn v2_given_u(&self) -> &Channel {
        &self.v2_given_u
    }
    pub fn x_given_v1(&self) -> &Channel {
        &self.x_given_v1
    }
    pub fn y_given_v2(&self) -> &Channel {
        &self.y_given_v2
    }
    pub fn mac(&self) -> &WiretapMAC {
        &self.mac
    }

    /// `(|U|, |V1|, |V2|)`.
    pub fn aux_sizes(&self) -> (usize, usize, usize) {
        (
            self.p_u.len(),
            self.v1_given_u.n_out(),
            self.v2_given_u.n_out(),
        )
    }

    /// Full joint over `(U, V1, V2, X, Y, T, Z)`.
    pub fn joint(&self) -> Result<JointDist> {
        joint_from_factors(
            &self.p_u,
            &self.v1_given_u,
            &self.v2_given_u,
            &self.x_given_v1,
            &self.y_given_v2,
            &self.mac,
        )
    }

    /// The prefixed channel `W̃: V1×V2 → T×Z`.
    pub fn prefixed_mac(&self) -> Result<WiretapMAC> {
        self.mac.prefixed(&self.x_given_v1, &self.y_given_v2)
    }

    /// Equivalent input for the prefixed channel (identity prefixes).
    pub fn prefixed(&self) -> Result<FactoredInput> {
        let mac = self.prefixed_mac()?;
        FactoredInput::new(
            self.p_u.clone(),
            self.v1_given_u.clone(),
            self.v2_given_u.clone(),
            Channel::identity(mac.nx())?,
            Channel::identity(mac.ny())?,
            mac,
        )
    }

    /// Joint over `(U, V1, V2, T, Z)`, computed through the prefixed channel
    /// without materializing the `X`, `Y` axes.
    pub fn reduced_joint(&self) -> Result<JointDist> {
        let w = self.prefixed_mac()?;
        let (nu, n1, n2) = self.aux_sizes();
        let (nt, nz) = (w.nt(), w.nz());
        let cells = (nu * n1 * n2) as u128 * (nt * nz) as u128;
        check_budget("reduced joint distribution", cells)?;
        let mut mass = Vec::with_capacity(cells as usize);
        for u in 0..nu {
            let pu = self.p_u.mass()[u];
            for v1 in 0..n1 {
                let p1 = pu * self.v1_given_u.prob(u, v1);
                for v2 in 0..n2 {
                    let p2 = p1 * self.v2_given_u.prob(u, v2);
                    mass.extend(w.row(v1, v2).iter().map(|q| p2 * q));
                }
            }
        }
        JointDist::new(vec![nu, n1, n2, nt, nz], mass)
    }

    /// Exchanges the roles of the two senders (`V1 ↔ V2`, `X ↔ Y`).
    pub fn swap_roles(&self) -> FactoredInput {
        FactoredInput {
            p_u: self.p_u.clone(),
            v1_given_u: self.v2_given_u.clone(),
            v2_given_u: self.v1_given_u.clone(),
            x_given_v1: self.y_given_v2.clone(),
            y_given_v2: self.x_given_v1.clone(),
            mac: self.mac.swap_inputs(),
        }
    }

    pub fn to_json(&self) -> FactoredJson {
        FactoredJson {
            p_u: self.p_u.mass().to_vec(),
            v1_given_u: self.v1_given_u.rows(),
            v2_given_u: self.v2_given_u.rows(),
            x_given_v1: self.x_given_v1.rows(),
            y_given_v2: self.y_given_v2.rows(),
        }
    }

    pub fn from_json(j: &FactoredJson, mac: WiretapMAC) -> Result<Self> {
        Self::new(
            Dist::new(j.p_u.clone())?,
            Channel::new(j.v1_given_u.clone())?,
            Channel::new(j.v2_given_u.clone())?,
            Channel::new(j.x_given_v1.clone())?,
            Channel::new(j.y_given_v2.clone())?,
            mac,
        )
    }

    pub fn from_json_str(s: &str, mac: WiretapMAC) -> Result<Self> {
        let j: FactoredJson = serde_json::from_str(s).map_err(|e| {
            Error::validation(format!(
                "input JSON, line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        Self::from_json(&j, mac)
    }
}

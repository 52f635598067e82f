use serde::{Deserialize, Serialize};

use super::ConferencingCapacities;
use crate::probkit::{check_budget, NORM_TOL};
use crate::{Error, Result};

/// One conferencing iteration. `maps[ν]` has one row per
/// `(k_ν, j_{ν̄,1}, …, j_{ν̄,i-1})` (mixed radix, `k_ν` most significant)
/// giving the law of what encoder ν sends in this round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConferenceRound {
    pub j_size: [usize; 2],
    pub maps: [Vec<Vec<f64>>; 2],
}

/// Layout of a one-shot conference that forwards a common-message part and
/// uniform randomness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneShotLayout {
    /// `K̃_0^(ν)`: common-message part carried over link ν.
    pub common: [usize; 2],
    /// `K̃_ν`: private part kept by encoder ν.
    pub private: [usize; 2],
    /// `L_0^(ν)`: randomness generated by encoder ν.
    pub randomness: [usize; 2],
    pub beta: f64,
    /// `log L_0^(1) / log(L_0^(1) L_0^(2))` after integer rounding.
    pub realized_beta: f64,
    /// `⌊2^{n C_ν}⌋`, saturated at `u64::MAX`.
    pub link_limit: [u64; 2],
    pub n: usize,
}

/// A stochastic Willems conference between encoders with message sets
/// `[K_1]`, `[K_2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WillemsConference {
    pub k: [usize; 2],
    pub rounds: Vec<ConferenceRound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<OneShotLayout>,
}

fn check_row(row: &[f64], what: &str) -> Result<()> {
    if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::validation(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > NORM_TOL * row.len().max(1) as f64 {
        return Err(Error::validation(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

impl WillemsConference {
    pub fn new(k: [usize; 2], rounds: Vec<ConferenceRound>) -> Result<Self> {
        if k.contains(&0) || rounds.is_empty() {
            return Err(Error::validation(
                "conference needs nonempty message sets and at least one round",
            ));
        }
        let mut history = [1usize, 1usize];
        for (i, r) in rounds.iter().enumerate() {
            for nu in 0..2 {
                let other = 1 - nu;
                let rows = k[nu] * history[other];
                if r.maps[nu].len() != rows {
                    return Err(Error::validation(format!(
                        "round {} map of encoder {} has {} rows, expected {rows}",
                        i + 1,
                        nu + 1,
                        r.maps[nu].len()
                    )));
                }
                for (ri, row) in r.maps[nu].iter().enumerate() {
                    if row.len() != r.j_size[nu] || r.j_size[nu] == 0 {
                        return Err(Error::validation(format!(
                            "round {} map of encoder {} row {ri} has length {}, expected {}",
                            i + 1,
                            nu + 1,
                            row.len(),
                            r.j_size[nu]
                        )));
                    }
                    check_row(
                        row,
                        &format!("round {} map of encoder {} row {ri}", i + 1, nu + 1),
                    )?;
                }
            }
            history[0] *= r.j_size[0];
            history[1] *= r.j_size[1];
        }
        Ok(WillemsConference {
            k,
            rounds,
            layout: None,
        })
    }

    pub fn iterations(&self) -> usize {
        self.rounds.len()
    }

    /// `|J_1|`, `|J_2|`.
    pub fn j_sizes(&self) -> [usize; 2] {
        let mut s = [1, 1];
        for r in &self.rounds {
            s[0] *= r.j_size[0];
            s[1] *= r.j_size[1];
        }
        s
    }

    /// Per-round symbols of a `J_ν` index (round 1 most significant).
    fn digits(&self, nu: usize, mut j: usize) -> Vec<usize> {
        let mut d = vec![0; self.rounds.len()];
        for (i, r) in self.rounds.iter().enumerate().rev() {
            d[i] = j % r.j_size[nu];
            j /= r.j_size[nu];
        }
        d
    }

    /// `c(j1, j2 | k1, k2)` as a row-major `|J_1| × |J_2|` table.
    pub fn joint(&self, k1: usize, k2: usize) -> Result<Vec<f64>> {
        if k1 >= self.k[0] || k2 >= self.k[1] {
            return Err(Error::validation(format!(
                "message pair ({k1}, {k2}) out of range"
            )));
        }
        let [n1, n2] = self.j_sizes();
        check_budget("conference table", n1 as u128 * n2 as u128)?;
        let d1: Vec<Vec<usize>> = (0..n1).map(|j| self.digits(0, j)).collect();
        let d2: Vec<Vec<usize>> = (0..n2).map(|j| self.digits(1, j)).collect();
        let mut out = vec![0.0; n1 * n2];
        for (a, da) in d1.iter().enumerate() {
            for (b, db) in d2.iter().enumerate() {
                let mut p = 1.0;
                let (mut h1, mut h2) = (0usize, 0usize);
                for (i, r) in self.rounds.iter().enumerate() {
                    // rows: k_ν followed by the other side's earlier symbols
                    let row1 = k1 * hist_size(&self.rounds[..i], 1) + h2;
                    let row2 = k2 * hist_size(&self.rounds[..i], 0) + h1;
                    p *= r.maps[0][row1][da[i]] * r.maps[1][row2][db[i]];
                    if p == 0.0 {
                        break;
                    }
                    h1 = h1 * r.j_size[0] + da[i];
                    h2 = h2 * r.j_size[1] + db[i];
                }
                out[a * n2 + b] = p;
            }
        }
        Ok(out)
    }

    /// `c_ν(· | k1, k2)`, the `J_ν`-marginal.
    pub fn marginal(&self, nu: usize, k1: usize, k2: usize) -> Result<Vec<f64>> {
        let [n1, n2] = self.j_sizes();
        let j = self.joint(k1, k2)?;
        Ok(if nu == 0 {
            (0..n1)
                .map(|a| j[a * n2..(a + 1) * n2].iter().sum())
                .collect()
        } else {
            (0..n2)
                .map(|b| (0..n1).map(|a| j[a * n2 + b]).sum())
                .collect()
        })
    }

    /// Whether `c(j1, j2 | k1, k2) = c1(j1 | k1) c2(j2 | k2)` for all arguments.
    pub fn is_non_iterative(&self, tol: f64) -> Result<bool> {
        let [_, n2] = self.j_sizes();
        for k1 in 0..self.k[0] {
            let m1 = self.marginal(0, k1, 0)?;
            for k2 in 0..self.k[1] {
                let m2 = self.marginal(1, 0, k2)?;
                let j = self.joint(k1, k2)?;
                for (idx, &v) in j.iter().enumerate() {
                    if (v - m1[idx / n2] * m2[idx % n2]).abs() > tol {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// `(1/n) log|J_ν| <= C_ν` for both links.
    pub fn satisfies_capacity(&self, n: usize, caps: &ConferencingCapacities) -> bool {
        let [n1, n2] = self.j_sizes();
        let ok = |size: usize, c: f64| (size as f64).log2() <= n as f64 * c + 1e-12;
        ok(n1, caps.c1) && ok(n2, caps.c2)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("conference serializes")
    }
}

fn hist_size(rounds: &[ConferenceRound], nu: usize) -> usize {
    rounds.iter().map(|r| r.j_size[nu]).product()
}

/// `⌊2^x⌋` saturated at `u64::MAX`.
fn floor_pow2(x: f64) -> u64 {
    if x >= 64.0 {
        u64::MAX
    } else {
        (2f64.powf(x) + 1e-9).floor() as u64
    }
}

/// One-shot conference: encoder ν draws `l_ν` uniformly from `[L_0^(ν)]` and
/// sends `(a_ν(k_ν), l_ν)` where `a_ν(k_ν)` is the common-message part of
/// `k_ν = a_ν K̃_ν + b_ν`. `L_0^(1) = ⌊L_0^β⌋`, `L_0^(2) = ⌈L_0 / L_0^(1)⌉`.
pub fn build_conference(
    common: [usize; 2],
    private: [usize; 2],
    l0: usize,
    beta: f64,
    caps: &ConferencingCapacities,
    n: usize,
) -> Result<WillemsConference> {
    if common.contains(&0) || private.contains(&0) || l0 == 0 {
        return Err(Error::validation(
            "message and randomness set sizes must be >= 1",
        ));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::validation(format!("β = {beta} outside [0, 1]")));
    }
    let l0_1 = ((l0 as f64).powf(beta) + 1e-9).floor().max(1.0) as usize;
    let l0_1 = l0_1.min(l0);
    let l0_2 = l0.div_ceil(l0_1);
    let randomness = [l0_1, l0_2];
    let link_limit = [
        floor_pow2(n as f64 * caps.c1),
        floor_pow2(n as f64 * caps.c2),
    ];
    for nu in 0..2 {
        let need = common[nu] as u128 * randomness[nu] as u128;
        if need > link_limit[nu] as u128 {
            return Err(Error::Constraint(format!(
                "link {}: K̃_0^({}) L_0^({}) = {} x {} = {need} exceeds ⌊2^(n C_{})⌋ = {}",
                nu + 1,
                nu + 1,
                nu + 1,
                common[nu],
                randomness[nu],
                nu + 1,
                link_limit[nu]
            )));
        }
    }
    let k = [common[0] * private[0], common[1] * private[1]];
    let j = [common[0] * randomness[0], common[1] * randomness[1]];
    for nu in 0..2 {
        check_budget("conference map", k[nu] as u128 * j[nu] as u128)?;
    }
    let map = |nu: usize| -> Vec<Vec<f64>> {
        (0..k[nu])
            .map(|kk| {
                let a = kk / private[nu];
                let mut row = vec![0.0; j[nu]];
                let w = 1.0 / randomness[nu] as f64;
                for l in 0..randomness[nu] {
                    row[a * randomness[nu] + l] = w;
                }
                row
            })
            .collect()
    };
    let mut conf = WillemsConference::new(
        k,
        vec![ConferenceRound {
            j_size: j,
            maps: [map(0), map(1)],
        }],
    )?;
    let total = (l0_1 * l0_2) as f64;
    conf.layout = Some(OneShotLayout {
        common,
        private,
        randomness,
        beta,
        realized_beta: if total > 1.0 {
            (l0_1 as f64).ln() / total.ln()
        } else {
            beta
        },
        link_limit,
        n,
    });
    Ok(conf)
}

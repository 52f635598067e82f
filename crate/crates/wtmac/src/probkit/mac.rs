use serde::{Deserialize, Serialize};

use super::{Alphabet, Channel};
use crate::{Error, Result};

/// Wiretap MAC `W: X×Y → P(T×Z)`.
///
/// Input `(x, y)` is row `x·|Y| + y`; output `(t, z)` is column `t·|Z| + z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WiretapMAC {
    x: Alphabet,
    y: Alphabet,
    t: Alphabet,
    z: Alphabet,
    w: Channel,
}

/// On-disk channel format `{"x":2,"y":2,"t":3,"z":6,"rows":[[...]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub x: usize,
    pub y: usize,
    pub t: usize,
    pub z: usize,
    pub rows: Vec<Vec<f64>>,
}

impl WiretapMAC {
    pub fn new(nx: usize, ny: usize, nt: usize, nz: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != nx * ny {
            return Err(Error::validation(format!(
                "wiretap MAC needs {} rows (|X|·|Y|), got {}",
                nx * ny,
                rows.len()
            )));
        }
        if rows.iter().any(|r| r.len() != nt * nz) {
            return Err(Error::validation(format!(
                "every row must have |T|·|Z| = {} entries",
                nt * nz
            )));
        }
        Self::from_channel(nx, ny, nt, nz, Channel::new(rows)?)
    }

    pub fn from_channel(nx: usize, ny: usize, nt: usize, nz: usize, w: Channel) -> Result<Self> {
        if w.n_in() != nx * ny || w.n_out() != nt * nz {
            return Err(Error::validation(
                "channel shape does not match alphabet sizes",
            ));
        }
        Ok(WiretapMAC {
            x: Alphabet::new(nx)?,
            y: Alphabet::new(ny)?,
            t: Alphabet::new(nt)?,
            z: Alphabet::new(nz)?,
            w,
        })
    }

    /// Joint channel with conditionally independent outputs,
    /// `W(t,z|x,y) = W_b(t|x,y) W_e(z|x,y)`.
    pub fn from_marginals(nx: usize, ny: usize, wb: &Channel, we: &Channel) -> Result<Self> {
        if wb.n_in() != nx * ny || we.n_in() != nx * ny {
            return Err(Error::validation(
                "marginal channels must have |X|·|Y| rows",
            ));
        }
        let (nt, nz) = (wb.n_out(), we.n_out());
        let mut m = Vec::with_capacity(nx * ny * nt * nz);
        for i in 0..nx * ny {
            for t in 0..nt {
                for z in 0..nz {
                    m.push(wb.prob(i, t) * we.prob(i, z));
                }
            }
        }
        Self::from_channel(nx, ny, nt, nz, Channel::from_flat(nx * ny, nt * nz, m)?)
    }

    pub fn with_labels(
        mut self,
        x: Alphabet,
        y: Alphabet,
        t: Alphabet,
        z: Alphabet,
    ) -> Result<Self> {
        if x.size() != self.nx()
            || y.size() != self.ny()
            || t.size() != self.nt()
            || z.size() != self.nz()
        {
            return Err(Error::validation(
                "label alphabets do not match channel sizes",
            ));
        }
        self.x = x;
        self.y = y;
        self.t = t;
        self.z = z;
        Ok(self)
    }

    pub fn nx(&self) -> usize {
        self.x.size()
    }
    pub fn ny(&self) -> usize {
        self.y.size()
    }
    pub fn nt(&self) -> usize {
        self.t.size()
    }
    pub fn nz(&self) -> usize {
        self.z.size()
    }

    pub fn alphabets(&self) -> [&Alphabet; 4] {
        [&self.x, &self.y, &self.t, &self.z]
    }

    pub fn channel(&self) -> &Channel {
        &self.w
    }

    /// Output law over `(t, z)` for input `(x, y)`.
    pub fn row(&self, x: usize, y: usize) -> &[f64] {
        self.w.row(x * self.ny() + y)
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize, t: usize, z: usize) -> f64 {
        self.w.prob(x * self.ny() + y, t * self.nz() + z)
    }

    /// Bob's marginal channel `W_b: X×Y → T`.
    pub fn bob(&self) -> Channel {
        self.marginal(true)
    }

    /// Eve's marginal channel `W_e: X×Y → Z`.
    pub fn eve(&self) -> Channel {
        self.marginal(false)
    }

    fn marginal(&self, bob: bool) -> Channel {
        let (nt, nz) = (self.nt(), self.nz());
        let width = if bob { nt } else { nz };
        let n_in = self.nx() * self.ny();
        let mut m = vec![0.0; n_in * width];
        for i in 0..n_in {
            let row = self.w.row(i);
            for t in 0..nt {
                for z in 0..nz {
                    let o = if bob { t } else { z };
                    m[i * width + o] += row[t * nz + z];
                }
            }
        }
        Channel::from_flat(n_in, width, m).expect("marginal of a valid channel is valid")
    }

    /// Channel prefixing: `W̃(t,z|v1,v2) = Σ W(t,z|x,y) P(x|v1) P(y|v2)`.
    pub fn prefixed(&self, x_given_v1: &Channel, y_given_v2: &Channel) -> Result<WiretapMAC> {
        if x_given_v1.n_out() != self.nx() || y_given_v2.n_out() != self.ny() {
            return Err(Error::validation(format!(
                "prefix outputs ({}, {}) do not match channel inputs ({}, {})",
                x_given_v1.n_out(),
                y_given_v2.n_out(),
                self.nx(),
                self.ny()
            )));
        }
        let (n1, n2) = (x_given_v1.n_in(), y_given_v2.n_in());
        let width = self.nt() * self.nz();
        let mut m = vec![0.0; n1 * n2 * width];
        for v1 in 0..n1 {
            for v2 in 0..n2 {
                let out = &mut m[(v1 * n2 + v2) * width..(v1 * n2 + v2 + 1) * width];
                for x in 0..self.nx() {
                    let px = x_given_v1.prob(v1, x);
                    if px == 0.0 {
                        continue;
                    }
                    for y in 0..self.ny() {
                        let pxy = px * y_given_v2.prob(v2, y);
                        if pxy == 0.0 {
                            continue;
                        }
                        for (o, w) in out.iter_mut().zip(self.row(x, y)) {
                            *o += pxy * w;
                        }
                    }
                }
            }
        }
        WiretapMAC::from_channel(
            n1,
            n2,
            self.nt(),
            self.nz(),
            Channel::from_flat(n1 * n2, width, m)?,
        )
    }

    /// The same channel with the two senders relabelled: `W'(t,z|y,x) = W(t,z|x,y)`.
    pub fn swap_inputs(&self) -> WiretapMAC {
        let (nx, ny) = (self.nx(), self.ny());
        let mut m = Vec::with_capacity(self.w.matrix().len());
        for y in 0..ny {
            for x in 0..nx {
                m.extend_from_slice(self.row(x, y));
            }
        }
        WiretapMAC {
            x: self.y.clone(),
            y: self.x.clone(),
            t: self.t.clone(),
            z: self.z.clone(),
            w: Channel::from_flat(ny * nx, self.nt() * self.nz(), m)
                .expect("permuted rows stay stochastic"),
        }
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson {
            x: self.nx(),
            y: self.ny(),
            t: self.nt(),
            z: self.nz(),
            rows: self.w.rows(),
        }
    }

    pub fn from_json(j: &ChannelJson) -> Result<Self> {
        WiretapMAC::new(j.x, j.y, j.t, j.z, j.rows.clone())
    }

    /// Parses the channel JSON format; parse errors carry line and column.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: ChannelJson = serde_json::from_str(s).map_err(|e| {
            Error::validation(format!(
                "channel JSON, line {} column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        Self::from_json(&j)
    }
}

use serde::{Deserialize, Serialize};

use super::{ARITH_TOL, NORM_TOL};
use crate::{Error, Result};

/// A finite set `{0, …, size−1}` with optional display labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::validation("alphabet size must be at least 1"));
        }
        Ok(Alphabet { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::validation("alphabet size must be at least 1"));
        }
        Ok(Alphabet {
            size: labels.len(),
            labels: Some(labels),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }
}

fn check_mass(mass: &[f64], tol: f64, what: &str) -> Result<()> {
    if mass.is_empty() {
        return Err(Error::validation(format!(
            "{what}: empty probability vector"
        )));
    }
    let mut total = 0.0;
    for (i, &p) in mass.iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::validation(format!(
                "{what}: entry {i} is {p}, expected a nonnegative finite number"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > tol {
        return Err(Error::validation(format!(
            "{what}: total mass {total} differs from 1 by more than {tol:e}"
        )));
    }
    Ok(())
}

/// Probability distribution on a finite alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dist {
    alphabet: Alphabet,
    mass: Vec<f64>,
}

impl Dist {
    /// Validates nonnegativity and normalization within `1e-12`.
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        check_mass(&mass, NORM_TOL, "distribution")?;
        Ok(Dist {
            alphabet: Alphabet::new(mass.len())?,
            mass,
        })
    }

    /// Constructor for vectors produced by arithmetic (tolerance `1e-10`).
    pub fn from_arith(mass: Vec<f64>) -> Result<Self> {
        check_mass(&mass, ARITH_TOL, "derived distribution")?;
        Ok(Dist {
            alphabet: Alphabet::new(mass.len())?,
            mass,
        })
    }

    /// Rescales nonnegative weights to unit mass.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || !(total > 0.0) {
            return Err(Error::validation(
                "weights must be nonnegative with positive sum",
            ));
        }
        Ok(Dist {
            alphabet: Alphabet::new(weights.len())?,
            mass: weights.iter().map(|w| w / total).collect(),
        })
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Result<Self> {
        if alphabet.size() != self.mass.len() {
            return Err(Error::validation(
                "alphabet size does not match distribution length",
            ));
        }
        self.alphabet = alphabet;
        Ok(self)
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Alphabet::new(size)?;
        Dist::from_arith(vec![1.0 / size as f64; size])
    }

    pub fn point(size: usize, at: usize) -> Result<Self> {
        if at >= size {
            return Err(Error::validation(format!(
                "point mass at {at} outside alphabet of size {size}"
            )));
        }
        let mut mass = vec![0.0; size];
        mass[at] = 1.0;
        Dist::new(mass)
    }

    /// Binary distribution `(q, 1 − q)`.
    pub fn bernoulli(q: f64) -> Result<Self> {
        Dist::new(vec![q, 1.0 - q])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        super::joint::entropy_of_mass(&self.mass)
    }
}

/// Stochastic matrix from an input alphabet to an output alphabet.
///
/// Rows are stored contiguously; row `i` is the output law for input `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    input: Alphabet,
    output: Alphabet,
    matrix: Vec<f64>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(rows, NORM_TOL)
    }

    pub fn from_arith(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(rows, ARITH_TOL)
    }

    fn build(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::validation("channel needs at least one row"));
        }
        let width = rows[0].len();
        let mut matrix = Vec::with_capacity(rows.len() * width);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(Error::validation(format!(
                    "channel row {i} has length {}, expected {width}",
                    r.len()
                )));
            }
            check_mass(r, tol, &format!("channel row {i}"))?;
            matrix.extend_from_slice(r);
        }
        Ok(Channel {
            input: Alphabet::new(rows.len())?,
            output: Alphabet::new(width)?,
            matrix,
        })
    }

    /// Builds from a flat row-major matrix without copying rows.
    pub fn from_flat(n_in: usize, n_out: usize, matrix: Vec<f64>) -> Result<Self> {
        if matrix.len() != n_in * n_out {
            return Err(Error::validation("flat channel matrix has wrong length"));
        }
        for i in 0..n_in {
            check_mass(
                &matrix[i * n_out..(i + 1) * n_out],
                ARITH_TOL,
                &format!("channel row {i}"),
            )?;
        }
        Ok(Channel {
            input: Alphabet::new(n_in)?,
            output: Alphabet::new(n_out)?,
            matrix,
        })
    }

    pub fn identity(size: usize) -> Result<Self> {
        let rows = (0..size)
            .map(|i| {
                let mut r = vec![0.0; size];
                r[i] = 1.0;
                r
            })
            .collect();
        Channel::new(rows)
    }

    /// Every input maps to the same output law.
    pub fn constant(n_in: usize, row: &Dist) -> Result<Self> {
        Channel::from_arith(vec![row.mass().to_vec(); n_in])
    }

    /// Deterministic channel `x ↦ f[x]`.
    pub fn deterministic(f: &[usize], n_out: usize) -> Result<Self> {
        let rows = f
            .iter()
            .map(|&y| {
                if y >= n_out {
                    return Err(Error::validation(
                        "deterministic map leaves output alphabet",
                    ));
                }
                let mut r = vec![0.0; n_out];
                r[y] = 1.0;
                Ok(r)
            })
            .collect::<Result<Vec<_>>>()?;
        Channel::new(rows)
    }

    pub fn with_alphabets(mut self, input: Alphabet, output: Alphabet) -> Result<Self> {
        if input.size() != self.input.size() || output.size() != self.output.size() {
            return Err(Error::validation(
                "alphabet sizes do not match channel shape",
            ));
        }
        self.input = input;
        self.output = output;
        Ok(self)
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn n_in(&self) -> usize {
        self.input.size()
    }

    pub fn n_out(&self) -> usize {
        self.output.size()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.n_out();
        &self.matrix[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_in()).map(|i| self.row(i).to_vec()).collect()
    }

    #[inline]
    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.matrix[input * self.n_out() + output]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// `self` followed by `next`: `(next ∘ self)(c|a) = Σ_b self(b|a) next(c|b)`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if self.n_out() != next.n_in() {
            return Err(Error::validation(format!(
                "cannot compose channel with {} outputs into channel with {} inputs",
                self.n_out(),
                next.n_in()
            )));
        }
        let (a, b, c) = (self.n_in(), self.n_out(), next.n_out());
        let mut m = vec![0.0; a * c];
        for i in 0..a {
            for j in 0..b {
                let p = self.prob(i, j);
                if p == 0.0 {
                    continue;
                }
                for k in 0..c {
                    m[i * c + k] += p * next.prob(j, k);
                }
            }
        }
        Channel::from_flat(a, c, m)
    }

    /// Output law when the input is distributed as `input`.
    pub fn output_dist(&self, input: &Dist) -> Result<Dist> {
        if input.len() != self.n_in() {
            return Err(Error::validation(
                "input distribution does not match channel input",
            ));
        }
        let mut out = vec![0.0; self.n_out()];
        for (i, &p) in input.mass().iter().enumerate() {
            for (o, q) in out.iter_mut().zip(self.row(i)) {
                *o += p * q;
            }
        }
        Dist::from_arith(out)
    }
}

//! Ising and QUBO models, their energies, and the linear map between them.
//!
//! Biases are stored sparsely. Quadratic keys are canonical `(min, max)`
//! pairs; an absent entry is a zero coefficient. Offsets are carried
//! explicitly so that conversions preserve energies exactly.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical unordered pair `(min, max)`.
pub fn pair(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// An assignment of `±1` to each spin.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidModel(format!("spin value {bad} is not ±1")));
        }
        Ok(Self(values))
    }

    /// All spins `-1`.
    pub fn down(n: usize) -> Self {
        Self(vec![-1; n])
    }

    /// Spin vector from the low `n` bits of `bits`; bit `i` set means `s_i = +1`.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        Self(
            (0..n)
                .map(|i| if bits >> i & 1 == 1 { 1 } else { -1 })
                .collect(),
        )
    }

    /// Spins from a binary assignment via `s = 2x - 1`.
    pub fn from_binary(x: &[u8]) -> Self {
        Self(x.iter().map(|&b| if b != 0 { 1 } else { -1 }).collect())
    }

    /// Binary assignment via `x = (s + 1) / 2`.
    pub fn to_binary(&self) -> Vec<u8> {
        self.0.iter().map(|&s| u8::from(s > 0)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| -s).collect())
    }

    pub(crate) fn from_raw(values: Vec<i8>) -> Self {
        debug_assert!(values.iter().all(|&v| v == 1 || v == -1));
        Self(values)
    }
}

impl TryFrom<Vec<i8>> for SpinVector {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SpinVector> for Vec<i8> {
    fn from(s: SpinVector) -> Self {
        s.0
    }
}

impl fmt::Display for SpinVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(if *s > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelJson", into = "ModelJson")]
pub struct IsingModel {
    n: usize,
    h: BTreeMap<usize, f64>,
    j: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl IsingModel {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn num_variables(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn set_offset(&mut self, offset: f64) {
        self.offset = offset;
    }

    pub fn add_offset(&mut self, delta: f64) {
        self.offset += delta;
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::InvalidModel(format!(
                "variable index {i} out of range for {} variables",
                self.n
            )));
        }
        Ok(())
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<(usize, usize)> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::InvalidModel(format!("self-loop on variable {i}")));
        }
        Ok(pair(i, j))
    }

    pub fn set_linear(&mut self, i: usize, value: f64) -> Result<()> {
        self.check_index(i)?;
        self.h.insert(i, value);
        Ok(())
    }

    pub fn add_linear(&mut self, i: usize, delta: f64) -> Result<()> {
        self.check_index(i)?;
        *self.h.entry(i).or_insert(0.0) += delta;
        Ok(())
    }

    pub fn set_quadratic(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        let key = self.check_pair(i, j)?;
        self.j.insert(key, value);
        Ok(())
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, delta: f64) -> Result<()> {
        let key = self.check_pair(i, j)?;
        *self.j.entry(key).or_insert(0.0) += delta;
        Ok(())
    }

    pub fn linear(&self, i: usize) -> f64 {
        self.h.get(&i).copied().unwrap_or(0.0)
    }

    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        self.j.get(&pair(i, j)).copied().unwrap_or(0.0)
    }

    /// Stored linear biases in index order.
    pub fn linear_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.h.iter().map(|(&i, &v)| (i, v))
    }

    /// Stored quadratic biases in canonical pair order.
    pub fn quadratic_terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.j.iter().map(|(&k, &v)| (k, v))
    }

    pub fn num_interactions(&self) -> usize {
        self.j.len()
    }

    /// `offset + Σ_{i<j} J_ij s_i s_j + Σ_i h_i s_i`.
    pub fn energy(&self, s: &SpinVector) -> Result<f64> {
        if s.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: s.len(),
            });
        }
        Ok(self.energy_unchecked(s.as_slice()))
    }

    pub(crate) fn energy_unchecked(&self, s: &[i8]) -> f64 {
        let quad: f64 = self
            .j
            .iter()
            .map(|(&(a, b), &v)| v * f64::from(s[a] * s[b]))
            .sum();
        let lin: f64 = self.h.iter().map(|(&i, &v)| v * f64::from(s[i])).sum();
        self.offset + quad + lin
    }

    /// Every coefficient, including the offset, multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            n: self.n,
            h: self.h.iter().map(|(&i, &v)| (i, v * k)).collect(),
            j: self.j.iter().map(|(&p, &v)| (p, v * k)).collect(),
            offset: self.offset * k,
        }
    }

    pub fn max_abs_linear(&self) -> f64 {
        self.h.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_quadratic(&self) -> f64 {
        self.j.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn map_coefficients(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            n: self.n,
            h: self.h.iter().map(|(&i, &v)| (i, f(v))).collect(),
            j: self.j.iter().map(|(&p, &v)| (p, f(v))).collect(),
            offset: self.offset,
        }
    }
}

pub fn evaluate_ising(model: &IsingModel, s: &SpinVector) -> Result<f64> {
    model.energy(s)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuboModel {
    n: usize,
    q: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboModel {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn num_variables(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn add_offset(&mut self, delta: f64) {
        self.offset += delta;
    }

    /// Accumulate `value` on `x_i x_j`; `i == j` is the linear term of `x_i`.
    pub fn add(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidModel(format!(
                "pair ({i}, {j}) out of range for {} variables",
                self.n
            )));
        }
        *self.q.entry(pair(i, j)).or_insert(0.0) += value;
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.q.get(&pair(i, j)).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.q.iter().map(|(&k, &v)| (k, v))
    }

    pub fn num_linear(&self) -> usize {
        self.q.keys().filter(|(i, j)| i == j).count()
    }

    pub fn num_quadratic(&self) -> usize {
        self.q.keys().filter(|(i, j)| i != j).count()
    }

    pub fn energy(&self, x: &[u8]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        let sum: f64 = self
            .q
            .iter()
            .filter(|((i, j), _)| x[*i] != 0 && x[*j] != 0)
            .map(|(_, v)| v)
            .sum();
        Ok(self.offset + sum)
    }
}

/// Substitute `x_i = (s_i + 1) / 2`.
pub fn qubo_to_ising(q: &QuboModel) -> IsingModel {
    let mut m = IsingModel::new(q.n);
    m.offset = q.offset;
    for ((i, j), v) in q.terms() {
        if i == j {
            *m.h.entry(i).or_insert(0.0) += v / 2.0;
            m.offset += v / 2.0;
        } else {
            let w = v / 4.0;
            *m.j.entry((i, j)).or_insert(0.0) += w;
            *m.h.entry(i).or_insert(0.0) += w;
            *m.h.entry(j).or_insert(0.0) += w;
            m.offset += w;
        }
    }
    m
}

/// Substitute `s_i = 2 x_i - 1`; inverse of [`qubo_to_ising`].
pub fn ising_to_qubo(m: &IsingModel) -> QuboModel {
    let mut q = QuboModel::new(m.n);
    q.offset = m.offset;
    for (i, v) in m.linear_terms() {
        *q.q.entry((i, i)).or_insert(0.0) += 2.0 * v;
        q.offset -= v;
    }
    for ((i, j), v) in m.quadratic_terms() {
        *q.q.entry((i, j)).or_insert(0.0) += 4.0 * v;
        *q.q.entry((i, i)).or_insert(0.0) -= 2.0 * v;
        *q.q.entry((j, j)).or_insert(0.0) -= 2.0 * v;
        q.offset += v;
    }
    q
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    n: usize,
    h: BTreeMap<String, f64>,
    #[serde(rename = "J")]
    j: BTreeMap<String, f64>,
    offset: f64,
}

impl From<IsingModel> for ModelJson {
    fn from(m: IsingModel) -> Self {
        Self {
            n: m.n,
            h: m.h.iter().map(|(i, v)| (i.to_string(), *v)).collect(),
            j: m.j
                .iter()
                .map(|((a, b), v)| (format!("{a},{b}"), *v))
                .collect(),
            offset: m.offset,
        }
    }
}

impl TryFrom<ModelJson> for IsingModel {
    type Error = Error;

    fn try_from(raw: ModelJson) -> Result<Self> {
        let bad = |k: &str| Error::Parse {
            context: "ising model".into(),
            message: format!("bad key {k:?}"),
        };
        let mut m = IsingModel::new(raw.n);
        m.offset = raw.offset;
        for (k, v) in &raw.h {
            let i = k.trim().parse().map_err(|_| bad(k))?;
            m.add_linear(i, *v)?;
        }
        for (k, v) in &raw.j {
            let (a, b) = k.split_once(',').ok_or_else(|| bad(k))?;
            let a = a.trim().parse().map_err(|_| bad(k))?;
            let b = b.trim().parse().map_err(|_| bad(k))?;
            m.add_quadratic(a, b, *v)?;
        }
        Ok(m)
    }
}

//! Classical stand-in for the annealer: coefficient normalisation, an
//! input-noise precision model and a Metropolis simulated-annealing sampler.

use std::collections::HashMap;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};
use crate::seed::{self, stream, Rng};

/// Any backend that turns an Ising model into a sample set.
///
/// `stream` selects an independent random stream; the same `(model, stream)`
/// must always produce the same sample set.
pub trait Sampler: Sync {
    fn sample(&self, model: &IsingModel, stream: u64) -> Result<SampleSet>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerParams {
    pub num_reads: usize,
    pub num_sweeps: usize,
    pub beta_min: f64,
    pub beta_max: f64,
    pub seed: u64,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self {
            num_reads: 1000,
            num_sweeps: 1000,
            beta_min: 0.1,
            beta_max: 10.0,
            seed: 0,
        }
    }
}

impl SamplerParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_reads == 0 || self.num_sweeps == 0 {
            return Err(Error::InvalidParameter(
                "num_reads and num_sweeps must be at least 1".into(),
            ));
        }
        if !(self.beta_min > 0.0 && self.beta_min < self.beta_max && self.beta_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta schedule needs 0 < beta_min < beta_max, got {} .. {}",
                self.beta_min, self.beta_max
            )));
        }
        Ok(())
    }

    /// Geometric inverse-temperature schedule, one entry per sweep.
    pub fn beta_schedule(&self) -> Vec<f64> {
        let n = self.num_sweeps;
        if n == 1 {
            return vec![self.beta_max];
        }
        let ratio = (self.beta_max / self.beta_min).ln() / (n - 1) as f64;
        (0..n)
            .map(|k| self.beta_min * (ratio * k as f64).exp())
            .collect()
    }
}

/// Hardware coefficient ranges and analog control noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrecisionModel {
    pub h_range: f64,
    pub j_range: f64,
    pub noise_std: f64,
    pub enabled: bool,
}

impl Default for PrecisionModel {
    fn default() -> Self {
        Self {
            h_range: 4.0,
            j_range: 1.0,
            noise_std: 0.01,
            enabled: true,
        }
    }
}

impl PrecisionModel {
    pub fn noiseless() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0;
        if !positive(self.h_range)
            || !positive(self.j_range)
            || self.noise_std.is_nan()
            || self.noise_std < 0.0
        {
            return Err(Error::InvalidParameter(
                "precision ranges must be positive and noise std nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// Factor the model is divided by to fit the coefficient ranges.
    pub fn scale_for(&self, model: &IsingModel) -> f64 {
        (model.max_abs_linear() / self.h_range)
            .max(model.max_abs_quadratic() / self.j_range)
            .max(1.0)
    }
}

/// Divide every coefficient (and the offset) by the range-fitting scale, then,
/// when enabled, add independent Gaussian noise to each nonzero coefficient.
pub fn normalize_and_perturb(
    model: &IsingModel,
    precision: &PrecisionModel,
    rng: &mut Rng,
) -> IsingModel {
    let scale = precision.scale_for(model);
    let mut out = model.map_coefficients(|v| v / scale);
    out.set_offset(model.offset() / scale);
    if precision.enabled && precision.noise_std > 0.0 {
        let normal = Normal::new(0.0, precision.noise_std).expect("validated std");
        out = out.map_coefficients(|v| if v != 0.0 { v + normal.sample(rng) } else { v });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub spins: SpinVector,
    pub energy: f64,
    pub occurrences: usize,
}

/// Distinct samples sorted by ascending energy (ties by spin vector).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    samples: Vec<Sample>,
}

impl SampleSet {
    /// Aggregate raw reads; energies are taken against `model`.
    pub fn from_reads(model: &IsingModel, reads: Vec<Vec<i8>>) -> Self {
        let mut counts: HashMap<Vec<i8>, usize> = HashMap::new();
        for r in reads {
            *counts.entry(r).or_insert(0) += 1;
        }
        let mut samples: Vec<Sample> = counts
            .into_iter()
            .map(|(s, occurrences)| Sample {
                energy: model.energy_unchecked(&s),
                spins: SpinVector::from_raw(s),
                occurrences,
            })
            .collect();
        samples.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.spins.cmp(&b.spins))
        });
        Self { samples }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn lowest(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_reads(&self) -> usize {
        self.samples.iter().map(|s| s.occurrences).sum()
    }

    /// Reads whose energy is within `tol` of `target`.
    pub fn count_at_energy(&self, target: f64, tol: f64) -> usize {
        self.samples
            .iter()
            .filter(|s| (s.energy - target).abs() <= tol)
            .map(|s| s.occurrences)
            .sum()
    }
}

/// Compressed adjacency of a model for single-spin-flip sweeps.
#[derive(Clone, Debug)]
pub(crate) struct Couplings {
    pub h: Vec<f64>,
    pub start: Vec<usize>,
    pub neighbor: Vec<usize>,
    pub weight: Vec<f64>,
}

impl Couplings {
    pub fn new(model: &IsingModel) -> Self {
        let n = model.num_variables();
        let mut degree = vec![0usize; n];
        for ((a, b), _) in model.quadratic_terms() {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + degree[i];
        }
        let mut fill = start.clone();
        let mut neighbor = vec![0usize; start[n]];
        let mut weight = vec![0.0; start[n]];
        for ((a, b), v) in model.quadratic_terms() {
            neighbor[fill[a]] = b;
            weight[fill[a]] = v;
            fill[a] += 1;
            neighbor[fill[b]] = a;
            weight[fill[b]] = v;
            fill[b] += 1;
        }
        let h = (0..n).map(|i| model.linear(i)).collect();
        Self {
            h,
            start,
            neighbor,
            weight,
        }
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn local_fields(&self, s: &[i8]) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let r = self.start[i]..self.start[i + 1];
                self.h[i]
                    + self.neighbor[r.clone()]
                        .iter()
                        .zip(&self.weight[r])
                        .map(|(&j, &w)| w * f64::from(s[j]))
                        .sum::<f64>()
            })
            .collect()
    }

    #[inline]
    pub fn flip(&self, i: usize, s: &mut [i8], field: &mut [f64]) {
        s[i] = -s[i];
        let twice = 2.0 * f64::from(s[i]);
        for k in self.start[i]..self.start[i + 1] {
            field[self.neighbor[k]] += twice * self.weight[k];
        }
    }
}

// Proposals with beta * dE above this are rejected without drawing.
const MAX_EXPONENT: f64 = 40.0;

/// One annealing run from a uniformly random start.
pub(crate) fn anneal_read(c: &Couplings, betas: &[f64], rng: &mut Rng) -> Vec<i8> {
    let n = c.len();
    let mut s: Vec<i8> = (0..n)
        .map(|_| if rng.random::<bool>() { 1 } else { -1 })
        .collect();
    let mut field = c.local_fields(&s);
    for &beta in betas {
        for i in 0..n {
            let delta = -2.0 * f64::from(s[i]) * field[i];
            let accept = if delta <= 0.0 {
                true
            } else {
                let x = beta * delta;
                x < MAX_EXPONENT && rng.random::<f64>() < (-x).exp()
            };
            if accept {
                c.flip(i, &mut s, &mut field);
            }
        }
    }
    s
}

/// Simulated annealing with Metropolis single-spin-flip sweeps over a
/// geometric beta schedule, run on the normalised and perturbed model.
#[derive(Clone, Debug, Default)]
pub struct SimulatedAnnealer {
    pub params: SamplerParams,
    pub precision: PrecisionModel,
}

impl SimulatedAnnealer {
    pub fn new(params: SamplerParams, precision: PrecisionModel) -> Result<Self> {
        params.validate()?;
        precision.validate()?;
        Ok(Self { params, precision })
    }

    fn prepare(&self, model: &IsingModel, stream_id: u64) -> (Couplings, Vec<f64>, u64) {
        let call_seed = seed::derive(self.params.seed, &[stream::SAMPLER_CALL, stream_id]);
        let mut noise_rng = seed::rng(seed::derive(call_seed, &[stream::NOISE]));
        let submitted = normalize_and_perturb(model, &self.precision, &mut noise_rng);
        (
            Couplings::new(&submitted),
            self.params.beta_schedule(),
            call_seed,
        )
    }

    fn read(c: &Couplings, betas: &[f64], call_seed: u64, index: usize) -> Vec<i8> {
        let mut rng = seed::rng(seed::derive(call_seed, &[stream::READ, index as u64]));
        anneal_read(c, betas, &mut rng)
    }

    pub fn sample_sequential(&self, model: &IsingModel, stream_id: u64) -> SampleSet {
        let (c, betas, call_seed) = self.prepare(model, stream_id);
        let reads = (0..self.params.num_reads)
            .map(|r| Self::read(&c, &betas, call_seed, r))
            .collect();
        SampleSet::from_reads(model, reads)
    }

    #[cfg(feature = "parallel")]
    pub fn sample_parallel(&self, model: &IsingModel, stream_id: u64) -> SampleSet {
        use rayon::prelude::*;
        let (c, betas, call_seed) = self.prepare(model, stream_id);
        let reads = (0..self.params.num_reads)
            .into_par_iter()
            .map(|r| Self::read(&c, &betas, call_seed, r))
            .collect();
        SampleSet::from_reads(model, reads)
    }
}

impl Sampler for SimulatedAnnealer {
    fn sample(&self, model: &IsingModel, stream_id: u64) -> Result<SampleSet> {
        #[cfg(feature = "parallel")]
        return Ok(self.sample_parallel(model, stream_id));
        #[cfg(not(feature = "parallel"))]
        return Ok(self.sample_sequential(model, stream_id));
    }
}

/// Sample `model` with seed `params.seed`.
pub fn sample(
    model: &IsingModel,
    params: &SamplerParams,
    precision: &PrecisionModel,
) -> Result<SampleSet> {
    SimulatedAnnealer::new(params.clone(), precision.clone())?.sample(model, 0)
}

//! Exhaustive ground-state search for small models.

use crate::anneal::{Couplings, SampleSet, Sampler};
use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};

pub const EXACT_LIMIT: usize = 24;

const TIE_TOLERANCE: f64 = 1e-9;

/// Global minimiser by Gray-code enumeration. Energies within `1e-9` count as
/// ties and go to the lexicographically smallest spin vector (`-1 < +1`).
pub fn exact_solve(model: &IsingModel) -> Result<(SpinVector, f64)> {
    let n = model.num_variables();
    if n > EXACT_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: EXACT_LIMIT,
        });
    }
    let c = Couplings::new(model);
    let mut s = vec![-1i8; n];
    let mut field = c.local_fields(&s);
    let mut energy = model.energy_unchecked(&s);
    let mut best = s.clone();
    let mut best_energy = energy;
    for k in 1u64..1 << n {
        let i = k.trailing_zeros() as usize;
        energy += -2.0 * f64::from(s[i]) * field[i];
        c.flip(i, &mut s, &mut field);
        if energy < best_energy - TIE_TOLERANCE
            || (energy <= best_energy + TIE_TOLERANCE && s < best)
        {
            best.copy_from_slice(&s);
            best_energy = energy;
        }
    }
    let exact = model.energy_unchecked(&best);
    Ok((SpinVector::from_raw(best), exact))
}

/// Sampler backend that always returns the exact ground state.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactSampler;

impl Sampler for ExactSampler {
    fn sample(&self, model: &IsingModel, _stream: u64) -> Result<SampleSet> {
        let (spins, _) = exact_solve(model)?;
        Ok(SampleSet::from_reads(model, vec![spins.into_inner()]))
    }
}

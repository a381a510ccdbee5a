//! Broken-chain diagnostics and majority-vote unembedding.

use rand::Rng as _;

use crate::embed::ChainLayout;
use crate::error::{Error, Result};
use crate::ising::SpinVector;
use crate::seed::Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDiagnostics {
    /// Chains whose qubits disagree, ascending.
    pub broken: Vec<usize>,
    /// `σ_x − σ_y` for each coupler of [`ChainLayout::couplers`], in order.
    pub violations: Vec<i8>,
}

impl ChainDiagnostics {
    pub fn broken_count(&self) -> usize {
        self.broken.len()
    }

    pub fn is_intact(&self) -> bool {
        self.broken.is_empty()
    }
}

fn check_len(layout: &ChainLayout, s: &SpinVector) -> Result<()> {
    if s.len() != layout.num_qubits() {
        return Err(Error::Dimension {
            expected: layout.num_qubits(),
            got: s.len(),
        });
    }
    Ok(())
}

pub fn diagnose(layout: &ChainLayout, s: &SpinVector) -> Result<ChainDiagnostics> {
    check_len(layout, s)?;
    let v = s.as_slice();
    let violations = layout.couplers().iter().map(|c| v[c.x] - v[c.y]).collect();
    let broken = layout
        .chains()
        .iter()
        .enumerate()
        .filter(|(_, chain)| chain.iter().any(|&q| v[q] != v[chain[0]]))
        .map(|(i, _)| i)
        .collect();
    Ok(ChainDiagnostics { broken, violations })
}

/// How to resolve a chain with as many `+1` as `-1` qubits.
pub enum TieBreak<'a> {
    /// Seeded fair coin.
    Coin(&'a mut Rng),
    /// Value of the chain's first qubit.
    FirstQubit,
}

/// Each logical spin takes the most common value of its chain.
pub fn majority_vote(
    layout: &ChainLayout,
    s: &SpinVector,
    mut tie: TieBreak<'_>,
) -> Result<SpinVector> {
    check_len(layout, s)?;
    let v = s.as_slice();
    let logical = layout
        .chains()
        .iter()
        .map(|chain| {
            let total: i64 = chain.iter().map(|&q| i64::from(v[q])).sum();
            match total.signum() {
                1 => 1,
                -1 => -1,
                _ => match &mut tie {
                    TieBreak::Coin(rng) => {
                        if rng.random::<bool>() {
                            1
                        } else {
                            -1
                        }
                    }
                    TieBreak::FirstQubit => v[chain[0]],
                },
            }
        })
        .collect();
    Ok(SpinVector::from_raw(logical))
}

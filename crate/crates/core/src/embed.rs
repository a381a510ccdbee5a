//! Uniform spreading of a logical Ising model onto an embedding.
//!
//! Physical qubits are relabelled to a compact index space `0..Q` in
//! increasing hardware-id order, so the physical model only contains
//! qubits that belong to some chain.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ising::{IsingModel, SpinVector};
use crate::topology::{validate_embedding, Embedding, HardwareGraph};

/// A coupler joining two qubits of the same chain, oriented `x < y`
/// (compact indices, equivalently hardware ids).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainCoupler {
    pub x: usize,
    pub y: usize,
    pub chain: usize,
}

/// Chains over compact physical indices plus every intra-chain coupler.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLayout {
    chains: Vec<Vec<usize>>,
    couplers: Vec<ChainCoupler>,
    num_qubits: usize,
}

impl ChainLayout {
    pub fn new(
        chains: Vec<Vec<usize>>,
        mut couplers: Vec<ChainCoupler>,
        num_qubits: usize,
    ) -> Self {
        couplers.sort();
        Self {
            chains,
            couplers,
            num_qubits,
        }
    }

    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    pub fn couplers(&self) -> &[ChainCoupler] {
        &self.couplers
    }

    pub fn num_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Intact physical assignment with every chain set to its logical spin.
    pub fn lift(&self, logical: &SpinVector) -> Result<SpinVector> {
        if logical.len() != self.chains.len() {
            return Err(Error::Dimension {
                expected: self.chains.len(),
                got: logical.len(),
            });
        }
        let mut s = vec![-1i8; self.num_qubits];
        for (chain, &v) in self.chains.iter().zip(logical.as_slice()) {
            for &q in chain {
                s[q] = v;
            }
        }
        Ok(SpinVector::from_raw(s))
    }
}

#[derive(Clone, Debug)]
pub struct EmbeddedIsing {
    logical: IsingModel,
    base: IsingModel,
    qubits: Vec<usize>,
    layout: ChainLayout,
    fingerprint: String,
}

impl EmbeddedIsing {
    /// The logical problem being embedded.
    pub fn logical(&self) -> &IsingModel {
        &self.logical
    }

    /// Physical problem terms only; chain couplers carry no bias here.
    pub fn base(&self) -> &IsingModel {
        &self.base
    }

    /// Hardware id of each compact physical index.
    pub fn hardware_qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn layout(&self) -> &ChainLayout {
        &self.layout
    }

    pub fn chain_couplers(&self) -> &[ChainCoupler] {
        self.layout.couplers()
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }
}

/// Spread `h_i` evenly over the qubits of chain `i` and `J_ij` evenly over
/// the hardware couplers joining chains `i` and `j`.
pub fn embed_ising(
    model: &IsingModel,
    emb: &Embedding,
    hw: &HardwareGraph,
) -> Result<EmbeddedIsing> {
    if emb.num_chains() != model.num_variables() {
        return Err(Error::Dimension {
            expected: model.num_variables(),
            got: emb.num_chains(),
        });
    }
    let violations = validate_embedding(emb, &Graph::new(model.num_variables()), hw);
    if !violations.is_empty() {
        return Err(Error::InvalidEmbedding(violations));
    }

    let mut qubits: Vec<usize> = emb.chains().iter().flatten().copied().collect();
    qubits.sort_unstable();
    let compact: HashMap<usize, usize> = qubits.iter().enumerate().map(|(c, &q)| (q, c)).collect();
    let mut chain_of = vec![0usize; qubits.len()];
    let chains: Vec<Vec<usize>> = emb
        .chains()
        .iter()
        .enumerate()
        .map(|(var, chain)| {
            chain
                .iter()
                .map(|q| {
                    let c = compact[q];
                    chain_of[c] = var;
                    c
                })
                .collect()
        })
        .collect();

    let mut chain_couplers = Vec::new();
    let mut logical_couplers: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (a, b) in hw.couplers() {
        let (Some(&ca), Some(&cb)) = (compact.get(&a), compact.get(&b)) else {
            continue;
        };
        let (x, y) = if ca < cb { (ca, cb) } else { (cb, ca) };
        let (vx, vy) = (chain_of[x], chain_of[y]);
        if vx == vy {
            chain_couplers.push(ChainCoupler { x, y, chain: vx });
        } else {
            let key = if vx < vy { (vx, vy) } else { (vy, vx) };
            logical_couplers.entry(key).or_default().push((x, y));
        }
    }

    let mut base = IsingModel::new(qubits.len());
    base.set_offset(model.offset());
    for (i, h) in model.linear_terms() {
        if h == 0.0 {
            continue;
        }
        let share = h / chains[i].len() as f64;
        for &q in &chains[i] {
            base.add_linear(q, share)?;
        }
    }
    for ((i, j), v) in model.quadratic_terms() {
        if v == 0.0 {
            continue;
        }
        let couplers = logical_couplers
            .get(&(i, j))
            .filter(|c| !c.is_empty())
            .ok_or_else(|| {
                Error::EmbeddingInfeasible(format!("no hardware coupler joins chains {i} and {j}"))
            })?;
        let share = v / couplers.len() as f64;
        for &(x, y) in couplers {
            base.add_quadratic(x, y, share)?;
        }
    }

    Ok(EmbeddedIsing {
        logical: model.clone(),
        base,
        layout: ChainLayout::new(chains, chain_couplers, qubits.len()),
        qubits,
        fingerprint: emb.fingerprint(),
    })
}

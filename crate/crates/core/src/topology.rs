//! Hardware graphs, minor embeddings and their validation.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ising::pair;

/// Qubits per Chimera unit-cell shore.
pub const CHIMERA_SHORE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Chimera { m: usize },
    External,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardwareGraph {
    topology: Topology,
    qubits: BTreeSet<usize>,
    couplers: BTreeSet<(usize, usize)>,
    adjacency: HashMap<usize, Vec<usize>>,
}

impl HardwareGraph {
    pub fn new(
        topology: Topology,
        qubits: impl IntoIterator<Item = usize>,
        couplers: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let qubits: BTreeSet<usize> = qubits.into_iter().collect();
        let mut set = BTreeSet::new();
        let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
        for (a, b) in couplers {
            if a == b {
                return Err(Error::InvalidModel(format!(
                    "hardware self-loop on qubit {a}"
                )));
            }
            for q in [a, b] {
                if !qubits.contains(&q) {
                    return Err(Error::InvalidModel(format!(
                        "coupler ({a}, {b}) references unknown qubit {q}"
                    )));
                }
            }
            if set.insert(pair(a, b)) {
                adjacency.entry(a).or_default().push(b);
                adjacency.entry(b).or_default().push(a);
            }
        }
        Ok(Self {
            topology,
            qubits,
            couplers: set,
            adjacency,
        })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn num_couplers(&self) -> usize {
        self.couplers.len()
    }

    pub fn has_qubit(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }

    pub fn has_coupler(&self, a: usize, b: usize) -> bool {
        self.couplers.contains(&pair(a, b))
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.qubits.iter().copied()
    }

    pub fn couplers(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.couplers.iter().copied()
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        self.adjacency.get(&q).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_artifact(path)?;
        let raw: HardwareJson = serde_json::from_str(&text)?;
        Self::new(
            Topology::External,
            raw.qubits,
            raw.couplers.into_iter().map(|[a, b]| (a, b)),
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let raw = HardwareJson {
            qubits: self.qubits.iter().copied().collect(),
            couplers: self.couplers.iter().map(|&(a, b)| [a, b]).collect(),
        };
        std::fs::write(path, serde_json::to_string(&raw)?)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct HardwareJson {
    qubits: Vec<usize>,
    couplers: Vec<[usize; 2]>,
}

/// Linear index of Chimera qubit `(row, col, u, k)`; `u = 0` is the
/// vertical shore, `u = 1` the horizontal one.
pub fn chimera_index(m: usize, row: usize, col: usize, u: usize, k: usize) -> usize {
    ((row * m + col) * 2 + u) * CHIMERA_SHORE + k
}

/// An `m × m` grid of `K_{4,4}` unit cells.
pub fn chimera_graph(m: usize) -> Result<HardwareGraph> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "chimera size must be at least 1".into(),
        ));
    }
    let t = CHIMERA_SHORE;
    let q = |r, c, u, k| chimera_index(m, r, c, u, k);
    let mut couplers = Vec::with_capacity(16 * m * m + 8 * m * (m - 1));
    for r in 0..m {
        for c in 0..m {
            for k in 0..t {
                for l in 0..t {
                    couplers.push((q(r, c, 0, k), q(r, c, 1, l)));
                }
                if r + 1 < m {
                    couplers.push((q(r, c, 0, k), q(r + 1, c, 0, k)));
                }
                if c + 1 < m {
                    couplers.push((q(r, c, 1, k), q(r, c + 1, 1, k)));
                }
            }
        }
    }
    HardwareGraph::new(Topology::Chimera { m }, 0..2 * t * m * m, couplers)
}

/// Chains indexed by logical variable; each chain is a list of hardware qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    chains: Vec<Vec<usize>>,
}

impl Embedding {
    pub fn new(chains: Vec<Vec<usize>>) -> Self {
        Self { chains }
    }

    pub fn num_chains(&self) -> usize {
        self.chains.len()
    }

    pub fn chain(&self, i: usize) -> &[usize] {
        &self.chains[i]
    }

    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    pub fn max_chain_length(&self) -> usize {
        self.chains.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn num_qubits(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    /// Hex SHA-256 over the canonical chain listing.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (i, chain) in self.chains.iter().enumerate() {
            hasher.update(format!("{i}:"));
            for q in chain {
                hasher.update(format!("{q},"));
            }
            hasher.update(";");
        }
        hex::encode(hasher.finalize())
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = EmbeddingJson {
            chains: self
                .chains
                .iter()
                .enumerate()
                .map(|(i, c)| (i.to_string(), c.clone()))
                .collect(),
        };
        Ok(serde_json::to_string(&raw)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: EmbeddingJson = serde_json::from_str(text)?;
        let mut indexed = BTreeMap::new();
        for (k, chain) in raw.chains {
            let i: usize = k.trim().parse().map_err(|_| Error::Parse {
                context: "embedding".into(),
                message: format!("logical index {k:?} is not an integer"),
            })?;
            indexed.insert(i, chain);
        }
        if let Some(pos) = indexed.keys().enumerate().position(|(pos, &i)| pos != i) {
            return Err(Error::Parse {
                context: "embedding".into(),
                message: format!("logical indices must be contiguous from 0; missing {pos}"),
            });
        }
        Ok(Self::new(indexed.into_values().collect()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Read an embedding and check it against `hw`: chains must be
    /// non-empty, disjoint, connected and made of hardware qubits.
    pub fn load(path: &Path, hw: &HardwareGraph) -> Result<Self> {
        let emb = Self::from_json(&read_artifact(path)?)?;
        let violations = validate_embedding(&emb, &Graph::new(emb.num_chains()), hw);
        if !violations.is_empty() {
            return Err(Error::InvalidEmbedding(violations));
        }
        Ok(emb)
    }
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    chains: BTreeMap<String, Vec<usize>>,
}

pub(crate) fn read_artifact(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingArtifact {
            path: path.to_path_buf(),
            reason: "file not found".into(),
        },
        _ => Error::Io(e),
    })
}

/// Native clique embedding of `K_n` into `chimera(m)`, `n ≤ 4m`.
///
/// Variable `4i + k` owns the vertical qubits `(r, i, 0, k)` for `r ≤ i`
/// and the horizontal qubits `(i, c, 1, k)` for `c ≥ i`, joined inside
/// cell `(i, i)`. Every chain has exactly `m + 1` qubits.
pub fn clique_embedding(n: usize, hw: &HardwareGraph) -> Result<Embedding> {
    let m = match hw.topology() {
        Topology::Chimera { m } => m,
        Topology::External => {
            return Err(Error::InvalidParameter(
                "clique embedding requires a chimera hardware graph".into(),
            ))
        }
    };
    if n > CHIMERA_SHORE * m {
        return Err(Error::Capacity(format!(
            "K_{n} does not fit chimera({m}); at most {} logical variables",
            CHIMERA_SHORE * m
        )));
    }
    let chains = (0..n)
        .map(|v| {
            let (i, k) = (v / CHIMERA_SHORE, v % CHIMERA_SHORE);
            let vertical = (0..=i).map(|r| chimera_index(m, r, i, 0, k));
            let horizontal = (i..m).map(|c| chimera_index(m, i, c, 1, k));
            vertical.chain(horizontal).collect()
        })
        .collect();
    Ok(Embedding::new(chains))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyChain {
        var: usize,
    },
    UnknownQubit {
        var: usize,
        qubit: usize,
    },
    Overlap {
        qubit: usize,
        first: usize,
        second: usize,
    },
    Disconnected {
        var: usize,
    },
    MissingChain {
        var: usize,
    },
    MissingCoupling {
        i: usize,
        j: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EmptyChain { var } => write!(f, "chain {var} is empty"),
            Self::UnknownQubit { var, qubit } => {
                write!(
                    f,
                    "chain {var} uses qubit {qubit} which is not in the hardware graph"
                )
            }
            Self::Overlap {
                qubit,
                first,
                second,
            } => {
                write!(f, "qubit {qubit} belongs to chains {first} and {second}")
            }
            Self::Disconnected { var } => write!(f, "chain {var} is not connected"),
            Self::MissingChain { var } => write!(f, "logical variable {var} has no chain"),
            Self::MissingCoupling { i, j } => {
                write!(f, "no hardware coupler joins chains {i} and {j}")
            }
        }
    }
}

/// Every way `emb` fails to be a minor embedding of `logical` into `hw`.
pub fn validate_embedding(emb: &Embedding, logical: &Graph, hw: &HardwareGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut owner: HashMap<usize, usize> = HashMap::new();
    for (var, chain) in emb.chains.iter().enumerate() {
        if chain.is_empty() {
            out.push(Violation::EmptyChain { var });
        }
        let mut connected_candidate = true;
        for &q in chain {
            if !hw.has_qubit(q) {
                out.push(Violation::UnknownQubit { var, qubit: q });
                connected_candidate = false;
            }
            match owner.get(&q) {
                Some(&first) if first != var => out.push(Violation::Overlap {
                    qubit: q,
                    first,
                    second: var,
                }),
                Some(_) => {}
                None => {
                    owner.insert(q, var);
                }
            }
        }
        if connected_candidate && !chain.is_empty() && !is_connected(chain, hw) {
            out.push(Violation::Disconnected { var });
        }
    }
    for var in emb.num_chains()..logical.num_vertices() {
        out.push(Violation::MissingChain { var });
    }
    let mut joined: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (a, b) in hw.couplers() {
        if let (Some(&ca), Some(&cb)) = (owner.get(&a), owner.get(&b)) {
            if ca != cb {
                joined.insert(pair(ca, cb));
            }
        }
    }
    for (i, j) in logical.edges() {
        if i < emb.num_chains() && j < emb.num_chains() && !joined.contains(&(i, j)) {
            out.push(Violation::MissingCoupling { i, j });
        }
    }
    out
}

fn is_connected(chain: &[usize], hw: &HardwareGraph) -> bool {
    let members: BTreeSet<usize> = chain.iter().copied().collect();
    let mut seen = BTreeSet::from([chain[0]]);
    let mut queue = VecDeque::from([chain[0]]);
    while let Some(q) = queue.pop_front() {
        for &nb in hw.neighbors(q) {
            if members.contains(&nb) && seen.insert(nb) {
                queue.push_back(nb);
            }
        }
    }
    seen.len() == members.len()
}

//! Maximum clique as a QUBO, solution scoring and an exact oracle.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ising::{qubo_to_ising, IsingModel, QuboModel, SpinVector};

pub const BRANCH_AND_BOUND_LIMIT: usize = 40;
pub const ENUMERATION_LIMIT: usize = 20;

/// Weights used throughout the experiments.
pub const DEFAULT_A: f64 = 1.0;
pub const DEFAULT_B: f64 = 2.0;

/// `-A Σ x_i + B Σ_{(i,j) ∉ E} x_i x_j`; requires `0 < A < B`.
pub fn clique_qubo(g: &Graph, a: f64, b: f64) -> Result<QuboModel> {
    if !(a > 0.0 && a < b) {
        return Err(Error::InvalidParameter(format!(
            "clique weights need 0 < A < B, got A = {a}, B = {b}"
        )));
    }
    let mut q = QuboModel::new(g.num_vertices());
    for i in 0..g.num_vertices() {
        q.add(i, i, -a)?;
    }
    for (i, j) in g.complement_edges() {
        q.add(i, j, b)?;
    }
    Ok(q)
}

/// Logical Ising model of the clique QUBO with the default weights.
pub fn clique_ising(g: &Graph) -> IsingModel {
    qubo_to_ising(&clique_qubo(g, DEFAULT_A, DEFAULT_B).expect("default weights are valid"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueExtraction {
    pub vertices: Vec<usize>,
    pub valid: bool,
    /// Clique size when valid, zero otherwise.
    pub size: usize,
}

/// Score a binary assignment as-is; no repair is attempted.
pub fn extract_clique(g: &Graph, x: &[u8]) -> Result<CliqueExtraction> {
    if x.len() != g.num_vertices() {
        return Err(Error::Dimension {
            expected: g.num_vertices(),
            got: x.len(),
        });
    }
    let vertices: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0).collect();
    let valid = vertices
        .iter()
        .enumerate()
        .all(|(k, &a)| vertices[k + 1..].iter().all(|&b| g.has_edge(a, b)));
    let size = if valid { vertices.len() } else { 0 };
    Ok(CliqueExtraction {
        vertices,
        valid,
        size,
    })
}

pub fn extract_clique_from_spins(g: &Graph, s: &SpinVector) -> Result<CliqueExtraction> {
    extract_clique(g, &s.to_binary())
}

fn adjacency_masks(g: &Graph) -> Vec<u64> {
    let mut adj = vec![0u64; g.num_vertices()];
    for (a, b) in g.edges() {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    adj
}

/// Exact clique number by branch and bound over vertex bitsets.
pub fn brute_force_max_clique(g: &Graph) -> Result<usize> {
    let n = g.num_vertices();
    if n > BRANCH_AND_BOUND_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: BRANCH_AND_BOUND_LIMIT,
        });
    }
    fn expand(adj: &[u64], size: usize, mut candidates: u64, best: &mut usize) {
        *best = (*best).max(size);
        while candidates != 0 {
            if size + candidates.count_ones() as usize <= *best {
                return;
            }
            let v = candidates.trailing_zeros() as usize;
            candidates &= !(1 << v);
            expand(adj, size + 1, candidates & adj[v], best);
        }
    }
    let adj = adjacency_masks(g);
    let all = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
    let mut best = 0;
    expand(&adj, 0, all, &mut best);
    Ok(best)
}

/// Exact clique number by checking every vertex subset.
pub fn enumerate_max_clique(g: &Graph) -> Result<usize> {
    let n = g.num_vertices();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let adj = adjacency_masks(g);
    let best = (0u64..1 << n)
        .filter(|&set| {
            (0..n)
                .filter(|&v| set >> v & 1 == 1)
                .all(|v| (set & !(1 << v)) & !adj[v] == 0)
        })
        .map(|set| set.count_ones() as usize)
        .max()
        .unwrap_or(0);
    Ok(best)
}

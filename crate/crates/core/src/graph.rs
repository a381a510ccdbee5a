//! Simple undirected graphs, G(n, p) generation and graph file formats.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::pair;
use crate::seed;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::new(n);
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                g.edges.insert((i, j));
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 0..n {
            g.edges.insert(pair(i, (i + 1) % n));
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a >= self.n || b >= self.n {
            return Err(Error::InvalidModel(format!(
                "edge ({a}, {b}) out of range for {} vertices",
                self.n
            )));
        }
        if a == b {
            return Err(Error::InvalidModel(format!("self-loop on vertex {a}")));
        }
        self.edges.insert(pair(a, b));
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.edges.contains(&pair(a, b))
    }

    /// Edges as canonical `(i, j)` pairs with `i < j`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Edges of the complement graph, in canonical order.
    pub fn complement_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n)
            .flat_map(move |i| (i + 1..self.n).map(move |j| (i, j)))
            .filter(|e| !self.edges.contains(e))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| *a == v || *b == v)
            .count()
    }

    /// DIMACS edge format: `p edge n m` then `e i j` lines, 1-indexed.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p edge {} {}", self.n, self.edges.len());
        for (a, b) in &self.edges {
            let _ = writeln!(out, "e {} {}", a + 1, b + 1);
        }
        out
    }

    pub fn from_dimacs(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            context: format!("DIMACS line {line}"),
            message,
        };
        let mut graph: Option<Graph> = None;
        let mut declared_edges = 0;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let no = no + 1;
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut fields = line.split_whitespace();
            match fields.next() {
                Some("p") => {
                    if graph.is_some() {
                        return Err(err(no, "duplicate problem line".into()));
                    }
                    let kind = fields.next().unwrap_or_default();
                    if kind != "edge" && kind != "col" {
                        return Err(err(no, format!("unsupported problem type {kind:?}")));
                    }
                    let n = parse_field(fields.next())
                        .ok_or_else(|| err(no, "bad vertex count".into()))?;
                    declared_edges = parse_field(fields.next())
                        .ok_or_else(|| err(no, "bad edge count".into()))?;
                    graph = Some(Graph::new(n));
                }
                Some("e") => {
                    let g = graph
                        .as_mut()
                        .ok_or_else(|| err(no, "edge before problem line".into()))?;
                    let a: usize =
                        parse_field(fields.next()).ok_or_else(|| err(no, "bad endpoint".into()))?;
                    let b: usize =
                        parse_field(fields.next()).ok_or_else(|| err(no, "bad endpoint".into()))?;
                    if a == 0 || b == 0 {
                        return Err(err(no, "DIMACS vertices are 1-indexed".into()));
                    }
                    g.add_edge(a - 1, b - 1)
                        .map_err(|e| err(no, e.to_string()))?;
                }
                Some(other) => return Err(err(no, format!("unknown line type {other:?}"))),
                None => {}
            }
        }
        let g = graph.ok_or_else(|| err(0, "missing problem line".into()))?;
        if g.num_edges() != declared_edges {
            log::warn!(
                "DIMACS header declares {declared_edges} edges, found {} distinct",
                g.num_edges()
            );
        }
        Ok(g)
    }
}

fn parse_field<T: std::str::FromStr>(f: Option<&str>) -> Option<T> {
    f.and_then(|s| s.parse().ok())
}

/// Erdős–Rényi G(n, p): each pair `(i, j)`, `i < j`, visited in row-major
/// order and kept when a uniform draw in `[0, 1)` falls below `p`.
pub fn gnp_random_graph(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {p} not in [0, 1]"
        )));
    }
    let mut rng = seed::rng(seed);
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                g.edges.insert((i, j));
            }
        }
    }
    Ok(g)
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        Self {
            n: g.n,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(raw: GraphJson) -> Result<Self> {
        Graph::from_edges(raw.n, raw.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

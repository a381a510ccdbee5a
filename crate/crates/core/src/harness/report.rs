use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::IterationRow;
use super::{metadata_header, write_csv, ExperimentConfig};
use crate::error::{Error, Result};
use crate::methods::{LagrangeState, Method};
use crate::topology::{read_artifact, Embedding};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: Method,
    pub n: usize,
    pub graphs: usize,
    pub mean_best_clique: f64,
    pub mean_mu_final: f64,
    pub mean_mu_at_best: f64,
    pub mean_best_iteration: f64,
    pub mean_iterations: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaBin {
    pub source: String,
    pub n: usize,
    pub bin: i64,
    pub count: usize,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainTraceRow {
    pub source: String,
    pub n: usize,
    pub graph: String,
    pub chain: usize,
    pub kind: String,
    pub qubit_a: usize,
    pub qubit_b: Option<usize>,
    pub lambda: Option<f64>,
    pub bias: f64,
}

struct RunStats {
    best_clique: usize,
    mu_final: f64,
    mu_at_best: f64,
    best_iteration: usize,
    iterations: usize,
}

fn run_stats(rows: &[&IterationRow]) -> RunStats {
    let best = rows.iter().map(|r| r.clique_size).max().unwrap_or(0);
    let at_best = rows
        .iter()
        .find(|r| r.clique_size == best)
        .expect("non-empty run");
    let last = rows.last().expect("non-empty run");
    RunStats {
        best_clique: best,
        mu_final: last.mu,
        mu_at_best: at_best.mu,
        best_iteration: at_best.iteration,
        iterations: rows.len(),
    }
}

/// Per (method, size) means over graphs. When a graph was run more than
/// once, the repeat with the largest clique (earliest on ties) represents it.
pub fn summarize(rows: &[IterationRow]) -> Vec<SummaryRow> {
    let mut runs: BTreeMap<(Method, usize, usize, usize), Vec<&IterationRow>> = BTreeMap::new();
    for r in rows {
        runs.entry((r.method, r.n, r.graph_index, r.repeat))
            .or_default()
            .push(r);
    }
    let mut per_graph: BTreeMap<(Method, usize, usize), RunStats> = BTreeMap::new();
    for ((method, n, graph, _), mut run) in runs {
        run.sort_by_key(|r| r.iteration);
        let stats = run_stats(&run);
        match per_graph.get(&(method, n, graph)) {
            Some(prev) if prev.best_clique >= stats.best_clique => {}
            _ => {
                per_graph.insert((method, n, graph), stats);
            }
        }
    }
    let mut groups: BTreeMap<(Method, usize), Vec<RunStats>> = BTreeMap::new();
    for ((method, n, _), stats) in per_graph {
        groups.entry((method, n)).or_default().push(stats);
    }
    groups
        .into_iter()
        .map(|((method, n), stats)| {
            let k = stats.len() as f64;
            let mean = |f: &dyn Fn(&RunStats) -> f64| stats.iter().map(f).sum::<f64>() / k;
            SummaryRow {
                method,
                n,
                graphs: stats.len(),
                mean_best_clique: mean(&|s| s.best_clique as f64),
                mean_mu_final: mean(&|s| s.mu_final),
                mean_mu_at_best: mean(&|s| s.mu_at_best),
                mean_best_iteration: mean(&|s| s.best_iteration as f64),
                mean_iterations: mean(&|s| s.iterations as f64),
            }
        })
        .collect()
}

/// Histogram of multipliers in unit-width bins centred on integers.
pub fn lambda_histogram(source: &str, n: usize, values: &[f64]) -> Vec<LambdaBin> {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v.round() as i64).or_default() += 1;
    }
    let total = values.len() as f64;
    counts
        .into_iter()
        .map(|(bin, count)| LambdaBin {
            source: source.to_string(),
            n,
            bin,
            count,
            density: count as f64 / total,
        })
        .collect()
}

/// Multipliers on the couplers of one chain and the net linear bias they put
/// on each of its qubits.
pub(crate) fn chain_trace_rows(
    source: &str,
    n: usize,
    graph: &str,
    emb: &Embedding,
    state: &LagrangeState,
    chain: usize,
) -> Vec<ChainTraceRow> {
    let Some(qubits) = emb.chains().get(chain) else {
        return Vec::new();
    };
    let members: BTreeSet<usize> = qubits.iter().copied().collect();
    let row = |kind: &str, a, b, lambda, bias| ChainTraceRow {
        source: source.to_string(),
        n,
        graph: graph.to_string(),
        chain,
        kind: kind.to_string(),
        qubit_a: a,
        qubit_b: b,
        lambda,
        bias,
    };
    let mut net: BTreeMap<usize, f64> = members.iter().map(|&q| (q, 0.0)).collect();
    let mut rows = Vec::new();
    for (&(x, y), &l) in &state.lambda {
        if members.contains(&x) && members.contains(&y) {
            rows.push(row("coupler", x, Some(y), Some(l), -state.mu));
            *net.get_mut(&x).expect("member") += l;
            *net.get_mut(&y).expect("member") -= l;
        }
    }
    rows.extend(net.into_iter().map(|(q, b)| row("qubit", q, None, None, b)));
    rows
}

pub fn read_iterations(path: &Path) -> Result<Vec<IterationRow>> {
    let text = read_artifact(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|r| {
            r.map_err(|e| Error::Parse {
                context: path.display().to_string(),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Recompute `summary.csv` from an existing `iterations.csv`.
pub fn cmd_report(cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = cfg.results_dir();
    let rows = read_iterations(&dir.join("iterations.csv"))?;
    let path = dir.join("summary.csv");
    write_csv(&path, &metadata_header(cfg, "report")?, &summarize(&rows))?;
    Ok(path)
}

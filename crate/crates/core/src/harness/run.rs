use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::gen::{embedding_for, hardware_for, Manifest, Split};
use super::report::{chain_trace_rows, lambda_histogram, summarize, ChainTraceRow, LambdaBin};
use super::{metadata_header, write_csv, ExperimentConfig};
use crate::anneal::{SamplerParams, SimulatedAnnealer};
use crate::embed::{embed_ising, EmbeddedIsing};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::maxclique::{clique_ising, extract_clique_from_spins};
use crate::methods::{
    run_alm, run_alm_set_once, run_alm_set_plus, run_pm, run_sm, LagrangeState, Method,
    MethodConfig, RunResult,
};
use crate::seed;
use crate::topology::Embedding;

/// One (method, graph, repeat) run and the clique size at each iteration.
#[derive(Clone, Debug)]
pub struct Cell {
    pub method: Method,
    pub n: usize,
    pub graph: String,
    pub graph_index: usize,
    pub repeat: usize,
    pub result: RunResult,
    pub clique_sizes: Vec<usize>,
}

impl Cell {
    pub fn best_clique(&self) -> usize {
        self.clique_sizes.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub method: Method,
    pub n: usize,
    pub graph: String,
    pub graph_index: usize,
    pub repeat: usize,
    pub iteration: usize,
    pub mu: f64,
    pub broken_count: usize,
    pub objective: f64,
    pub clique_size: usize,
    pub best_clique_so_far: usize,
}

impl Cell {
    pub fn rows(&self) -> Vec<IterationRow> {
        let mut best = 0;
        self.result
            .records
            .iter()
            .zip(&self.clique_sizes)
            .map(|(r, &size)| {
                best = best.max(size);
                IterationRow {
                    method: self.method,
                    n: self.n,
                    graph: self.graph.clone(),
                    graph_index: self.graph_index,
                    repeat: self.repeat,
                    iteration: r.iteration,
                    mu: r.mu,
                    broken_count: r.broken_count,
                    objective: r.objective,
                    clique_size: size,
                    best_clique_so_far: best,
                }
            })
            .collect()
    }
}

/// Size, embedding and stored state (if loaded) used for one graph size.
pub type SizeArtifacts = (usize, Embedding, Option<LagrangeState>);

/// Everything needed to run the methods on one graph size.
struct SizeContext {
    n: usize,
    embedding: Embedding,
    graphs: Vec<(String, Graph)>,
    problems: Vec<EmbeddedIsing>,
    stored: Option<LagrangeState>,
}

fn prepare_size(cfg: &ExperimentConfig, manifest: &Manifest, n: usize) -> Result<SizeContext> {
    let hw = hardware_for(cfg, n)?;
    let embedding = embedding_for(cfg, n, &hw)?;
    let instances = manifest.select(n, Split::Eval);
    if instances.len() < cfg.graphs_per_size {
        return Err(Error::MissingArtifact {
            path: cfg.instances_dir().join("manifest.json"),
            reason: format!(
                "{} evaluation graphs of size {n} requested, {} generated",
                cfg.graphs_per_size,
                instances.len()
            ),
        });
    }
    let mut graphs = Vec::new();
    let mut problems = Vec::new();
    for inst in instances.into_iter().take(cfg.graphs_per_size) {
        let g = inst.load_graph(cfg)?;
        problems.push(embed_ising(&clique_ising(&g), &embedding, &hw)?);
        graphs.push((inst.id.clone(), g));
    }
    let needs_state = cfg
        .methods
        .iter()
        .any(|m| matches!(m, Method::AlmSet | Method::AlmSetPlus));
    let stored = if needs_state {
        let path = cfg.state_path(n);
        if !path.exists() {
            return Err(Error::MissingArtifact {
                path,
                reason: format!(
                    "no stored lagrange state for embedding {}; run train-set first",
                    embedding.fingerprint()
                ),
            });
        }
        Some(LagrangeState::load(&path)?)
    } else {
        None
    };
    Ok(SizeContext {
        n,
        embedding,
        graphs,
        problems,
        stored,
    })
}

fn cell_configs(
    cfg: &ExperimentConfig,
    seed: u64,
    n: usize,
    graph: usize,
    repeat: usize,
) -> (SamplerParams, MethodConfig) {
    let cell_seed = seed::derive(seed, &[n as u64, graph as u64, repeat as u64]);
    (
        SamplerParams {
            seed: cell_seed,
            ..cfg.sampler.clone()
        },
        MethodConfig {
            seed: cell_seed,
            ..cfg.method.clone()
        },
    )
}

fn run_cell(
    cfg: &ExperimentConfig,
    ctx: &SizeContext,
    method: Method,
    graph: usize,
    repeat: usize,
    seed: u64,
) -> Result<Cell> {
    let (params, mcfg) = cell_configs(cfg, seed, ctx.n, graph, repeat);
    let sampler = SimulatedAnnealer::new(params, cfg.precision.clone())?;
    let e = &ctx.problems[graph];
    let stored = || ctx.stored.as_ref().expect("state loaded for set methods");
    let result = match method {
        Method::Sm => run_sm(e, &sampler, &mcfg)?,
        Method::Pm => run_pm(e, &sampler, &mcfg)?,
        Method::Alm => run_alm(e, &sampler, &mcfg)?,
        Method::AlmSet => run_alm_set_once(stored(), e, &sampler, &mcfg)?,
        Method::AlmSetPlus => run_alm_set_plus(stored(), e, &sampler, &mcfg)?,
    };
    let (id, g) = &ctx.graphs[graph];
    let clique_sizes = result
        .records
        .iter()
        .map(|r| extract_clique_from_spins(g, &r.logical).map(|c| c.size))
        .collect::<Result<_>>()?;
    log::info!(
        "{method} {id} repeat {repeat}: {} iterations",
        result.iterations()
    );
    Ok(Cell {
        method,
        n: ctx.n,
        graph: id.clone(),
        graph_index: graph,
        repeat,
        result,
        clique_sizes,
    })
}

/// Run every configured method on every evaluation graph. Cells are
/// independent and may run concurrently; the output order is
/// (method, size, graph, repeat).
pub fn execute(
    cfg: &ExperimentConfig,
    manifest: &Manifest,
) -> Result<(Vec<Cell>, Vec<SizeArtifacts>)> {
    cfg.validate()?;
    let seed = cfg.require_seed()?;
    let contexts: Vec<SizeContext> = cfg
        .sizes
        .iter()
        .map(|&n| prepare_size(cfg, manifest, n))
        .collect::<Result<_>>()?;
    let methods: BTreeSet<Method> = cfg.methods.iter().copied().collect();
    let mut tasks = Vec::new();
    for &method in &methods {
        for (ci, ctx) in contexts.iter().enumerate() {
            for graph in 0..ctx.graphs.len() {
                for repeat in 0..cfg.repeats {
                    tasks.push((method, ci, graph, repeat));
                }
            }
        }
    }
    let run = |&(method, ci, graph, repeat): &(Method, usize, usize, usize)| {
        run_cell(cfg, &contexts[ci], method, graph, repeat, seed)
    };
    #[cfg(feature = "parallel")]
    let cells: Vec<Cell> = {
        use rayon::prelude::*;
        tasks.par_iter().map(run).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let cells: Vec<Cell> = tasks.iter().map(run).collect::<Result<_>>()?;
    let embeddings = contexts
        .into_iter()
        .map(|c| (c.n, c.embedding, c.stored))
        .collect();
    Ok((cells, embeddings))
}

/// Run the experiment and write `iterations.csv`, `summary.csv`,
/// `lambda_hist.csv` and `chain_trace.csv` into the results directory.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let manifest = super::gen::load_manifest(cfg)?;
    let (cells, embeddings) = execute(cfg, &manifest)?;
    let header = metadata_header(cfg, "run")?;
    let dir = cfg.results_dir();

    let rows: Vec<IterationRow> = cells.iter().flat_map(Cell::rows).collect();
    let summary = summarize(&rows);

    let mut hist: Vec<LambdaBin> = Vec::new();
    let mut trace: Vec<ChainTraceRow> = Vec::new();
    for (n, emb, stored) in &embeddings {
        let alm: Vec<&Cell> = cells
            .iter()
            .filter(|c| c.method == Method::Alm && c.n == *n)
            .collect();
        if !alm.is_empty() {
            let values: Vec<f64> = alm
                .iter()
                .flat_map(|c| c.result.final_state.lambda.values().copied())
                .collect();
            hist.extend(lambda_histogram("alm", *n, &values));
            let first = alm[0];
            trace.extend(chain_trace_rows(
                "alm",
                *n,
                &first.graph,
                emb,
                &first.result.final_state,
                cfg.designated_chain,
            ));
        }
        if let Some(state) = stored {
            let values: Vec<f64> = state.lambda.values().copied().collect();
            hist.extend(lambda_histogram("alm-set", *n, &values));
            trace.extend(chain_trace_rows(
                "alm-set",
                *n,
                "",
                emb,
                state,
                cfg.designated_chain,
            ));
        }
    }

    let paths = vec![
        dir.join("iterations.csv"),
        dir.join("summary.csv"),
        dir.join("lambda_hist.csv"),
        dir.join("chain_trace.csv"),
    ];
    write_csv(&paths[0], &header, &rows)?;
    write_csv(&paths[1], &header, &summary)?;
    write_csv(&paths[2], &header, &hist)?;
    write_csv(&paths[3], &header, &trace)?;
    Ok(paths)
}

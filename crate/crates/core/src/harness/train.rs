use std::path::PathBuf;

use serde::Serialize;

use super::gen::{embedding_for, hardware_for, Instance, Split};
use super::{metadata_header, write_csv, ExperimentConfig};
use crate::anneal::{SamplerParams, SimulatedAnnealer};
use crate::embed::embed_ising;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::maxclique::clique_ising;
use crate::methods::{run_alm_set, ClassTraining, MethodConfig};
use crate::seed;
use crate::topology::{Embedding, HardwareGraph};

const TRAIN_LABEL: u64 = 0x5452_4149;

#[derive(Serialize)]
struct TrainRow {
    n: usize,
    iteration: usize,
    mu: f64,
    broken_total: usize,
    broken_max: usize,
}

/// Train a class-level state on graphs of one size sharing `emb`.
pub fn train_state(
    graphs: &[Graph],
    emb: &Embedding,
    hw: &HardwareGraph,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<ClassTraining> {
    let n = graphs
        .first()
        .ok_or_else(|| Error::InvalidParameter("no training graphs".into()))?
        .num_vertices();
    if graphs.iter().any(|g| g.num_vertices() != n) {
        return Err(Error::InvalidParameter(
            "training graphs must all have the same size".into(),
        ));
    }
    let problems = graphs
        .iter()
        .map(|g| embed_ising(&clique_ising(g), emb, hw))
        .collect::<Result<Vec<_>>>()?;
    let sampler = SimulatedAnnealer::new(
        SamplerParams {
            seed,
            ..cfg.sampler.clone()
        },
        cfg.precision.clone(),
    )?;
    let mcfg = MethodConfig {
        seed,
        ..cfg.method.clone()
    };
    run_alm_set(&problems, &sampler, &mcfg)
}

/// Train one state per size on freshly generated training graphs, which come
/// from a seed stream disjoint from the evaluation instances, and store it under
/// `states/`, with a per-iteration trace in `results/train_set.csv`.
pub fn cmd_train_set(cfg: &ExperimentConfig, force: bool) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let run_seed = cfg.require_seed()?;
    std::fs::create_dir_all(cfg.states_dir())?;
    let mut written = Vec::new();
    let mut trace = Vec::new();
    for &n in &cfg.sizes {
        let path = cfg.state_path(n);
        if path.exists() && !force {
            return Err(Error::OutputExists(path));
        }
        let hw = hardware_for(cfg, n)?;
        let emb = embedding_for(cfg, n, &hw)?;
        let graphs = (0..cfg.train_graphs)
            .map(|i| Instance::new(cfg, n, i, Split::Train).generate(cfg))
            .collect::<Result<Vec<_>>>()?;
        let training = train_state(
            &graphs,
            &emb,
            &hw,
            cfg,
            seed::derive(run_seed, &[TRAIN_LABEL, n as u64]),
        )?;
        log::info!(
            "trained n={n} in {} iterations, mu={}",
            training.iterations.len(),
            training.state.mu
        );
        trace.extend(training.iterations.iter().map(|it| TrainRow {
            n,
            iteration: it.iteration,
            mu: it.mu,
            broken_total: it.broken_counts.iter().sum(),
            broken_max: it.broken_counts.iter().copied().max().unwrap_or(0),
        }));
        training.state.save(&path)?;
        written.push(path);
    }
    let trace_path = cfg.results_dir().join("train_set.csv");
    write_csv(&trace_path, &metadata_header(cfg, "train-set")?, &trace)?;
    written.push(trace_path);
    Ok(written)
}

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, TOOLKIT};
use crate::error::{Error, Result};
use crate::graph::{gnp_random_graph, Graph};
use crate::seed;
use crate::topology::{chimera_graph, clique_embedding, read_artifact, Embedding, HardwareGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Eval,
    Train,
}

impl Split {
    fn label(self) -> u64 {
        match self {
            Split::Eval => 0x4556,
            Split::Train => 0x5452,
        }
    }

    fn tag(self) -> char {
        match self {
            Split::Eval => 'g',
            Split::Train => 't',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub n: usize,
    pub index: usize,
    pub split: Split,
    pub seed: u64,
    pub file: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub toolkit: String,
    pub p: f64,
    pub instance_seed: u64,
    pub instances: Vec<Instance>,
}

impl Manifest {
    /// Instances of one size and split, in index order.
    pub fn select(&self, n: usize, split: Split) -> Vec<&Instance> {
        let mut v: Vec<&Instance> = self
            .instances
            .iter()
            .filter(|i| i.n == n && i.split == split)
            .collect();
        v.sort_by_key(|i| i.index);
        v
    }
}

impl Instance {
    /// Eval and train graphs draw from separate seed streams, so the two sets
    /// never share an instance.
    pub(crate) fn new(cfg: &ExperimentConfig, n: usize, index: usize, split: Split) -> Self {
        let id = format!("n{n}_{}{index}", split.tag());
        Self {
            file: format!("{id}.dimacs"),
            id,
            n,
            index,
            split,
            seed: seed::derive(cfg.instance_seed, &[split.label(), n as u64, index as u64]),
        }
    }

    pub fn generate(&self, cfg: &ExperimentConfig) -> Result<Graph> {
        gnp_random_graph(self.n, cfg.p, self.seed)
    }

    pub fn load_graph(&self, cfg: &ExperimentConfig) -> Result<Graph> {
        let g = Graph::from_dimacs(&read_artifact(&cfg.instances_dir().join(&self.file))?)?;
        if g.num_vertices() != self.n {
            return Err(Error::Parse {
                context: self.file.clone(),
                message: format!("expected {} vertices, found {}", self.n, g.num_vertices()),
            });
        }
        Ok(g)
    }
}

/// Write seeded G(n, p) evaluation instances and their manifest.
pub fn cmd_gen(cfg: &ExperimentConfig, force: bool) -> Result<Manifest> {
    cfg.validate()?;
    let dir = cfg.instances_dir();
    let manifest_path = dir.join("manifest.json");
    if manifest_path.exists() && !force {
        return Err(Error::OutputExists(manifest_path));
    }
    std::fs::create_dir_all(&dir)?;
    let mut instances = Vec::new();
    for &n in &cfg.sizes {
        for index in 0..cfg.graphs_per_size {
            let inst = Instance::new(cfg, n, index, Split::Eval);
            let text = format!(
                "c {TOOLKIT} G({n}, {}) seed {}\n{}",
                cfg.p,
                inst.seed,
                inst.generate(cfg)?.to_dimacs()
            );
            std::fs::write(dir.join(&inst.file), text)?;
            instances.push(inst);
        }
    }
    let manifest = Manifest {
        toolkit: TOOLKIT.to_string(),
        p: cfg.p,
        instance_seed: cfg.instance_seed,
        instances,
    };
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(manifest)
}

pub fn load_manifest(cfg: &ExperimentConfig) -> Result<Manifest> {
    let path = cfg.instances_dir().join("manifest.json");
    Ok(serde_json::from_str(&read_artifact(&path)?)?)
}

pub(crate) fn hardware_for(cfg: &ExperimentConfig, n: usize) -> Result<HardwareGraph> {
    match &cfg.hardware {
        Some(path) => HardwareGraph::load(path),
        None => chimera_graph(cfg.chimera_size(n)),
    }
}

/// Stored embedding for size `n` if present, else the native clique embedding.
pub(crate) fn embedding_for(
    cfg: &ExperimentConfig,
    n: usize,
    hw: &HardwareGraph,
) -> Result<Embedding> {
    let path = cfg.embedding_path(n);
    let emb = if path.exists() {
        Embedding::load(&path, hw)?
    } else if cfg.hardware.is_some() {
        return Err(Error::MissingArtifact {
            path,
            reason: "external hardware needs an embedding file".into(),
        });
    } else {
        clique_embedding(n, hw)?
    };
    if emb.num_chains() != n {
        return Err(Error::EmbeddingInfeasible(format!(
            "embedding {} has {} chains, size is {n}",
            path.display(),
            emb.num_chains()
        )));
    }
    Ok(emb)
}

/// Write the complete-graph embedding used for each size.
pub fn cmd_embed(cfg: &ExperimentConfig, force: bool) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    if cfg.hardware.is_some() {
        return Err(Error::InvalidParameter(
            "embeddings for external hardware must be produced by an external tool".into(),
        ));
    }
    std::fs::create_dir_all(cfg.embeddings_dir())?;
    let mut written = Vec::new();
    for &n in &cfg.sizes {
        let path = cfg.embedding_path(n);
        if path.exists() && !force {
            return Err(Error::OutputExists(path));
        }
        let hw = hardware_for(cfg, n)?;
        clique_embedding(n, &hw)?.save(&path)?;
        written.push(path);
    }
    Ok(written)
}

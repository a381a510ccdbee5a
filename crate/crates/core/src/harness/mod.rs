//! Batch experiments on random maximum-clique instances.
//!
//! Output directory layout:
//!
//! ```text
//! <out>/instances/manifest.json    instance list with seeds
//! <out>/instances/<id>.dimacs      one graph per instance
//! <out>/embeddings/n<N>.json       embedding used for size N
//! <out>/states/n<N>.json           stored class-level multipliers
//! <out>/results/*.csv              iterations, summary, lambda_hist, chain_trace
//! ```

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::anneal::{PrecisionModel, SamplerParams};
use crate::error::{Error, Result};
use crate::methods::{Method, MethodConfig};
use crate::topology::CHIMERA_SHORE;

mod gen;
mod report;
mod run;
mod train;

pub use gen::{cmd_embed, cmd_gen, load_manifest, Instance, Manifest, Split};
pub use report::{
    cmd_report, lambda_histogram, read_iterations, summarize, ChainTraceRow, LambdaBin, SummaryRow,
};
pub use run::{cmd_run, execute, Cell, IterationRow, SizeArtifacts};
pub use train::{cmd_train_set, train_state};

pub const TOOLKIT: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Prefix of the metadata line that carries the wall-clock time.
pub const TIMESTAMP_PREFIX: &str = "# generated_unix:";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub p: f64,
    pub graphs_per_size: usize,
    pub train_graphs: usize,
    pub methods: Vec<Method>,
    pub sampler: SamplerParams,
    pub precision: PrecisionModel,
    pub method: MethodConfig,
    /// Seeds sampler streams and method tie breaks for `run` and `train-set`.
    pub seed: Option<u64>,
    /// Seeds graph generation.
    pub instance_seed: u64,
    /// Chimera size; `None` picks the smallest grid that fits each size.
    pub chimera_m: Option<usize>,
    /// External hardware graph; embeddings must then be supplied as files.
    pub hardware: Option<PathBuf>,
    /// Independent runs per (method, graph); the best clique is kept.
    pub repeats: usize,
    /// Chain whose multipliers are written to `chain_trace.csv`.
    pub designated_chain: usize,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sizes: vec![20, 30, 40],
            p: 0.5,
            graphs_per_size: 5,
            train_graphs: 10,
            methods: vec![Method::Sm, Method::Pm, Method::Alm],
            sampler: SamplerParams::default(),
            precision: PrecisionModel::default(),
            method: MethodConfig::default(),
            seed: None,
            instance_seed: 1,
            chimera_m: None,
            hardware: None,
            repeats: 1,
            designated_chain: 0,
            out_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// Sizes 20, 30, 40 on chimera(5), chimera(8), chimera(10).
    Desk,
    /// Sizes 50, 75, 100 on chimera(13), chimera(19), chimera(25).
    Full,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Preset::Desk),
            "full" => Ok(Preset::Full),
            _ => Err(Error::InvalidParameter(format!("unknown preset {s:?}"))),
        }
    }
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let sizes = match preset {
            Preset::Desk => vec![20, 30, 40],
            Preset::Full => vec![50, 75, 100],
        };
        Self {
            sizes,
            ..Self::default()
        }
    }

    /// Overlay the fields present in a JSON object onto this config.
    pub fn merge_json(&self, overrides: &serde_json::Value) -> Result<Self> {
        let mut base = serde_json::to_value(self)?;
        merge(&mut base, overrides);
        let merged: Self = serde_json::from_value(base)
            .map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        Ok(merged)
    }

    pub fn load_overrides(&self, path: &Path) -> Result<Self> {
        let text = crate::topology::read_artifact(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("config {}: {e}", path.display())))?;
        self.merge_json(&value)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidParameter("no graph sizes given".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidParameter(format!(
                "p = {} not in [0, 1]",
                self.p
            )));
        }
        if self.graphs_per_size == 0 || self.repeats == 0 {
            return Err(Error::InvalidParameter(
                "graphs_per_size and repeats must be positive".into(),
            ));
        }
        self.sampler.validate()?;
        self.precision.validate()?;
        self.method.validate()?;
        if self.hardware.is_none() {
            for &n in &self.sizes {
                let m = self.chimera_size(n);
                if n > CHIMERA_SHORE * m {
                    return Err(Error::Capacity(format!(
                        "size {n} exceeds the capacity {} of chimera({m})",
                        CHIMERA_SHORE * m
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidParameter("a run seed is required (--seed)".into()))
    }

    pub fn chimera_size(&self, n: usize) -> usize {
        self.chimera_m
            .unwrap_or_else(|| n.div_ceil(CHIMERA_SHORE).max(1))
    }

    pub fn instances_dir(&self) -> PathBuf {
        self.out_dir.join("instances")
    }

    pub fn embeddings_dir(&self) -> PathBuf {
        self.out_dir.join("embeddings")
    }

    pub fn states_dir(&self) -> PathBuf {
        self.out_dir.join("states")
    }

    pub fn results_dir(&self) -> PathBuf {
        self.out_dir.join("results")
    }

    pub fn embedding_path(&self, n: usize) -> PathBuf {
        self.embeddings_dir().join(format!("n{n}.json"))
    }

    pub fn state_path(&self, n: usize) -> PathBuf {
        self.states_dir().join(format!("n{n}.json"))
    }
}

fn merge(base: &mut serde_json::Value, overrides: &serde_json::Value) {
    match (base, overrides) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}

/// Metadata lines written at the top of every CSV.
pub(crate) fn metadata_header(cfg: &ExperimentConfig, command: &str) -> Result<String> {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let seed = cfg
        .seed
        .map_or_else(|| "none".to_string(), |s| s.to_string());
    Ok(format!(
        "# toolkit: {TOOLKIT}\n# command: {command}\n# seeds: run={seed} instance={}\n# noise_std: {} (enabled: {})\n# config: {}\n{TIMESTAMP_PREFIX} {now}\n",
        cfg.instance_seed,
        cfg.precision.noise_std,
        cfg.precision.enabled,
        serde_json::to_string(cfg)?
    ))
}

/// Write `rows` as CSV below the metadata header.
pub(crate) fn write_csv<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(header.as_bytes())?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// File contents without metadata lines that vary between reruns.
pub fn stable_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with(TIMESTAMP_PREFIX))
        .map(|l| format!("{l}\n"))
        .collect()
}

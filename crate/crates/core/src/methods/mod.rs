//! Chain-strength assignment methods.
//!
//! All methods share one inner step: write the chain biases for the current
//! `(λ, μ)` onto the embedded problem, sample it, unembed every sample by
//! majority vote and keep the sample with the lowest logical objective.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::anneal::Sampler;
use crate::chains::{diagnose, majority_vote, ChainDiagnostics, TieBreak};
use crate::embed::EmbeddedIsing;
use crate::error::{Error, Result};
use crate::ising::{IsingModel, SpinVector};
use crate::seed::{self, stream};
use crate::topology::read_artifact;

mod class;
mod single;

pub use class::{run_alm_set, run_alm_set_once, run_alm_set_plus, ClassIteration, ClassTraining};
pub use single::{run_alm, run_penalty_loop, run_pm, run_sm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Sm,
    Pm,
    Alm,
    AlmSet,
    AlmSetPlus,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Sm,
        Method::Pm,
        Method::Alm,
        Method::AlmSet,
        Method::AlmSetPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Sm => "sm",
            Method::Pm => "pm",
            Method::Alm => "alm",
            Method::AlmSet => "alm-set",
            Method::AlmSetPlus => "alm-set-plus",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreakMode {
    #[default]
    Coin,
    FirstQubit,
}

impl std::str::FromStr for TieBreakMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coin" => Ok(TieBreakMode::Coin),
            "first-qubit" => Ok(TieBreakMode::FirstQubit),
            _ => Err(Error::InvalidParameter(format!("unknown tie break {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodConfig {
    pub mu0: f64,
    pub rho: f64,
    pub max_iterations: usize,
    pub utc_prefactor: f64,
    /// Seeds sampler streams and majority-vote tie breaks.
    pub seed: u64,
    pub tie_break: TieBreakMode,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            mu0: 1.5,
            rho: 1.1,
            max_iterations: 20,
            utc_prefactor: 1.414,
            seed: 0,
            tie_break: TieBreakMode::Coin,
        }
    }
}

impl MethodConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mu0.is_nan() || self.mu0 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mu0 must be positive, got {}",
                self.mu0
            )));
        }
        if self.rho.is_nan() || self.rho <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "rho must exceed 1, got {}",
                self.rho
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Multipliers `λ_xy` for every oriented chain coupler and the penalty `μ`.
///
/// Coupler keys are hardware qubit ids `(x, y)` with `x < y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub struct LagrangeState {
    pub mu: f64,
    pub lambda: BTreeMap<(usize, usize), f64>,
    pub embedding_fingerprint: String,
}

impl LagrangeState {
    pub fn new(e: &EmbeddedIsing, mu: f64, lambda: &[f64]) -> Self {
        let hw = e.hardware_qubits();
        Self {
            mu,
            lambda: e
                .chain_couplers()
                .iter()
                .zip(lambda)
                .map(|(c, &l)| ((hw[c.x], hw[c.y]), l))
                .collect(),
            embedding_fingerprint: e.fingerprint().to_string(),
        }
    }

    pub fn zeros(e: &EmbeddedIsing, mu: f64) -> Self {
        Self::new(e, mu, &vec![0.0; e.chain_couplers().len()])
    }

    /// Multipliers aligned with `e.chain_couplers()`.
    pub fn lambda_for(&self, e: &EmbeddedIsing) -> Result<Vec<f64>> {
        if self.embedding_fingerprint != e.fingerprint() {
            return Err(Error::StateMismatch(format!(
                "state was built for embedding {}, problem uses {}",
                self.embedding_fingerprint,
                e.fingerprint()
            )));
        }
        let hw = e.hardware_qubits();
        if self.lambda.len() != e.chain_couplers().len() {
            return Err(Error::StateMismatch(format!(
                "state has {} chain couplers, embedding has {}",
                self.lambda.len(),
                e.chain_couplers().len()
            )));
        }
        e.chain_couplers()
            .iter()
            .map(|c| {
                let key = (hw[c.x], hw[c.y]);
                self.lambda.get(&key).copied().ok_or_else(|| {
                    Error::StateMismatch(format!("no multiplier for coupler {key:?}"))
                })
            })
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&read_artifact(path)?)?)
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    mu: f64,
    lambda: BTreeMap<String, f64>,
    embedding_fingerprint: String,
}

impl From<LagrangeState> for StateJson {
    fn from(s: LagrangeState) -> Self {
        Self {
            mu: s.mu,
            lambda: s
                .lambda
                .iter()
                .map(|((x, y), v)| (format!("{x},{y}"), *v))
                .collect(),
            embedding_fingerprint: s.embedding_fingerprint,
        }
    }
}

impl TryFrom<StateJson> for LagrangeState {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        let lambda = raw
            .lambda
            .iter()
            .map(|(k, v)| {
                let parsed = k
                    .split_once(',')
                    .and_then(|(x, y)| Some((x.trim().parse().ok()?, y.trim().parse().ok()?)));
                parsed.map(|key| (key, *v)).ok_or_else(|| Error::Parse {
                    context: "lagrange state".into(),
                    message: format!("bad coupler key {k:?}"),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            mu: raw.mu,
            lambda,
            embedding_fingerprint: raw.embedding_fingerprint,
        })
    }
}

/// Chain strength from the uniform torque compensation heuristic:
/// `prefactor · RMS(J) · sqrt(average degree)`.
///
/// Returns `(1.0, true)` when the model has no quadratic terms.
pub fn utc_chain_strength(model: &IsingModel, prefactor: f64) -> (f64, bool) {
    let count = model.num_interactions();
    if count == 0 || model.num_variables() == 0 {
        log::warn!("model has no couplers; falling back to chain strength 1.0");
        return (1.0, true);
    }
    let squares: f64 = model.quadratic_terms().map(|(_, v)| v * v).sum();
    let rms = (squares / count as f64).sqrt();
    let avg_degree = 2.0 * count as f64 / model.num_variables() as f64;
    (prefactor * rms * avg_degree.sqrt(), false)
}

/// Physical model with chain terms `λ_xy (s_x − s_y) − μ s_x s_y` added on
/// every chain coupler and `μ|ℰ|` added to the offset.
pub fn apply_chain_biases(e: &EmbeddedIsing, state: &LagrangeState) -> Result<IsingModel> {
    let lambda = state.lambda_for(e)?;
    Ok(chain_biased_model(e, &lambda, state.mu))
}

pub(crate) fn chain_biased_model(e: &EmbeddedIsing, lambda: &[f64], mu: f64) -> IsingModel {
    debug_assert_eq!(lambda.len(), e.chain_couplers().len());
    let mut m = e.base().clone();
    for (c, &l) in e.chain_couplers().iter().zip(lambda) {
        m.add_linear(c.x, l)
            .expect("coupler endpoints are model variables");
        m.add_linear(c.y, -l)
            .expect("coupler endpoints are model variables");
        m.set_quadratic(c.x, c.y, -mu)
            .expect("coupler endpoints are model variables");
    }
    m.add_offset(mu * e.chain_couplers().len() as f64);
    m
}

/// `Is'(s) + Σ λ_xy (s_x − s_y) + (μ/2) Σ (s_x − s_y)²`, evaluated directly.
pub fn augmented_objective(
    e: &EmbeddedIsing,
    lambda: &[f64],
    mu: f64,
    s: &SpinVector,
) -> Result<f64> {
    let base = e.base().energy(s)?;
    let v = s.as_slice();
    let terms: f64 = e
        .chain_couplers()
        .iter()
        .zip(lambda)
        .map(|(c, &l)| {
            let d = f64::from(v[c.x] - v[c.y]);
            l * d + 0.5 * mu * d * d
        })
        .sum();
    Ok(base + terms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub mu: f64,
    /// Multipliers used for this anneal, aligned with the chain couplers.
    pub lambda: Vec<f64>,
    pub broken_count: usize,
    pub objective: f64,
    pub logical: SpinVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub method: Method,
    pub records: Vec<IterationRecord>,
    pub final_state: LagrangeState,
    /// Iteration (1-based) with the lowest logical objective; earliest on ties.
    pub best_iteration: usize,
    /// Set when the UTC heuristic fell back to its default strength.
    pub utc_fallback: bool,
}

impl RunResult {
    pub(crate) fn new(
        method: Method,
        records: Vec<IterationRecord>,
        final_state: LagrangeState,
    ) -> Self {
        let best_iteration = records
            .iter()
            .fold(None::<&IterationRecord>, |best, r| match best {
                Some(b) if b.objective <= r.objective => Some(b),
                _ => Some(r),
            })
            .map_or(0, |r| r.iteration);
        Self {
            method,
            records,
            final_state,
            best_iteration,
            utc_fallback: false,
        }
    }

    pub fn best(&self) -> &IterationRecord {
        &self.records[self.best_iteration - 1]
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn last(&self) -> &IterationRecord {
        self.records
            .last()
            .expect("runs have at least one iteration")
    }
}

/// Outcome of one anneal call after unembedding.
pub(crate) struct CallOutcome {
    pub objective: f64,
    pub logical: SpinVector,
    pub diagnostics: ChainDiagnostics,
}

/// Sample `model` and pick the sample with the lowest logical objective.
pub(crate) fn anneal_call(
    e: &EmbeddedIsing,
    sampler: &dyn Sampler,
    model: &IsingModel,
    cfg: &MethodConfig,
    problem: usize,
    iteration: usize,
) -> Result<CallOutcome> {
    let labels = [problem as u64, iteration as u64];
    let set = sampler.sample(model, seed::derive(cfg.seed, &labels))?;
    let mut tie_rng = seed::rng(seed::derive(
        cfg.seed,
        &[stream::TIE_BREAK, labels[0], labels[1]],
    ));
    let mut best: Option<(f64, SpinVector, usize)> = None;
    for (idx, sample) in set.samples().iter().enumerate() {
        let tie = match cfg.tie_break {
            TieBreakMode::Coin => TieBreak::Coin(&mut tie_rng),
            TieBreakMode::FirstQubit => TieBreak::FirstQubit,
        };
        let logical = majority_vote(e.layout(), &sample.spins, tie)?;
        let objective = e.logical().energy(&logical)?;
        if best.as_ref().is_none_or(|(b, _, _)| objective < *b) {
            best = Some((objective, logical, idx));
        }
    }
    let (objective, logical, idx) =
        best.ok_or_else(|| Error::InvalidModel("sampler returned no samples".into()))?;
    let diagnostics = diagnose(e.layout(), &set.samples()[idx].spins)?;
    Ok(CallOutcome {
        objective,
        logical,
        diagnostics,
    })
}

pub(crate) fn add_violations(lambda: &mut [f64], violations: &[i8], step: f64) {
    for (l, &v) in lambda.iter_mut().zip(violations) {
        *l += step * f64::from(v);
    }
}

#[cfg(test)]
mod tests;

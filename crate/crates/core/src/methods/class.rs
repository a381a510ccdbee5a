use serde::{Deserialize, Serialize};

use crate::anneal::Sampler;
use crate::embed::EmbeddedIsing;
use crate::error::{Error, Result};

use super::{
    add_violations, anneal_call, chain_biased_model, CallOutcome, IterationRecord, LagrangeState,
    Method, MethodConfig, RunResult,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassIteration {
    pub iteration: usize,
    pub mu: f64,
    /// Broken chains in the best sample of each problem.
    pub broken_counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassTraining {
    pub state: LagrangeState,
    pub iterations: Vec<ClassIteration>,
}

fn anneal_all(
    problems: &[EmbeddedIsing],
    sampler: &dyn Sampler,
    cfg: &MethodConfig,
    lambda: &[f64],
    mu: f64,
    iteration: usize,
) -> Result<Vec<CallOutcome>> {
    let call = |(i, e): (usize, &EmbeddedIsing)| {
        let model = chain_biased_model(e, lambda, mu);
        anneal_call(e, sampler, &model, cfg, i, iteration)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        problems.par_iter().enumerate().map(call).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        problems.iter().enumerate().map(call).collect()
    }
}

/// Class-level ALM over problems that share one embedding: every problem is
/// annealed with the same `(λ, μ)` and the multiplier step is the mean
/// violation over the problems' best samples.
pub fn run_alm_set(
    problems: &[EmbeddedIsing],
    sampler: &dyn Sampler,
    cfg: &MethodConfig,
) -> Result<ClassTraining> {
    cfg.validate()?;
    let first = problems.first().ok_or_else(|| {
        Error::InvalidParameter("ALM set training needs at least one problem".into())
    })?;
    if let Some(other) = problems
        .iter()
        .find(|p| p.fingerprint() != first.fingerprint())
    {
        return Err(Error::StateMismatch(format!(
            "problems use different embeddings ({} vs {})",
            first.fingerprint(),
            other.fingerprint()
        )));
    }
    let k = problems.len() as f64;
    let mut lambda = vec![0.0; first.chain_couplers().len()];
    let mut mu = cfg.mu0;
    let mut iterations = Vec::new();
    for iteration in 1..=cfg.max_iterations {
        let outcomes = anneal_all(problems, sampler, cfg, &lambda, mu, iteration)?;
        iterations.push(ClassIteration {
            iteration,
            mu,
            broken_counts: outcomes
                .iter()
                .map(|o| o.diagnostics.broken_count())
                .collect(),
        });
        if outcomes.iter().all(|o| o.diagnostics.is_intact()) {
            break;
        }
        let mut total = vec![0i64; lambda.len()];
        for o in &outcomes {
            for (t, &v) in total.iter_mut().zip(&o.diagnostics.violations) {
                *t += i64::from(v);
            }
        }
        for (l, t) in lambda.iter_mut().zip(total) {
            *l += mu * (t as f64 / k);
        }
        mu *= cfg.rho;
    }
    Ok(ClassTraining {
        state: LagrangeState::new(first, mu, &lambda),
        iterations,
    })
}

/// A single anneal with a stored state and no further updates.
pub fn run_alm_set_once(
    stored: &LagrangeState,
    e: &EmbeddedIsing,
    sampler: &dyn Sampler,
    cfg: &MethodConfig,
) -> Result<RunResult> {
    let lambda = stored.lambda_for(e)?;
    let out = anneal_call(
        e,
        sampler,
        &chain_biased_model(e, &lambda, stored.mu),
        cfg,
        0,
        1,
    )?;
    let record = IterationRecord {
        iteration: 1,
        mu: stored.mu,
        lambda,
        broken_count: out.diagnostics.broken_count(),
        objective: out.objective,
        logical: out.logical,
    };
    Ok(RunResult::new(Method::AlmSet, vec![record], stored.clone()))
}

/// Stored state, then one per-instance ALM update and a second anneal.
/// Both iterations are recorded; the best one is reported.
pub fn run_alm_set_plus(
    stored: &LagrangeState,
    e: &EmbeddedIsing,
    sampler: &dyn Sampler,
    cfg: &MethodConfig,
) -> Result<RunResult> {
    cfg.validate()?;
    let mut lambda = stored.lambda_for(e)?;
    let mut mu = stored.mu;
    let mut records = Vec::with_capacity(2);
    for iteration in 1..=2 {
        let out = anneal_call(
            e,
            sampler,
            &chain_biased_model(e, &lambda, mu),
            cfg,
            0,
            iteration,
        )?;
        records.push(IterationRecord {
            iteration,
            mu,
            lambda: lambda.clone(),
            broken_count: out.diagnostics.broken_count(),
            objective: out.objective,
            logical: out.logical,
        });
        if iteration == 1 {
            add_violations(&mut lambda, &out.diagnostics.violations, mu);
            mu *= cfg.rho;
        }
    }
    Ok(RunResult::new(
        Method::AlmSetPlus,
        records,
        LagrangeState::new(e, mu, &lambda),
    ))
}

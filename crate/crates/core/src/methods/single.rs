use crate::anneal::Sampler;
use crate::embed::EmbeddedIsing;
use crate::error::Result;

use super::{
    add_violations, anneal_call, chain_biased_model, utc_chain_strength, IterationRecord,
    LagrangeState, Method, MethodConfig, RunResult,
};

/// One anneal with `λ = 0` and the UTC chain strength.
pub fn run_sm(e: &EmbeddedIsing, sampler: &dyn Sampler, cfg: &MethodConfig) -> Result<RunResult> {
    let (mu, fallback) = utc_chain_strength(e.logical(), cfg.utc_prefactor);
    let lambda = vec![0.0; e.chain_couplers().len()];
    let model = chain_biased_model(e, &lambda, mu);
    let out = anneal_call(e, sampler, &model, cfg, 0, 1)?;
    let record = IterationRecord {
        iteration: 1,
        mu,
        lambda: lambda.clone(),
        broken_count: out.diagnostics.broken_count(),
        objective: out.objective,
        logical: out.logical,
    };
    let mut result = RunResult::new(Method::Sm, vec![record], LagrangeState::new(e, mu, &lambda));
    result.utc_fallback = fallback;
    Ok(result)
}

/// Quadratic penalty method: grow `μ` by `ρ` until the best sample has no
/// broken chains or the iteration limit is reached.
pub fn run_pm(e: &EmbeddedIsing, sampler: &dyn Sampler, cfg: &MethodConfig) -> Result<RunResult> {
    run_penalty_loop(e, sampler, cfg, false)
}

/// Augmented Lagrangian method: as [`run_pm`], and additionally move every
/// multiplier by `μ (σ_x − σ_y)` of the best sample on broken iterations.
pub fn run_alm(e: &EmbeddedIsing, sampler: &dyn Sampler, cfg: &MethodConfig) -> Result<RunResult> {
    run_penalty_loop(e, sampler, cfg, true)
}

/// Shared loop of PM and ALM; `update_lambda = false` is exactly PM.
pub fn run_penalty_loop(
    e: &EmbeddedIsing,
    sampler: &dyn Sampler,
    cfg: &MethodConfig,
    update_lambda: bool,
) -> Result<RunResult> {
    cfg.validate()?;
    let mut lambda = vec![0.0; e.chain_couplers().len()];
    let mut mu = cfg.mu0;
    let mut records = Vec::new();
    for iteration in 1..=cfg.max_iterations {
        let model = chain_biased_model(e, &lambda, mu);
        let out = anneal_call(e, sampler, &model, cfg, 0, iteration)?;
        records.push(IterationRecord {
            iteration,
            mu,
            lambda: lambda.clone(),
            broken_count: out.diagnostics.broken_count(),
            objective: out.objective,
            logical: out.logical,
        });
        if out.diagnostics.is_intact() {
            break;
        }
        if update_lambda {
            add_violations(&mut lambda, &out.diagnostics.violations, mu);
        }
        mu *= cfg.rho;
    }
    let method = if update_lambda {
        Method::Alm
    } else {
        Method::Pm
    };
    Ok(RunResult::new(
        method,
        records,
        LagrangeState::new(e, mu, &lambda),
    ))
}

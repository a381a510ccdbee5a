use rand::Rng;

use super::*;
use crate::anneal::{PrecisionModel, SampleSet, SamplerParams, SimulatedAnnealer};
use crate::embed::embed_ising;
use crate::exact::ExactSampler;
use crate::graph::{gnp_random_graph, Graph};
use crate::maxclique::clique_ising;
use crate::topology::{chimera_graph, clique_embedding, Embedding, HardwareGraph, Topology};

/// Returns the same physical assignment for every call, chosen from the model.
struct FixedSampler(fn(&IsingModel) -> Vec<i8>);

impl Sampler for FixedSampler {
    fn sample(&self, model: &IsingModel, _stream: u64) -> Result<SampleSet> {
        Ok(SampleSet::from_reads(model, vec![(self.0)(model)]))
    }
}

/// Chain 0 = qubits {0, 1}, chain 1 = qubit {2}, on the path 0-1-2.
fn two_chain_problem(j: f64, h0: f64) -> EmbeddedIsing {
    let hw = HardwareGraph::new(Topology::External, 0..3, [(0, 1), (1, 2)]).unwrap();
    let emb = Embedding::new(vec![vec![0, 1], vec![2]]);
    let mut m = IsingModel::new(2);
    m.set_quadratic(0, 1, j).unwrap();
    m.set_linear(0, h0).unwrap();
    embed_ising(&m, &emb, &hw).unwrap()
}

fn clique_problem(n: usize, m: usize, seed: u64) -> EmbeddedIsing {
    let hw = chimera_graph(m).unwrap();
    let emb = clique_embedding(n, &hw).unwrap();
    let g = gnp_random_graph(n, 0.5, seed).unwrap();
    embed_ising(&clique_ising(&g), &emb, &hw).unwrap()
}

fn fast_sampler(seed: u64) -> SimulatedAnnealer {
    SimulatedAnnealer::new(
        SamplerParams {
            num_reads: 20,
            num_sweeps: 20,
            seed,
            ..SamplerParams::default()
        },
        PrecisionModel::default(),
    )
    .unwrap()
}

fn weak_chains() -> MethodConfig {
    MethodConfig {
        mu0: 0.05,
        max_iterations: 6,
        seed: 3,
        ..MethodConfig::default()
    }
}

#[test]
fn utc_examples() {
    let mut k4 = IsingModel::new(4);
    for i in 0..4 {
        for j in i + 1..4 {
            k4.set_quadratic(i, j, 1.0).unwrap();
        }
    }
    let (mu, fallback) = utc_chain_strength(&k4, 1.414);
    assert!(!fallback);
    assert!((mu - 1.414 * 3f64.sqrt()).abs() < 1e-12);
    assert!((mu - 2.449).abs() < 1e-3);

    let mut pair = IsingModel::new(2);
    pair.set_quadratic(0, 1, 2.0).unwrap();
    assert_eq!(utc_chain_strength(&pair, 1.0), (2.0, false));

    let scaled = utc_chain_strength(&k4.scaled(3.0), 1.414).0;
    assert!((scaled - 3.0 * mu).abs() < 1e-12);

    assert_eq!(utc_chain_strength(&IsingModel::new(3), 1.414), (1.0, true));
    assert_eq!(utc_chain_strength(&k4, 0.0).0, 0.0);
}

#[test]
fn zero_multipliers_set_ferromagnetic_couplers() {
    let e = two_chain_problem(1.0, 0.5);
    let m = apply_chain_biases(&e, &LagrangeState::zeros(&e, 1.5)).unwrap();
    assert_eq!(m.quadratic(0, 1), -1.5);
    assert_eq!(m.linear(0), e.base().linear(0));
    assert_eq!(m.linear(1), e.base().linear(1));
    assert_eq!(m.offset(), e.base().offset() + 1.5);
}

#[test]
fn multiplier_shifts_linear_biases() {
    let e = two_chain_problem(1.0, 0.5);
    let mut state = LagrangeState::zeros(&e, 1.5);
    *state.lambda.get_mut(&(0, 1)).unwrap() = 2.0;
    let m = apply_chain_biases(&e, &state).unwrap();
    assert_eq!(m.linear(0), e.base().linear(0) + 2.0);
    assert_eq!(m.linear(1), e.base().linear(1) - 2.0);
}

#[test]
fn state_key_mismatch() {
    let e = two_chain_problem(1.0, 0.5);
    let mut state = LagrangeState::zeros(&e, 1.5);
    state.lambda.insert((1, 2), 0.0);
    assert!(matches!(
        apply_chain_biases(&e, &state),
        Err(Error::StateMismatch(_))
    ));
    let mut state = LagrangeState::zeros(&e, 1.5);
    state.embedding_fingerprint = "00".into();
    assert!(matches!(
        apply_chain_biases(&e, &state),
        Err(Error::StateMismatch(_))
    ));
    let mut state = LagrangeState::zeros(&e, 1.5);
    let v = state.lambda.remove(&(0, 1)).unwrap();
    state.lambda.insert((0, 2), v);
    assert!(matches!(
        apply_chain_biases(&e, &state),
        Err(Error::StateMismatch(_))
    ));
}

#[test]
fn chain_bias_identity_exhaustive() {
    let e = clique_problem(4, 1, 2);
    assert!(e.num_qubits() <= 16);
    let mut rng = crate::seed::rng(17);
    for _ in 0..20 {
        let mu = rng.random_range(0.0..5.0);
        let lambda: Vec<f64> = (0..e.chain_couplers().len())
            .map(|_| rng.random_range(-4.0..4.0))
            .collect();
        let state = LagrangeState::new(&e, mu, &lambda);
        let model = apply_chain_biases(&e, &state).unwrap();
        for bits in 0..1u64 << e.num_qubits() {
            let s = SpinVector::from_bits(bits, e.num_qubits());
            let v = s.as_slice();
            // independent evaluation of the penalised objective
            let mut expected = e.base().energy(&s).unwrap();
            for (c, l) in e.chain_couplers().iter().zip(&lambda) {
                let d = f64::from(v[c.x]) - f64::from(v[c.y]);
                expected += l * d + mu / 2.0 * d.powi(2);
            }
            assert!((model.energy(&s).unwrap() - expected).abs() < 1e-9);
            assert!((augmented_objective(&e, &lambda, mu, &s).unwrap() - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn chain_terms_vanish_on_intact_samples() {
    let e = clique_problem(6, 2, 5);
    let lambda: Vec<f64> = (0..e.chain_couplers().len())
        .map(|i| i as f64 - 3.0)
        .collect();
    for bits in 0..1u64 << 6 {
        let s = SpinVector::from_bits(bits, 6);
        let lifted = e.layout().lift(&s).unwrap();
        let aug = augmented_objective(&e, &lambda, 2.5, &lifted).unwrap();
        assert!((aug - e.logical().energy(&s).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn multiplier_update_step() {
    let mut lambda = vec![0.0, 1.0];
    add_violations(&mut lambda, &[2, 0], 1.5);
    assert_eq!(lambda, vec![3.0, 1.0]);
}

#[test]
fn sm_recovers_ferromagnetic_optimum() {
    let e = two_chain_problem(-1.0, 0.5);
    let cfg = MethodConfig::default();
    let r = run_sm(&e, &ExactSampler, &cfg).unwrap();
    assert_eq!(r.iterations(), 1);
    assert_eq!(r.best().broken_count, 0);
    let (_, ground) = crate::exact::exact_solve(e.logical()).unwrap();
    assert_eq!(r.best().objective, ground);
    assert_eq!(r.best().logical.as_slice(), &[-1, -1]);

    let sa = fast_sampler(1);
    let r = run_sm(&e, &sa, &cfg).unwrap();
    assert_eq!(r.best().objective, ground);
    assert_eq!(r, run_sm(&e, &sa, &cfg).unwrap());
}

#[test]
fn sm_prefactor_zero_leaves_chains_free() {
    let e = two_chain_problem(-1.0, 0.5);
    let cfg = MethodConfig {
        utc_prefactor: 0.0,
        ..MethodConfig::default()
    };
    let r = run_sm(&e, &ExactSampler, &cfg).unwrap();
    assert_eq!(r.records[0].mu, 0.0);
}

#[test]
fn pm_stops_when_intact() {
    let e = two_chain_problem(-1.0, 0.5);
    let r = run_pm(&e, &ExactSampler, &MethodConfig::default()).unwrap();
    assert_eq!(r.iterations(), 1);
    assert_eq!(r.final_state.mu, 1.5);
}

#[test]
fn pm_mu_is_geometric_on_broken_iterations() {
    // qubit 1 of chain 0 is always flipped against qubit 0
    let e = two_chain_problem(1.0, 0.5);
    let r = run_pm(
        &e,
        &FixedSampler(|_| vec![1, -1, 1]),
        &MethodConfig::default(),
    )
    .unwrap();
    assert_eq!(r.iterations(), 20);
    for (k, rec) in r.records.iter().enumerate() {
        assert!((rec.mu - 1.5 * 1.1f64.powi(k as i32)).abs() < 1e-9);
        assert_eq!(rec.broken_count, 1);
        assert!(rec.lambda.iter().all(|&l| l == 0.0));
    }
    assert!((r.final_state.mu - 1.5 * 1.1f64.powi(20)).abs() < 1e-9);
}

#[test]
fn alm_accumulates_multipliers() {
    let e = two_chain_problem(1.0, 0.5);
    let cfg = MethodConfig {
        max_iterations: 3,
        ..MethodConfig::default()
    };
    let r = run_alm(&e, &FixedSampler(|_| vec![1, -1, 1]), &cfg).unwrap();
    let lambdas: Vec<f64> = r.records.iter().map(|rec| rec.lambda[0]).collect();
    assert_eq!(lambdas[0], 0.0);
    assert!((lambdas[1] - 3.0).abs() < 1e-12);
    assert!((lambdas[2] - (3.0 + 2.0 * 1.65)).abs() < 1e-12);
}

#[test]
fn alm_equals_pm_when_intact_immediately() {
    let e = two_chain_problem(-1.0, 0.5);
    let cfg = MethodConfig::default();
    let alm = run_alm(&e, &ExactSampler, &cfg).unwrap();
    let pm = run_pm(&e, &ExactSampler, &cfg).unwrap();
    assert_eq!(alm.iterations(), 1);
    assert_eq!(alm.records, pm.records);
    assert_eq!(alm.final_state, pm.final_state);
    assert!(alm.final_state.lambda.values().all(|&l| l == 0.0));
}

#[test]
fn pm_is_alm_without_multiplier_updates() {
    let e = clique_problem(8, 2, 4);
    let sa = fast_sampler(9);
    let cfg = weak_chains();
    let pm = run_pm(&e, &sa, &cfg).unwrap();
    let restricted = run_penalty_loop(&e, &sa, &cfg, false).unwrap();
    assert_eq!(pm, restricted);
    let alm = run_alm(&e, &sa, &cfg).unwrap();
    // identical first anneal; the trajectories only part once λ moves
    assert_eq!(alm.records[0], pm.records[0]);
    assert!(pm.records[0].broken_count > 0);
}

#[test]
fn multiplier_keys_are_stable() {
    let e = clique_problem(8, 2, 4);
    let r = run_alm(&e, &fast_sampler(2), &weak_chains()).unwrap();
    let n = e.chain_couplers().len();
    assert!(r.records.iter().all(|rec| rec.lambda.len() == n));
    assert_eq!(r.final_state.lambda.len(), n);
    assert!(r.final_state.lambda_for(&e).is_ok());
}

#[test]
fn mu_trajectory() {
    let e = clique_problem(8, 2, 6);
    let cfg = weak_chains();
    let r = run_alm(&e, &fast_sampler(4), &cfg).unwrap();
    for w in r.records.windows(2) {
        assert!(w[0].broken_count > 0);
        assert!((w[1].mu - w[0].mu * cfg.rho).abs() < 1e-12);
    }
}

#[test]
fn class_update_averages_violations() {
    // problem A (h0 > 0) returns a broken chain, problem B an intact one
    let a = two_chain_problem(1.0, 0.5);
    let b = two_chain_problem(1.0, -0.5);
    let sampler = FixedSampler(|m| {
        if m.linear(0) > 0.0 {
            vec![1, -1, 1]
        } else {
            vec![1, 1, 1]
        }
    });
    let cfg = MethodConfig {
        max_iterations: 1,
        ..MethodConfig::default()
    };
    // sanity-check the script on a zero-multiplier model
    let za = chain_biased_model(&a, &[0.0], 1.5);
    let zb = chain_biased_model(&b, &[0.0], 1.5);
    assert_eq!((sampler.0)(&za), vec![1, -1, 1]);
    assert_eq!((sampler.0)(&zb), vec![1, 1, 1]);

    let out = run_alm_set(&[a, b], &sampler, &cfg).unwrap();
    assert_eq!(out.iterations[0].broken_counts, vec![1, 0]);
    assert!((out.state.lambda[&(0, 1)] - 1.5).abs() < 1e-12);
    assert!((out.state.mu - 1.65).abs() < 1e-12);
}

#[test]
fn class_of_one_matches_alm() {
    let e = clique_problem(8, 2, 4);
    let sa = fast_sampler(5);
    let cfg = weak_chains();
    let alm = run_alm(&e, &sa, &cfg).unwrap();
    let set = run_alm_set(std::slice::from_ref(&e), &sa, &cfg).unwrap();
    assert_eq!(set.state, alm.final_state);
    let mus: Vec<f64> = alm.records.iter().map(|r| r.mu).collect();
    assert_eq!(set.iterations.iter().map(|i| i.mu).collect::<Vec<_>>(), mus);
}

#[test]
fn class_intact_returns_initial_state() {
    let a = two_chain_problem(-1.0, 0.5);
    let b = two_chain_problem(-1.0, -0.5);
    let out = run_alm_set(&[a.clone(), b], &ExactSampler, &MethodConfig::default()).unwrap();
    assert_eq!(out.iterations.len(), 1);
    assert_eq!(out.state, LagrangeState::zeros(&a, 1.5));
}

#[test]
fn class_rejects_mixed_embeddings() {
    let a = two_chain_problem(1.0, 0.5);
    let b = clique_problem(2, 1, 1);
    assert!(matches!(
        run_alm_set(&[a, b], &ExactSampler, &MethodConfig::default()),
        Err(Error::StateMismatch(_))
    ));
    assert!(run_alm_set(&[], &ExactSampler, &MethodConfig::default()).is_err());
}

#[test]
fn set_plus_after_intact_call() {
    let e = two_chain_problem(-1.0, 0.5);
    let mut stored = LagrangeState::zeros(&e, 2.0);
    *stored.lambda.get_mut(&(0, 1)).unwrap() = 0.25;
    let r = run_alm_set_plus(&stored, &e, &ExactSampler, &MethodConfig::default()).unwrap();
    assert_eq!(r.iterations(), 2);
    assert_eq!(r.records[0].broken_count, 0);
    assert_eq!(r.records[1].lambda, vec![0.25]);
    assert!((r.records[1].mu - 2.2).abs() < 1e-12);
    assert_eq!(r.best_iteration, 1);
}

#[test]
fn set_plus_from_initial_state_is_alm_prefix() {
    let e = clique_problem(8, 2, 4);
    let sa = fast_sampler(5);
    let cfg = weak_chains();
    let alm = run_alm(&e, &sa, &cfg).unwrap();
    assert!(alm.iterations() >= 2);
    let plus = run_alm_set_plus(&LagrangeState::zeros(&e, cfg.mu0), &e, &sa, &cfg).unwrap();
    assert_eq!(plus.records[..], alm.records[..2]);
    let once = run_alm_set_once(&LagrangeState::zeros(&e, cfg.mu0), &e, &sa, &cfg).unwrap();
    assert_eq!(once.records[0], plus.records[0]);
}

#[test]
fn best_iteration_prefers_earliest_minimum() {
    let e = two_chain_problem(1.0, 0.5);
    let rec = |iteration, objective| IterationRecord {
        iteration,
        mu: 1.0,
        lambda: vec![0.0],
        broken_count: 0,
        objective,
        logical: SpinVector::down(2),
    };
    let r = RunResult::new(
        Method::Alm,
        vec![rec(1, -1.0), rec(2, -2.0), rec(3, -2.0)],
        LagrangeState::zeros(&e, 1.0),
    );
    assert_eq!(r.best_iteration, 2);
}

#[test]
fn state_file_round_trip() {
    let e = clique_problem(6, 2, 1);
    let lambda: Vec<f64> = (0..e.chain_couplers().len())
        .map(|i| i as f64 * 0.5)
        .collect();
    let state = LagrangeState::new(&e, 2.25, &lambda);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    state.save(&path).unwrap();
    let back = LagrangeState::load(&path).unwrap();
    assert_eq!(back, state);
    assert_eq!(back.lambda_for(&e).unwrap(), lambda);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(json["lambda"]
        .as_object()
        .unwrap()
        .keys()
        .all(|k| k.contains(',')));
    assert_eq!(
        json["embedding_fingerprint"].as_str().unwrap(),
        e.fingerprint()
    );
}

#[test]
fn config_validation() {
    let bad = [
        MethodConfig {
            mu0: 0.0,
            ..MethodConfig::default()
        },
        MethodConfig {
            rho: 1.0,
            ..MethodConfig::default()
        },
        MethodConfig {
            max_iterations: 0,
            ..MethodConfig::default()
        },
    ];
    let e = two_chain_problem(1.0, 0.0);
    for cfg in bad {
        assert!(run_alm(&e, &ExactSampler, &cfg).is_err());
    }
    let _ = Graph::new(0);
}

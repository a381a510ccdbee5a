//! Chain-strength assignment for minor-embedded Ising problems.
//!
//! The crate embeds a logical Ising model onto hardware qubit chains, samples
//! it with a classical annealer that models limited coefficient precision,
//! and compares four ways of choosing the chain couplings: the uniform torque
//! compensation heuristic, an iterative quadratic penalty method, and the
//! augmented Lagrangian method applied per problem or to a class of problems.
//! The [`harness`] module runs the maximum-clique experiments end to end.

pub mod anneal;
pub mod chains;
pub mod embed;
pub mod error;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod ising;
pub mod maxclique;
pub mod methods;
pub mod seed;
pub mod topology;

pub use anneal::{
    normalize_and_perturb, sample, PrecisionModel, Sample, SampleSet, Sampler, SamplerParams,
    SimulatedAnnealer,
};
pub use chains::{diagnose, majority_vote, ChainDiagnostics, TieBreak};
pub use embed::{embed_ising, ChainCoupler, ChainLayout, EmbeddedIsing};
pub use error::{Error, Result};
pub use exact::{exact_solve, ExactSampler};
pub use graph::{gnp_random_graph, Graph};
pub use ising::{evaluate_ising, ising_to_qubo, qubo_to_ising, IsingModel, QuboModel, SpinVector};
pub use maxclique::{
    brute_force_max_clique, clique_ising, clique_qubo, extract_clique, CliqueExtraction,
};
pub use methods::{
    apply_chain_biases, run_alm, run_alm_set, run_alm_set_plus, run_pm, run_sm, utc_chain_strength,
    LagrangeState, MethodConfig, RunResult,
};
pub use topology::{
    chimera_graph, clique_embedding, validate_embedding, Embedding, HardwareGraph, Violation,
};

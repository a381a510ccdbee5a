use std::fs;
use std::path::Path;

use chain_strength::anneal::{SamplerParams, SimulatedAnnealer};
use chain_strength::harness::{
    cmd_embed, cmd_gen, cmd_report, cmd_run, cmd_train_set, load_manifest, read_iterations,
    stable_body, summarize, train_state, ExperimentConfig, Preset,
};
use chain_strength::methods::{Method, MethodConfig};
use chain_strength::{
    chimera_graph, clique_embedding, clique_ising, embed_ising, gnp_random_graph, run_alm, Error,
};

fn small(out: &Path) -> ExperimentConfig {
    ExperimentConfig {
        sizes: vec![8],
        graphs_per_size: 3,
        train_graphs: 3,
        seed: Some(5),
        sampler: SamplerParams {
            num_reads: 30,
            num_sweeps: 100,
            ..SamplerParams::default()
        },
        out_dir: out.to_path_buf(),
        ..ExperimentConfig::default()
    }
}

fn body(path: &Path) -> String {
    stable_body(&fs::read_to_string(path).unwrap())
}

#[test]
fn gen_writes_one_file_per_graph_plus_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        sizes: vec![20],
        graphs_per_size: 5,
        ..small(dir.path())
    };
    cmd_gen(&cfg, false).unwrap();
    let mut names: Vec<String> = fs::read_dir(cfg.instances_dir())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 6);
    assert_eq!(names[0], "manifest.json");
    assert!(names[1..].iter().all(|n| n.ends_with(".dimacs")));
}

#[test]
fn gen_is_byte_identical_and_refuses_overwrite() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    cmd_gen(&small(a.path()), false).unwrap();
    cmd_gen(&small(b.path()), false).unwrap();
    for entry in fs::read_dir(a.path().join("instances")).unwrap() {
        let name = entry.unwrap().file_name();
        assert_eq!(
            fs::read(a.path().join("instances").join(&name)).unwrap(),
            fs::read(b.path().join("instances").join(&name)).unwrap()
        );
    }
    let err = cmd_gen(&small(a.path()), false).unwrap_err();
    assert!(matches!(err, Error::OutputExists(_)));
    cmd_gen(&small(a.path()), true).unwrap();
}

#[test]
fn capacity_error_precedes_writing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        sizes: vec![21],
        chimera_m: Some(5),
        ..small(dir.path())
    };
    assert_eq!(cmd_gen(&cfg, false).unwrap_err().exit_code(), 3);
    assert!(!cfg.instances_dir().exists());
}

#[test]
fn run_without_instances_is_missing_artifact() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cmd_run(&small(dir.path())).unwrap_err().exit_code(), 4);
}

#[test]
fn sm_writes_one_row_per_graph() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        methods: vec![Method::Sm],
        ..small(dir.path())
    };
    cmd_gen(&cfg, false).unwrap();
    cmd_run(&cfg).unwrap();
    let rows = read_iterations(&cfg.results_dir().join("iterations.csv")).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows
        .iter()
        .all(|r| r.method == Method::Sm && r.iteration == 1));
}

#[test]
fn reruns_are_identical_and_summary_is_recomputable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    cmd_gen(&cfg, false).unwrap();
    let paths = cmd_run(&cfg).unwrap();
    let first: Vec<String> = paths.iter().map(|p| body(p)).collect();
    cmd_run(&cfg).unwrap();
    let second: Vec<String> = paths.iter().map(|p| body(p)).collect();
    assert_eq!(first, second);

    let rows = read_iterations(&paths[0]).unwrap();
    assert_eq!(summarize(&rows).len(), 3);
    let summary_from_run = body(&paths[1]);
    cmd_report(&cfg).unwrap();
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&summary_from_run), strip(&body(&paths[1])));
}

#[test]
fn stored_embedding_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    cmd_gen(&cfg, false).unwrap();
    cmd_embed(&cfg, false).unwrap();
    assert!(cfg.embedding_path(8).exists());
    assert!(matches!(
        cmd_embed(&cfg, false),
        Err(Error::OutputExists(_))
    ));
    cmd_run(&cfg).unwrap();
}

#[test]
fn set_methods_need_a_trained_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        methods: vec![Method::AlmSetPlus],
        ..small(dir.path())
    };
    cmd_gen(&cfg, false).unwrap();
    let err = cmd_run(&cfg).unwrap_err();
    let hw = chimera_graph(2).unwrap();
    let fp = clique_embedding(8, &hw).unwrap().fingerprint();
    assert_eq!(err.exit_code(), 4);
    assert!(err.to_string().contains(&fp), "{err}");

    cmd_train_set(&cfg, false).unwrap();
    assert!(matches!(
        cmd_train_set(&cfg, false),
        Err(Error::OutputExists(_))
    ));
    cmd_run(&cfg).unwrap();
    let rows = read_iterations(&cfg.results_dir().join("iterations.csv")).unwrap();
    assert_eq!(rows.len(), 6);
}

#[test]
fn training_on_one_graph_matches_alm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let hw = chimera_graph(2).unwrap();
    let emb = clique_embedding(8, &hw).unwrap();
    let g = gnp_random_graph(8, 0.5, 3).unwrap();
    let trained = train_state(std::slice::from_ref(&g), &emb, &hw, &cfg, 77).unwrap();

    let e = embed_ising(&clique_ising(&g), &emb, &hw).unwrap();
    let sampler = SimulatedAnnealer::new(
        SamplerParams {
            seed: 77,
            ..cfg.sampler.clone()
        },
        cfg.precision.clone(),
    )
    .unwrap();
    let alm = run_alm(
        &e,
        &sampler,
        &MethodConfig {
            seed: 77,
            ..cfg.method.clone()
        },
    )
    .unwrap();
    assert_eq!(trained.state, alm.final_state);
}

#[test]
fn training_rejects_mixed_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let hw = chimera_graph(2).unwrap();
    let emb = clique_embedding(8, &hw).unwrap();
    let graphs = [
        gnp_random_graph(8, 0.5, 1).unwrap(),
        gnp_random_graph(7, 0.5, 1).unwrap(),
    ];
    assert!(train_state(&graphs, &emb, &hw, &cfg, 1).is_err());
}

#[test]
fn desk_preset_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        seed: Some(1),
        sampler: SamplerParams {
            num_reads: 4,
            num_sweeps: 20,
            ..SamplerParams::default()
        },
        out_dir: dir.path().to_path_buf(),
        ..ExperimentConfig::preset(Preset::Desk)
    };
    cmd_gen(&cfg, false).unwrap();
    assert_eq!(load_manifest(&cfg).unwrap().instances.len(), 15);
    let paths = cmd_run(&cfg).unwrap();
    let rows = read_iterations(&paths[0]).unwrap();
    let summary = summarize(&rows);
    assert_eq!(summary.len(), 9);
    assert!(summary.iter().all(|r| r.graphs == 5));
    let trace = fs::read_to_string(&paths[3]).unwrap();
    assert!(trace
        .lines()
        .any(|l| l.starts_with("alm,20,n20_g0,0,coupler")));
}

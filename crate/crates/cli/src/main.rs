use std::path::PathBuf;
use std::process::ExitCode;

use chain_strength::harness::{self, ExperimentConfig, Preset};
use chain_strength::methods::{Method, TieBreakMode};
use chain_strength::{Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "chainstrength",
    version,
    about = "Chain-strength experiments on seeded max-clique instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate seeded G(n, p) instances and a manifest.
    Gen(Common),
    /// Write the native clique embedding for each size.
    Embed(Common),
    /// Run the configured methods on every instance.
    Run(Common),
    /// Train class-level multipliers on a separate training set.
    TrainSet(Common),
    /// Recompute summary.csv from iterations.csv.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// Start from a preset: desk or full.
    #[arg(long)]
    preset: Option<Preset>,
    /// JSON file whose fields override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overwrite existing outputs.
    #[arg(long)]
    force: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    instance_seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    graphs_per_size: Option<usize>,
    #[arg(long)]
    train_graphs: Option<usize>,
    /// Comma-separated: sm, pm, alm, alm-set, alm-set-plus.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long)]
    chimera_m: Option<usize>,
    /// Hardware graph JSON; embeddings must then exist under the output dir.
    #[arg(long)]
    hardware: Option<PathBuf>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    designated_chain: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    num_reads: Option<usize>,
    #[arg(long)]
    num_sweeps: Option<usize>,
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    beta_max: Option<f64>,
    #[arg(long)]
    noise_std: Option<f64>,
    /// Disable coefficient normalisation and noise.
    #[arg(long)]
    no_precision: bool,
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    utc_prefactor: Option<f64>,
    /// coin or first-qubit.
    #[arg(long)]
    tie_break: Option<TieBreakMode>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = self
            .preset
            .map(ExperimentConfig::preset)
            .unwrap_or_default();
        set(&mut cfg.sizes, self.sizes.clone());
        set(&mut cfg.p, self.p);
        set(&mut cfg.graphs_per_size, self.graphs_per_size);
        set(&mut cfg.train_graphs, self.train_graphs);
        set(&mut cfg.methods, self.methods.clone());
        set(&mut cfg.instance_seed, self.instance_seed);
        set(&mut cfg.repeats, self.repeats);
        set(&mut cfg.designated_chain, self.designated_chain);
        set(&mut cfg.out_dir, self.out_dir.clone());
        set(&mut cfg.sampler.num_reads, self.num_reads);
        set(&mut cfg.sampler.num_sweeps, self.num_sweeps);
        set(&mut cfg.sampler.beta_min, self.beta_min);
        set(&mut cfg.sampler.beta_max, self.beta_max);
        set(&mut cfg.precision.noise_std, self.noise_std);
        set(&mut cfg.method.mu0, self.mu0);
        set(&mut cfg.method.rho, self.rho);
        set(&mut cfg.method.max_iterations, self.max_iterations);
        set(&mut cfg.method.utc_prefactor, self.utc_prefactor);
        set(&mut cfg.method.tie_break, self.tie_break);
        if self.seed.is_some() {
            cfg.seed = self.seed;
        }
        if self.chimera_m.is_some() {
            cfg.chimera_m = self.chimera_m;
        }
        if self.hardware.is_some() {
            cfg.hardware = self.hardware.clone();
        }
        if self.no_precision {
            cfg.precision.enabled = false;
        }
        match &self.config {
            Some(path) => cfg.load_overrides(path),
            None => Ok(cfg),
        }
    }
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("{}", p.display());
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Gen(c) => {
            let cfg = c.config()?;
            let manifest = harness::cmd_gen(&cfg, c.force)?;
            println!(
                "{} instances in {}",
                manifest.instances.len(),
                cfg.instances_dir().display()
            );
        }
        Command::Embed(c) => print_paths(&harness::cmd_embed(&c.config()?, c.force)?),
        Command::Run(c) => {
            let cfg = c.config()?;
            cfg.require_seed()?;
            let results = cfg.results_dir().join("iterations.csv");
            if results.exists() && !c.force {
                return Err(Error::OutputExists(results));
            }
            print_paths(&harness::cmd_run(&cfg)?);
        }
        Command::TrainSet(c) => print_paths(&harness::cmd_train_set(&c.config()?, c.force)?),
        Command::Report(c) => println!("{}", harness::cmd_report(&c.config()?)?.display()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

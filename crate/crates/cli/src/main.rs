use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use scc_core::drl::{self, PolicyNet, TrainConfig};
use scc_core::harness::{self, Migration, RunOptions, Scheme};
use scc_core::mcts::RewardMode;
use scc_core::model::fixtures;
use scc_core::oracle;
use scc_core::rng::{stream, Stream};
use scc_core::{Game, ScenarioConfig};

#[derive(Parser)]
#[command(name = "scc", version, about = "Service chain composition simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scheme over one or more seeds and write CSV traces.
    Run(RunArgs),
    /// Converged weighted cost over a grid of failure probabilities.
    SweepFailures(SweepArgs),
    /// Exhaustive optimum and mixing-time bounds for a small scenario.
    Oracle(OracleArgs),
    /// Train a policy network for the drl scheme.
    DrlTrain(TrainArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Ma,
    Mh,
    Uscs,
    Mcts,
    Drl,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Ma => Scheme::Ma,
            SchemeArg::Mh => Scheme::Mh,
            SchemeArg::Uscs => Scheme::Uscs,
            SchemeArg::Mcts => Scheme::Mcts,
            SchemeArg::Drl => Scheme::Drl,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MigrationArg {
    PerPlayer,
    Shared,
}

/// Knobs shared by `run` and `sweep-failures`.
#[derive(Args)]
struct SimArgs {
    /// Scenario TOML file, or one of the built-in names t1, p-default, p-f2.
    #[arg(long)]
    config: String,
    #[arg(long, value_enum, default_value = "mh")]
    scheme: SchemeArg,
    /// First seed; run k uses seed + k. Defaults to the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 100.0)]
    duration_s: f64,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    mcts_budget: Option<usize>,
    /// Back-propagate raw potentials instead of normalized ones.
    #[arg(long)]
    mcts_raw_reward: bool,
    #[arg(long)]
    trace_every: Option<u64>,
    #[arg(long, value_enum, default_value = "per-player")]
    migration: MigrationArg,
    /// Trained network for the drl scheme.
    #[arg(long)]
    net: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    sim: SimArgs,
    #[arg(long, env = harness::OUT_DIR_ENV, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    sim: SimArgs,
    /// User failure probabilities, then VM failure probabilities: "0,0.1;0,0.1".
    #[arg(long, default_value = "0,0.1,0.2,0.3,0.4,0.5;0,0.1,0.2,0.3,0.4,0.5")]
    grid: String,
    /// Also write the table as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    config: String,
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Seed for latency sampling.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: String,
    #[arg(long, default_value_t = 2000)]
    episodes: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 128)]
    hidden: usize,
    #[arg(long, default_value_t = 1e-4)]
    lr: f64,
    /// Actions per episode (default 20 per player).
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn load_config(spec: &str) -> Result<ScenarioConfig> {
    let path = Path::new(spec);
    if path.exists() {
        return ScenarioConfig::load(path).with_context(|| format!("loading {spec}"));
    }
    match fixtures::named(spec) {
        Some(cfg) => Ok(cfg),
        None => bail!("{spec} is neither a file nor a built-in scenario (t1, p-default, p-f2)"),
    }
}

fn run_options(sim: &SimArgs, config: &ScenarioConfig) -> Result<RunOptions> {
    let mut opts = RunOptions::new(sim.scheme.into(), sim.seed.unwrap_or(config.seed), sim.duration_s);
    opts.beta = sim.beta;
    opts.trace_every = sim.trace_every;
    if let Some(b) = sim.mcts_budget {
        opts.mcts.budget = b;
    }
    if sim.mcts_raw_reward {
        opts.mcts.reward = RewardMode::Raw;
    }
    opts.migration = match sim.migration {
        MigrationArg::PerPlayer => Migration::PerPlayer,
        MigrationArg::Shared => Migration::Shared,
    };
    if let Some(path) = &sim.net {
        opts.net = Some(PolicyNet::load(path).with_context(|| format!("loading network {}", path.display()))?);
    }
    Ok(opts)
}

fn run(args: RunArgs) -> Result<()> {
    let config = load_config(&args.sim.config)?;
    let opts = run_options(&args.sim, &config)?;
    let traces = harness::run_many(&config, &opts, args.sim.runs)?;
    let summary = harness::write_outputs(&args.out, &traces)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let config = load_config(&args.sim.config)?;
    let opts = run_options(&args.sim, &config)?;
    let (users, vms) = harness::parse_grid(&args.grid)?;
    let table = harness::sweep_failures(&config, &users, &vms, &opts, args.sim.runs)?;
    let mut text = String::from("user_fail");
    for v in &table.vm_fail {
        text.push_str(&format!(",vm_{}", harness::fmt_g(*v)));
    }
    text.push('\n');
    for (u, row) in table.user_fail.iter().zip(&table.cells) {
        text.push_str(&harness::fmt_g(*u));
        for c in row {
            text.push(',');
            text.push_str(&harness::fmt_g(*c));
        }
        text.push('\n');
    }
    print!("{text}");
    println!("monotone: {}", table.is_monotone());
    if let Some(out) = args.out {
        std::fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn oracle_cmd(args: OracleArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    let game = Game::from_config(&config, args.seed.unwrap_or(config.seed))?;
    let report = oracle::bound_report(&game, args.epsilon)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn train(args: TrainArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    let seed = args.seed.unwrap_or(config.seed);
    let game = Game::from_config(&config, seed)?;
    let mut net = PolicyNet::for_game(&game, args.hidden, seed);
    let cfg = TrainConfig {
        episodes: args.episodes,
        horizon: args.horizon,
        lr: args.lr,
        ..TrainConfig::default()
    };
    let report = drl::train(&mut net, &game, &cfg, &mut stream(seed, Stream::Training))?;
    net.save(&args.out)?;
    let tail = &report.curve[report.curve.len().saturating_sub(100)..];
    let mean_tail = tail.iter().sum::<f64>() / tail.len().max(1) as f64;
    println!(
        "{}",
        serde_json::json!({
            "net": args.out,
            "episodes": report.curve.len(),
            "first_episode_phi": report.curve.first(),
            "last_100_mean_phi": mean_tail,
        })
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(a) => run(a),
        Command::SweepFailures(a) => sweep(a),
        Command::Oracle(a) => oracle_cmd(a),
        Command::DrlTrain(a) => train(a),
    }
}

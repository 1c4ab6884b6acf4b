//! Experiment runner: scheme dispatch on a slotted clock, runtime events,
//! multi-seed aggregation and CSV output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::drl::{self, ActionIndex, PolicyNet, StateEncoder};
use crate::mcts::{self, MctsConfig};
use crate::model::{
    config::EventKindConfig, resolve_player, Game, GameParams, ModelError, PlayerSpec, ScenarioConfig, Strategy,
};
use crate::rng::{stream, SimRng, Stream};
use crate::samplers::{self, ChainState, RoundRobin, SelectionMode};

pub const OUT_DIR_ENV: &str = "SCC_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampler(#[from] samplers::SamplerError),
    #[error(transparent)]
    Mcts(#[from] mcts::MctsError),
    #[error(transparent)]
    Drl(#[from] drl::DrlError),
    #[error("unknown scheme {0:?} (expected ma, mh, uscs, mcts or drl)")]
    UnknownScheme(String),
    #[error("the drl scheme needs a trained network")]
    MissingNet,
    #[error("network expects {net_input} inputs and {net_output} actions, scenario has {input} and {output}")]
    NetMismatch {
        net_input: usize,
        net_output: usize,
        input: usize,
        output: usize,
    },
    #[error("event at {time_s} s changes the state layout, which a trained network cannot follow")]
    NetInvalidated { time_s: f64 },
    #[error("event at {time_s} s leaves no live instance of a needed VNF type: {source}")]
    Unrecoverable { time_s: f64, source: ModelError },
    #[error("invalid run setting: {0}")]
    InvalidOptions(String),
    #[error("no traces to aggregate")]
    EmptyAggregate,
    #[error("traces are not aligned on the same iteration grid")]
    Misaligned,
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path, e: impl fmt::Display) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ma,
    Mh,
    Uscs,
    Mcts,
    Drl,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Ma, Scheme::Mh, Scheme::Uscs, Scheme::Mcts, Scheme::Drl];

    /// Slot length in microseconds.
    pub fn slot_us(self) -> u64 {
        match self {
            Scheme::Mh => 10_000,
            _ => 1_000_000,
        }
    }

    pub fn slot_s(self) -> f64 {
        self.slot_us() as f64 / 1e6
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ma => "ma",
            Scheme::Mh => "mh",
            Scheme::Uscs => "uscs",
            Scheme::Mcts => "mcts",
            Scheme::Drl => "drl",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| HarnessError::UnknownScheme(s.to_string()))
    }
}

/// Where traffic of a failed VM goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Migration {
    /// Every affected player draws its own surviving VM.
    #[default]
    PerPlayer,
    /// One surviving VM is drawn and all affected players move to it.
    Shared,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub scheme: Scheme,
    pub seed: u64,
    pub duration_s: f64,
    /// Overrides the scenario's beta.
    pub beta: Option<f64>,
    /// Record every k-th iteration; `None` picks 1 for runs of at most 1000
    /// iterations and 10 otherwise.
    pub trace_every: Option<u64>,
    pub selection: SelectionMode,
    pub mcts: MctsConfig,
    pub migration: Migration,
    pub net: Option<PolicyNet>,
}

impl RunOptions {
    pub fn new(scheme: Scheme, seed: u64, duration_s: f64) -> Self {
        Self {
            scheme,
            seed,
            duration_s,
            beta: None,
            trace_every: None,
            selection: SelectionMode::UniformDraw,
            mcts: MctsConfig::default(),
            migration: Migration::PerPlayer,
            net: None,
        }
    }

    pub fn iterations(&self) -> u64 {
        let us = (self.duration_s * 1e6).round() as u64;
        us / self.scheme.slot_us()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub run_id: u64,
    pub scheme: Scheme,
    pub iteration: u64,
    pub sim_time_s: f64,
    pub potential: f64,
    pub weighted_avg_cost: f64,
    /// Events applied just before this iteration, `;`-separated.
    pub event: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTrace {
    pub run_id: u64,
    pub scheme: Scheme,
    pub seed: u64,
    pub records: Vec<TraceRecord>,
    /// Strategy indices at the end of the run.
    pub final_choices: Vec<usize>,
}

impl ExperimentTrace {
    pub fn potentials(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.potential).collect()
    }

    pub fn costs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.weighted_avg_cost).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    PlayerJoin(PlayerSpec),
    VmFailure(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time_s: f64,
    pub kind: EventKind,
    pub tag: String,
}

impl Event {
    fn time_us(&self) -> u64 {
        (self.time_s * 1e6).round() as u64
    }
}

/// Resolves the scenario's event list against its topology, in time order.
pub fn resolve_events(config: &ScenarioConfig, game: &Game) -> Result<Vec<Event>, HarnessError> {
    let mut out = Vec::with_capacity(config.events.len());
    for ev in &config.events {
        if !(ev.time_s.is_finite() && ev.time_s >= 0.0) {
            return Err(HarnessError::InvalidOptions(format!("event time {} must be >= 0", ev.time_s)));
        }
        let (kind, tag) = match &ev.kind {
            EventKindConfig::PlayerJoin {
                rate,
                chain,
                ingress,
                egress,
                failure_cost,
            } => {
                let spec = resolve_player(usize::MAX, *rate, chain, ingress, egress, *failure_cost, game.topology())?;
                (EventKind::PlayerJoin(spec), format!("join(rate={rate})"))
            }
            EventKindConfig::VmFailure { server, vnf } => {
                let vm = game.topology().vm_at(server, vnf)?;
                (EventKind::VmFailure(vm), format!("vm_failure({server}/{vnf})"))
            }
        };
        out.push(Event {
            time_s: ev.time_s,
            kind,
            tag,
        });
    }
    out.sort_by(|a, b| a.time_s.total_cmp(&b.time_s));
    Ok(out)
}

/// Mutable state of one run.
#[derive(Debug, Clone)]
pub struct LiveState {
    pub game: Game,
    pub chain: ChainState,
    pub active: Vec<usize>,
}

impl LiveState {
    pub fn new(game: Game, choices: Vec<usize>) -> Self {
        let chain = ChainState::new(&game, choices);
        let active = (0..game.num_players()).collect();
        Self { game, chain, active }
    }
}

/// Applies one event: joins pick a uniformly random strategy; a failed VM's
/// users are moved to surviving instances of the same type.
pub fn apply_event<R: Rng + ?Sized>(
    event: &Event,
    state: &LiveState,
    migration: Migration,
    rng: &mut R,
) -> Result<LiveState, HarnessError> {
    let old = &state.game;
    match &event.kind {
        EventKind::PlayerJoin(spec) => {
            let game = old.with_player(spec.clone())?;
            let id = game.num_players() - 1;
            let mut choices = state.chain.choices().to_vec();
            choices.push(rng.random_range(0..game.space_len(id)));
            Ok(LiveState::new(game, choices))
        }
        EventKind::VmFailure(vm) => {
            let vm = *vm;
            let game = old.with_failed_vm(vm).map_err(|source| HarnessError::Unrecoverable {
                time_s: event.time_s,
                source,
            })?;
            let vnf_type = old.topology().vms()[vm].vnf_type;
            let survivors = game.topology().hosts(vnf_type);
            let shared = match migration {
                Migration::Shared => Some(survivors[rng.random_range(0..survivors.len())]),
                Migration::PerPlayer => None,
            };
            let mut choices = Vec::with_capacity(old.num_players());
            for i in 0..old.num_players() {
                let mut vms = old.space(i)[state.chain.choices()[i]].0.clone();
                for slot in vms.iter_mut().filter(|v| **v == vm) {
                    *slot = shared.unwrap_or_else(|| survivors[rng.random_range(0..survivors.len())]);
                }
                let s = game
                    .index_of(i, &Strategy(vms.clone()))
                    .ok_or(ModelError::InvalidStrategy { player: i, strategy: vms })?;
                choices.push(s);
            }
            Ok(LiveState::new(game, choices))
        }
    }
}

struct Streams {
    selection: SimRng,
    proposal: SimRng,
    events: SimRng,
    search: SimRng,
}

/// Runs one scheme on one seed.
pub fn run_experiment(config: &ScenarioConfig, opts: &RunOptions, run_id: u64) -> Result<ExperimentTrace, HarnessError> {
    if !(opts.duration_s.is_finite() && opts.duration_s >= 0.0) {
        return Err(HarnessError::InvalidOptions(format!("duration {} must be >= 0", opts.duration_s)));
    }
    if opts.trace_every == Some(0) {
        return Err(HarnessError::InvalidOptions("trace interval must be positive".into()));
    }
    let mut game = Game::from_config(config, opts.seed)?;
    if let Some(beta) = opts.beta {
        game = game.with_params(GameParams { beta, ..*game.params() })?;
    }
    let events = resolve_events(config, &game)?;
    let mut rngs = Streams {
        selection: stream(opts.seed, Stream::Selection),
        proposal: stream(opts.seed, Stream::Proposal),
        events: stream(opts.seed, Stream::Events),
        search: stream(opts.seed, Stream::Search),
    };
    let initial = game.random_choices(&mut stream(opts.seed, Stream::Init));

    let drl_parts = if opts.scheme == Scheme::Drl {
        let net = opts.net.as_ref().ok_or(HarnessError::MissingNet)?;
        let enc = StateEncoder::new(&game);
        let acts = ActionIndex::new(&game);
        if net.input != enc.len() || net.output != acts.len() {
            return Err(HarnessError::NetMismatch {
                net_input: net.input,
                net_output: net.output,
                input: enc.len(),
                output: acts.len(),
            });
        }
        Some((net, enc, acts))
    } else {
        None
    };

    let initial = if opts.scheme == Scheme::Mcts {
        mcts::mcts_compose_choices(&game, &opts.mcts, &mut rngs.search)?
    } else {
        initial
    };
    let mut live = LiveState::new(game, initial);
    let iterations = opts.iterations();
    let every = opts.trace_every.unwrap_or(if iterations <= 1000 { 1 } else { 10 });
    let slot_us = opts.scheme.slot_us();
    let mut order = RoundRobin::default();
    let mut records = Vec::new();
    let record = |live: &LiveState, t: u64, event: String| TraceRecord {
        run_id,
        scheme: opts.scheme,
        iteration: t,
        sim_time_s: (t * slot_us) as f64 / 1e6,
        potential: live.chain.potential(&live.game),
        weighted_avg_cost: live.chain.weighted_average_cost(&live.game),
        event,
    };
    records.push(record(&live, 0, String::new()));
    let mut next_event = 0;
    for t in 1..=iterations {
        let mut tags = Vec::new();
        while next_event < events.len() && events[next_event].time_us() < t * slot_us {
            let ev = &events[next_event];
            if opts.scheme == Scheme::Drl {
                return Err(HarnessError::NetInvalidated { time_s: ev.time_s });
            }
            live = apply_event(ev, &live, opts.migration, &mut rngs.events)?;
            tags.push(ev.tag.clone());
            next_event += 1;
        }
        let LiveState { game, chain, active } = &mut live;
        match opts.scheme {
            Scheme::Ma => {
                samplers::ma_step(game, chain, active, opts.selection, &mut rngs.selection, &mut rngs.proposal)?;
            }
            Scheme::Mh => {
                samplers::mh_step(game, chain, active, opts.selection, &mut rngs.selection, &mut rngs.proposal)?;
            }
            Scheme::Uscs => {
                samplers::uscs_step(game, chain, active, &mut order)?;
            }
            Scheme::Mcts => {}
            Scheme::Drl => {
                let (net, enc, acts) = drl_parts.as_ref().expect("checked above");
                let mut c = chain.choices().to_vec();
                drl::drl_step(net, game, enc, acts, &mut c)?;
                *chain = ChainState::new(game, c);
            }
        }
        if t % every == 0 || t == iterations || !tags.is_empty() {
            records.push(record(&live, t, tags.join(";")));
        }
    }
    Ok(ExperimentTrace {
        run_id,
        scheme: opts.scheme,
        seed: opts.seed,
        records,
        final_choices: live.chain.choices().to_vec(),
    })
}

/// Runs seeds `opts.seed .. opts.seed + runs`, with run ids `0..runs`.
pub fn run_many(config: &ScenarioConfig, opts: &RunOptions, runs: u64) -> Result<Vec<ExperimentTrace>, HarnessError> {
    (0..runs)
        .map(|k| {
            let mut o = opts.clone();
            o.seed = opts.seed.wrapping_add(k);
            run_experiment(config, &o, k)
        })
        .collect()
}

/// Mean over the final 10% of a series (at least one element).
pub fn converged_value(series: &[f64]) -> f64 {
    if series.is_empty() {
        return f64::NAN;
    }
    let n = series.len();
    let tail = (n / 10).max(1);
    series[n - tail..].iter().sum::<f64>() / tail as f64
}

/// First time after which every later point stays within `tol` (relative)
/// of `target`.
pub fn settling_time(times: &[f64], series: &[f64], target: f64, tol: f64) -> Option<f64> {
    let band = tol * target.abs();
    let last_out = series.iter().rposition(|v| (v - target).abs() > band);
    match last_out {
        None => times.first().copied(),
        Some(k) if k + 1 < times.len() => Some(times[k + 1]),
        Some(_) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub scheme: Scheme,
    pub runs: usize,
    pub iteration: Vec<u64>,
    pub sim_time_s: Vec<f64>,
    pub potential_mean: Vec<f64>,
    pub potential_std: Vec<f64>,
    pub cost_mean: Vec<f64>,
    pub cost_std: Vec<f64>,
    pub converged_potential: f64,
    pub converged_cost: f64,
    /// Per-run converged values, for spread estimates.
    pub run_converged_potential: Vec<f64>,
    pub run_converged_cost: Vec<f64>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Pointwise mean and sample standard deviation over aligned traces.
pub fn aggregate(traces: &[ExperimentTrace]) -> Result<Aggregate, HarnessError> {
    let first = traces.first().ok_or(HarnessError::EmptyAggregate)?;
    let grid: Vec<u64> = first.records.iter().map(|r| r.iteration).collect();
    for t in traces {
        if t.scheme != first.scheme || t.records.len() != grid.len() || t.records.iter().zip(&grid).any(|(r, g)| r.iteration != *g) {
            return Err(HarnessError::Misaligned);
        }
    }
    let mut out = Aggregate {
        scheme: first.scheme,
        runs: traces.len(),
        iteration: grid.clone(),
        sim_time_s: first.records.iter().map(|r| r.sim_time_s).collect(),
        potential_mean: Vec::with_capacity(grid.len()),
        potential_std: Vec::with_capacity(grid.len()),
        cost_mean: Vec::with_capacity(grid.len()),
        cost_std: Vec::with_capacity(grid.len()),
        converged_potential: 0.0,
        converged_cost: 0.0,
        run_converged_potential: traces.iter().map(|t| converged_value(&t.potentials())).collect(),
        run_converged_cost: traces.iter().map(|t| converged_value(&t.costs())).collect(),
    };
    for k in 0..grid.len() {
        let phi: Vec<f64> = traces.iter().map(|t| t.records[k].potential).collect();
        let cost: Vec<f64> = traces.iter().map(|t| t.records[k].weighted_avg_cost).collect();
        let (pm, ps) = mean_std(&phi);
        let (cm, cs) = mean_std(&cost);
        out.potential_mean.push(pm);
        out.potential_std.push(ps);
        out.cost_mean.push(cm);
        out.cost_std.push(cs);
    }
    out.converged_potential = converged_value(&out.potential_mean);
    out.converged_cost = converged_value(&out.cost_mean);
    Ok(out)
}

/// Converged weighted costs over a grid of failure probabilities;
/// `cells[r][c]` is for `user_fail[r]` and `vm_fail[c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureTable {
    pub user_fail: Vec<f64>,
    pub vm_fail: Vec<f64>,
    pub cells: Vec<Vec<f64>>,
}

impl FailureTable {
    /// Whether costs never decrease along rows and down columns.
    pub fn is_monotone(&self) -> bool {
        let rows = self.cells.len();
        (0..rows).all(|r| self.cells[r].windows(2).all(|w| w[0] <= w[1]))
            && (1..rows).all(|r| (0..self.cells[r].len()).all(|c| self.cells[r - 1][c] <= self.cells[r][c]))
    }
}

/// Parses `"u1,u2,...;v1,v2,..."` (user failure probabilities, then VM).
pub fn parse_grid(spec: &str) -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
    let bad = || HarnessError::InvalidOptions(format!("grid {spec:?} should look like \"0,0.1;0,0.1,0.2\""));
    let (u, v) = spec.split_once(';').ok_or_else(bad)?;
    let list = |s: &str| -> Result<Vec<f64>, HarnessError> {
        s.split(',')
            .map(|x| {
                let p: f64 = x.trim().parse().map_err(|_| bad())?;
                if (0.0..=1.0).contains(&p) {
                    Ok(p)
                } else {
                    Err(HarnessError::InvalidOptions(format!("probability {p} outside [0, 1]")))
                }
            })
            .collect()
    };
    let (u, v) = (list(u)?, list(v)?);
    if u.is_empty() || v.is_empty() {
        return Err(bad());
    }
    Ok((u, v))
}

pub fn sweep_failures(
    config: &ScenarioConfig,
    user_fail: &[f64],
    vm_fail: &[f64],
    opts: &RunOptions,
    runs: u64,
) -> Result<FailureTable, HarnessError> {
    let mut cells = Vec::with_capacity(user_fail.len());
    for &u in user_fail {
        let mut row = Vec::with_capacity(vm_fail.len());
        for &v in vm_fail {
            if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
                return Err(HarnessError::InvalidOptions(format!("cell ({u}, {v}) outside [0, 1]")));
            }
            let mut cfg = config.clone();
            cfg.game.gamma_user = 1.0 - u;
            cfg.game.gamma_vm = 1.0 - v;
            let traces = run_many(&cfg, opts, runs)?;
            row.push(aggregate(&traces)?.converged_cost);
        }
        cells.push(row);
    }
    Ok(FailureTable {
        user_fail: user_fail.to_vec(),
        vm_fail: vm_fail.to_vec(),
        cells,
    })
}

/// `%g`-style formatting with 6 significant digits.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa.to_string()), exp.abs())
    } else {
        trim(format!("{x:.*}", (5 - exp) as usize))
    }
}

pub const TRACE_HEADER: [&str; 7] = [
    "run_id",
    "scheme",
    "iteration",
    "sim_time_s",
    "potential",
    "weighted_avg_cost",
    "event",
];

pub fn write_trace_csv(path: &Path, trace: &ExperimentTrace) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(TRACE_HEADER)?;
    for r in &trace.records {
        w.write_record([
            r.run_id.to_string(),
            r.scheme.to_string(),
            r.iteration.to_string(),
            fmt_g(r.sim_time_s),
            fmt_g(r.potential),
            fmt_g(r.weighted_avg_cost),
            r.event.clone(),
        ])?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

pub fn write_aggregate_csv(path: &Path, agg: &Aggregate) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record([
        "scheme",
        "iteration",
        "sim_time_s",
        "potential_mean",
        "potential_std",
        "weighted_avg_cost_mean",
        "weighted_avg_cost_std",
    ])?;
    for k in 0..agg.iteration.len() {
        w.write_record([
            agg.scheme.to_string(),
            agg.iteration[k].to_string(),
            fmt_g(agg.sim_time_s[k]),
            fmt_g(agg.potential_mean[k]),
            fmt_g(agg.potential_std[k]),
            fmt_g(agg.cost_mean[k]),
            fmt_g(agg.cost_std[k]),
        ])?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scheme: Scheme,
    pub runs: usize,
    pub converged_potential: f64,
    pub converged_cost: f64,
    pub files: Vec<PathBuf>,
}

/// Writes one CSV per run, `aggregate.csv` and `summary.json` into `dir`.
pub fn write_outputs(dir: &Path, traces: &[ExperimentTrace]) -> Result<RunSummary, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let agg = aggregate(traces)?;
    let mut files = Vec::with_capacity(traces.len() + 2);
    for t in traces {
        let path = dir.join(format!("{}_run{:03}_seed{}.csv", t.scheme, t.run_id, t.seed));
        write_trace_csv(&path, t)?;
        files.push(path);
    }
    let path = dir.join("aggregate.csv");
    write_aggregate_csv(&path, &agg)?;
    files.push(path);
    let summary = RunSummary {
        scheme: agg.scheme,
        runs: agg.runs,
        converged_potential: agg.converged_potential,
        converged_cost: agg.converged_cost,
        files,
    };
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(summary)
}

/// Output directory from the environment, else `./out`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

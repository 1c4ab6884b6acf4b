//! System topology, player population and strategy spaces.

pub mod config;
pub mod fixtures;

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use config::{
    EventConfig, EventKindConfig, GameConfig, LatencyRule, PlayerConfig, ScenarioConfig,
    ServerConfig,
};

use crate::rng::{stream, Stream};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("unknown VNF type {0:?}")]
    UnknownVnfType(String),
    #[error("unknown router {0:?}")]
    UnknownRouter(String),
    #[error("unknown server {0:?}")]
    UnknownServer(String),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("server {server:?} hosts more than one instance of {vnf:?}")]
    DuplicateInstance { server: String, vnf: String },
    #[error("player {player} needs VNF type {vnf:?} but no live VM hosts it")]
    UnhostedType { player: usize, vnf: String },
    #[error("invalid latency rule: {0}")]
    InvalidLatency(String),
    #[error("invalid player {player}: {reason}")]
    InvalidPlayer { player: usize, reason: String },
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),
    #[error("no VM with id {0}")]
    UnknownVm(usize),
    #[error("no VM of type {vnf:?} on server {server:?}")]
    NoSuchInstance { server: String, vnf: String },
    #[error("strategy {strategy:?} is not in the strategy space of player {player}")]
    InvalidStrategy { player: usize, strategy: Vec<usize> },
    #[error("profile has {got} strategies, game has {expected} players")]
    ProfileSize { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VnfType {
    pub id: usize,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VmInstance {
    pub id: usize,
    pub server: usize,
    pub vnf_type: usize,
}

/// A node of the latency graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Router(usize),
    Vm(usize),
}

/// Servers, VM instances, gateway routers and the symmetric latency table
/// over routers and VMs.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemTopology {
    server_names: Vec<String>,
    vnf_types: Vec<VnfType>,
    vms: Vec<VmInstance>,
    routers: Vec<String>,
    /// Row-major `(R + V)^2` table; routers first, then VMs.
    latency: Vec<f64>,
    alive: Vec<bool>,
}

impl SystemTopology {
    /// Assembles a topology from an explicit latency function. Used for
    /// hand-built instances; `build_topology` is the config-driven path.
    pub fn from_parts(
        server_names: Vec<String>,
        vnf_types: Vec<VnfType>,
        vms: Vec<VmInstance>,
        routers: Vec<String>,
        mut latency_of: impl FnMut(Node, Node) -> f64,
    ) -> Result<Self, ModelError> {
        let mut seen = HashMap::new();
        for vm in &vms {
            if vm.server >= server_names.len() {
                return Err(ModelError::UnknownServer(vm.server.to_string()));
            }
            if vm.vnf_type >= vnf_types.len() {
                return Err(ModelError::UnknownVnfType(vm.vnf_type.to_string()));
            }
            if seen.insert((vm.server, vm.vnf_type), vm.id).is_some() {
                return Err(ModelError::DuplicateInstance {
                    server: server_names[vm.server].clone(),
                    vnf: vnf_types[vm.vnf_type].name.clone(),
                });
            }
        }
        if vms.iter().enumerate().any(|(k, vm)| vm.id != k) {
            return Err(ModelError::InvalidParams("VM ids must be dense 0..V-1".into()));
        }
        let nodes = routers.len() + vms.len();
        let mut table = vec![0.0; nodes * nodes];
        let node_of = |k: usize| {
            if k < routers.len() {
                Node::Router(k)
            } else {
                Node::Vm(k - routers.len())
            }
        };
        for a in 0..nodes {
            for b in (a + 1)..nodes {
                let l = latency_of(node_of(a), node_of(b));
                if !(l.is_finite() && l >= 0.0) {
                    return Err(ModelError::InvalidLatency(format!(
                        "latency between {:?} and {:?} is {l}",
                        node_of(a),
                        node_of(b)
                    )));
                }
                table[a * nodes + b] = l;
                table[b * nodes + a] = l;
            }
        }
        let alive = vec![true; vms.len()];
        Ok(Self {
            server_names,
            vnf_types,
            vms,
            routers,
            latency: table,
            alive,
        })
    }

    pub fn servers(&self) -> usize {
        self.server_names.len()
    }

    pub fn server_name(&self, server: usize) -> &str {
        &self.server_names[server]
    }

    pub fn vnf_types(&self) -> &[VnfType] {
        &self.vnf_types
    }

    pub fn vms(&self) -> &[VmInstance] {
        &self.vms
    }

    pub fn routers(&self) -> &[String] {
        &self.routers
    }

    pub fn router_id(&self, name: &str) -> Option<usize> {
        self.routers.iter().position(|r| r == name)
    }

    pub fn vnf_id(&self, name: &str) -> Option<usize> {
        self.vnf_types.iter().position(|t| t.name == name)
    }

    fn node_index(&self, node: Node) -> usize {
        match node {
            Node::Router(r) => r,
            Node::Vm(v) => self.routers.len() + v,
        }
    }

    pub fn latency(&self, a: Node, b: Node) -> f64 {
        let n = self.routers.len() + self.vms.len();
        self.latency[self.node_index(a) * n + self.node_index(b)]
    }

    pub fn is_alive(&self, vm: usize) -> bool {
        self.alive[vm]
    }

    /// Live VMs hosting `vnf_type`, in ascending id order.
    pub fn hosts(&self, vnf_type: usize) -> Vec<usize> {
        self.vms
            .iter()
            .filter(|vm| vm.vnf_type == vnf_type && self.alive[vm.id])
            .map(|vm| vm.id)
            .collect()
    }

    pub fn vm_at(&self, server: &str, vnf: &str) -> Result<usize, ModelError> {
        let s = self
            .server_names
            .iter()
            .position(|n| n == server)
            .ok_or_else(|| ModelError::UnknownServer(server.to_string()))?;
        let t = self
            .vnf_id(vnf)
            .ok_or_else(|| ModelError::UnknownVnfType(vnf.to_string()))?;
        self.vms
            .iter()
            .find(|vm| vm.server == s && vm.vnf_type == t)
            .map(|vm| vm.id)
            .ok_or_else(|| ModelError::NoSuchInstance {
                server: server.to_string(),
                vnf: vnf.to_string(),
            })
    }

    /// Removes a VM from the live set. The VM keeps its id.
    pub fn fail_vm(&mut self, vm: usize) -> Result<(), ModelError> {
        match self.alive.get_mut(vm) {
            Some(flag) => {
                *flag = false;
                Ok(())
            }
            None => Err(ModelError::UnknownVm(vm)),
        }
    }

    /// Raw latency table, routers first. Exposed for reproducibility checks.
    pub fn latency_table(&self) -> &[f64] {
        &self.latency
    }
}

/// One user: traffic rate, ordered service chain, gateway routers and the
/// penalty paid on failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSpec {
    pub id: usize,
    pub rate: f64,
    pub chain: Vec<usize>,
    pub ingress: usize,
    pub egress: usize,
    pub failure_cost: f64,
}

impl PlayerSpec {
    pub fn chain_len(&self) -> usize {
        self.chain.len()
    }
}

/// Cost weights and survival probabilities. Failure probabilities are always
/// derived as complements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_user: f64,
    pub gamma_vm: f64,
}

impl GameParams {
    pub fn user_failure(&self) -> f64 {
        1.0 - self.gamma_user
    }

    pub fn vm_failure(&self) -> f64 {
        1.0 - self.gamma_vm
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(ModelError::InvalidParams(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(ModelError::InvalidParams(format!("beta must be >= 0, got {}", self.beta)));
        }
        for (name, g) in [("gamma_user", self.gamma_user), ("gamma_vm", self.gamma_vm)] {
            if !(0.0..=1.0).contains(&g) {
                return Err(ModelError::InvalidParams(format!("{name} must lie in [0, 1], got {g}")));
            }
        }
        Ok(())
    }
}

impl From<GameConfig> for GameParams {
    fn from(c: GameConfig) -> Self {
        Self {
            alpha: c.alpha,
            beta: c.beta,
            gamma_user: c.gamma_user,
            gamma_vm: c.gamma_vm,
        }
    }
}

/// VM choice per chain position; position `j` hosts the player's `j`-th type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Strategy(pub Vec<usize>);

impl Strategy {
    pub fn vms(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, vm: usize) -> bool {
        self.0.contains(&vm)
    }
}

/// One strategy per player, indexed by player id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyProfile(pub Vec<Strategy>);

impl StrategyProfile {
    pub fn players(&self) -> usize {
        self.0.len()
    }

    pub fn strategy(&self, player: usize) -> &Strategy {
        &self.0[player]
    }

    pub fn with_strategy(&self, player: usize, strategy: Strategy) -> Self {
        let mut next = self.clone();
        next.0[player] = strategy;
        next
    }
}

/// Builds servers, VMs and routers from `config`, sampling cross-server
/// latencies from `seed`.
pub fn build_topology(config: &ScenarioConfig, seed: u64) -> Result<SystemTopology, ModelError> {
    let rule = config.latency;
    for (name, v) in [
        ("router", rule.router),
        ("intra", rule.intra),
        ("cross_lo", rule.cross_lo),
        ("cross_hi", rule.cross_hi),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(ModelError::InvalidLatency(format!("{name} = {v} must be a non-negative number")));
        }
    }
    if rule.cross_hi < rule.cross_lo {
        return Err(ModelError::InvalidLatency(format!(
            "cross_hi ({}) < cross_lo ({})",
            rule.cross_hi, rule.cross_lo
        )));
    }

    let type_names = config.type_names();
    check_unique(&type_names)?;
    check_unique(&config.routers)?;
    check_unique(&config.servers.iter().map(|s| s.name.clone()).collect::<Vec<_>>())?;
    let vnf_types: Vec<VnfType> = type_names
        .iter()
        .enumerate()
        .map(|(id, name)| VnfType { id, name: name.clone() })
        .collect();

    let mut vms = Vec::new();
    for (server, sc) in config.servers.iter().enumerate() {
        let mut hosted: Vec<usize> = Vec::with_capacity(sc.hosts.len());
        for host in &sc.hosts {
            let t = type_names
                .iter()
                .position(|n| n == host)
                .ok_or_else(|| ModelError::UnknownVnfType(host.clone()))?;
            if hosted.contains(&t) {
                return Err(ModelError::DuplicateInstance {
                    server: sc.name.clone(),
                    vnf: host.clone(),
                });
            }
            hosted.push(t);
        }
        hosted.sort_unstable();
        for t in hosted {
            vms.push(VmInstance {
                id: vms.len(),
                server,
                vnf_type: t,
            });
        }
    }

    // Every type demanded by a player (or a joining player) must be hosted.
    let demanded = config
        .players
        .iter()
        .flat_map(|p| p.chain.iter())
        .chain(config.events.iter().flat_map(|e| match &e.kind {
            EventKindConfig::PlayerJoin { chain, .. } => chain.as_slice(),
            EventKindConfig::VmFailure { .. } => &[],
        }));
    for (player, name) in demanded.enumerate() {
        let t = type_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ModelError::UnknownVnfType(name.clone()))?;
        if !vms.iter().any(|vm| vm.vnf_type == t) {
            return Err(ModelError::UnhostedType {
                player,
                vnf: name.clone(),
            });
        }
    }

    let mut rng = stream(seed, Stream::Latency);
    let v = vms.len();
    let mut cross = vec![0.0; v * v];
    for a in 0..v {
        for b in (a + 1)..v {
            if vms[a].server != vms[b].server {
                let l = rule.cross_lo + (rule.cross_hi - rule.cross_lo) * rng.random::<f64>();
                cross[a * v + b] = l;
                cross[b * v + a] = l;
            }
        }
    }

    let server_names = config.servers.iter().map(|s| s.name.clone()).collect();
    let vm_server: Vec<usize> = vms.iter().map(|vm| vm.server).collect();
    SystemTopology::from_parts(server_names, vnf_types, vms, config.routers.clone(), |a, b| match (a, b) {
        (Node::Router(_), Node::Router(_)) => rule.router,
        (Node::Router(_), Node::Vm(_)) | (Node::Vm(_), Node::Router(_)) => rule.router,
        (Node::Vm(x), Node::Vm(y)) if vm_server[x] == vm_server[y] => rule.intra,
        (Node::Vm(x), Node::Vm(y)) => cross[x * v + y],
    })
}

fn check_unique(names: &[String]) -> Result<(), ModelError> {
    for (k, name) in names.iter().enumerate() {
        if names[..k].contains(name) {
            return Err(ModelError::DuplicateName(name.clone()));
        }
    }
    Ok(())
}

/// Resolves one player description against a topology.
pub fn resolve_player(
    id: usize,
    rate: f64,
    chain: &[String],
    ingress: &str,
    egress: &str,
    failure_cost: f64,
    topology: &SystemTopology,
) -> Result<PlayerSpec, ModelError> {
    let chain = chain
        .iter()
        .map(|name| topology.vnf_id(name).ok_or_else(|| ModelError::UnknownVnfType(name.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let ingress = topology
        .router_id(ingress)
        .ok_or_else(|| ModelError::UnknownRouter(ingress.to_string()))?;
    let egress = topology
        .router_id(egress)
        .ok_or_else(|| ModelError::UnknownRouter(egress.to_string()))?;
    Ok(PlayerSpec {
        id,
        rate,
        chain,
        ingress,
        egress,
        failure_cost,
    })
}

/// Expands the player list of `config` (honouring `count`) into dense ids.
pub fn build_players(config: &ScenarioConfig, topology: &SystemTopology) -> Result<Vec<PlayerSpec>, ModelError> {
    let mut players = Vec::new();
    for pc in &config.players {
        for _ in 0..pc.count {
            let id = players.len();
            players.push(resolve_player(
                id,
                pc.rate,
                &pc.chain,
                &pc.ingress,
                &pc.egress,
                pc.failure_cost,
                topology,
            )?);
        }
    }
    Ok(players)
}

/// All strategies of `player`: the Cartesian product over chain positions of
/// the live VMs hosting each type, in lexicographic order of VM ids.
pub fn strategy_space(player: &PlayerSpec, topology: &SystemTopology) -> Vec<Strategy> {
    let hosts: Vec<Vec<usize>> = player.chain.iter().map(|&t| topology.hosts(t)).collect();
    if hosts.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let total: usize = hosts.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; hosts.len()];
    loop {
        out.push(Strategy(digits.iter().zip(&hosts).map(|(&d, h)| h[d]).collect()));
        // odometer, last position fastest
        let mut pos = hosts.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < hosts[pos].len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// A fully validated game instance: topology, players, parameters and the
/// materialized strategy spaces.
#[derive(Debug, Clone)]
pub struct Game {
    topology: SystemTopology,
    players: Vec<PlayerSpec>,
    params: GameParams,
    spaces: Vec<Vec<Strategy>>,
    /// Latency cost of every strategy, `[player][strategy]`.
    latencies: Vec<Vec<f64>>,
}

impl Game {
    pub fn new(topology: SystemTopology, players: Vec<PlayerSpec>, params: GameParams) -> Result<Self, ModelError> {
        params.validate()?;
        let mut spaces = Vec::with_capacity(players.len());
        let mut latencies = Vec::with_capacity(players.len());
        for (k, p) in players.iter().enumerate() {
            validate_player(k, p, &topology)?;
            let space = strategy_space(p, &topology);
            latencies.push(space.iter().map(|s| strategy_latency(p, s, &topology)).collect());
            spaces.push(space);
        }
        Ok(Self {
            topology,
            players,
            params,
            spaces,
            latencies,
        })
    }

    /// Builds topology (latencies sampled from `seed`), players and params.
    pub fn from_config(config: &ScenarioConfig, seed: u64) -> Result<Self, ModelError> {
        let topology = build_topology(config, seed)?;
        let players = build_players(config, &topology)?;
        Self::new(topology, players, config.game.into())
    }

    pub fn topology(&self) -> &SystemTopology {
        &self.topology
    }

    pub fn players(&self) -> &[PlayerSpec] {
        &self.players
    }

    pub fn player(&self, i: usize) -> &PlayerSpec {
        &self.players[i]
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn with_params(&self, params: GameParams) -> Result<Self, ModelError> {
        params.validate()?;
        let mut next = self.clone();
        next.params = params;
        Ok(next)
    }

    pub fn space(&self, i: usize) -> &[Strategy] {
        &self.spaces[i]
    }

    pub fn space_len(&self, i: usize) -> usize {
        self.spaces[i].len()
    }

    /// Latency cost of strategy `s` of player `i`.
    pub fn strategy_latency(&self, i: usize, s: usize) -> f64 {
        self.latencies[i][s]
    }

    pub fn index_of(&self, i: usize, strategy: &Strategy) -> Option<usize> {
        self.spaces[i].binary_search(strategy).ok()
    }

    /// `|W| = prod_i |W_i|`, saturating.
    pub fn joint_space_size(&self) -> u128 {
        self.spaces
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    pub fn max_chain_len(&self) -> usize {
        self.players.iter().map(PlayerSpec::chain_len).max().unwrap_or(0)
    }

    pub fn profile_from_choices(&self, choices: &[usize]) -> StrategyProfile {
        StrategyProfile(
            choices
                .iter()
                .enumerate()
                .map(|(i, &s)| self.spaces[i][s].clone())
                .collect(),
        )
    }

    pub fn choices_of(&self, profile: &StrategyProfile) -> Result<Vec<usize>, ModelError> {
        if profile.players() != self.players.len() {
            return Err(ModelError::ProfileSize {
                expected: self.players.len(),
                got: profile.players(),
            });
        }
        profile
            .0
            .iter()
            .enumerate()
            .map(|(i, s)| {
                self.index_of(i, s).ok_or_else(|| ModelError::InvalidStrategy {
                    player: i,
                    strategy: s.0.clone(),
                })
            })
            .collect()
    }

    /// Uniformly random strategy index for every player.
    pub fn random_choices<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        self.spaces.iter().map(|s| rng.random_range(0..s.len())).collect()
    }

    /// Same game with `vm` removed from the live set.
    pub fn with_failed_vm(&self, vm: usize) -> Result<Self, ModelError> {
        let mut topology = self.topology.clone();
        topology.fail_vm(vm)?;
        Self::new(topology, self.players.clone(), self.params)
    }

    /// Same game with one more player; its id is reassigned to the next dense id.
    pub fn with_player(&self, mut player: PlayerSpec) -> Result<Self, ModelError> {
        player.id = self.players.len();
        let mut players = self.players.clone();
        players.push(player);
        Self::new(self.topology.clone(), players, self.params)
    }
}

fn validate_player(k: usize, p: &PlayerSpec, topology: &SystemTopology) -> Result<(), ModelError> {
    let bad = |reason: String| ModelError::InvalidPlayer { player: k, reason };
    if p.id != k {
        return Err(bad(format!("id {} is not dense (expected {k})", p.id)));
    }
    if !(p.rate.is_finite() && p.rate > 0.0) {
        return Err(bad(format!("rate must be positive, got {}", p.rate)));
    }
    if !(p.failure_cost.is_finite() && p.failure_cost > 0.0) {
        return Err(bad(format!("failure cost must be positive, got {}", p.failure_cost)));
    }
    if p.chain.is_empty() {
        return Err(bad("empty service chain".into()));
    }
    for (j, &t) in p.chain.iter().enumerate() {
        if t >= topology.vnf_types().len() {
            return Err(ModelError::UnknownVnfType(t.to_string()));
        }
        if p.chain[..j].contains(&t) {
            return Err(bad(format!(
                "VNF type {:?} appears twice in the chain",
                topology.vnf_types()[t].name
            )));
        }
        if topology.hosts(t).is_empty() {
            return Err(ModelError::UnhostedType {
                player: k,
                vnf: topology.vnf_types()[t].name.clone(),
            });
        }
    }
    if p.ingress >= topology.routers().len() || p.egress >= topology.routers().len() {
        return Err(bad("ingress/egress router out of range".into()));
    }
    Ok(())
}

pub(crate) fn strategy_latency(p: &PlayerSpec, s: &Strategy, topology: &SystemTopology) -> f64 {
    let vms = s.vms();
    let mut total = topology.latency(Node::Router(p.ingress), Node::Vm(vms[0]));
    for pair in vms.windows(2) {
        total += topology.latency(Node::Vm(pair[0]), Node::Vm(pair[1]));
    }
    total + topology.latency(Node::Vm(vms[vms.len() - 1]), Node::Router(p.egress))
}

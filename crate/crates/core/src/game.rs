//! Costs, potential and equilibrium checks.
//!
//! The free functions here evaluate every quantity from its definition on a
//! [`StrategyProfile`]; they are the reference path. [`LoadState`] is the
//! incremental path used by the iterative composers: it keeps per-VM traffic
//! sums so that a player's cost for any candidate strategy is O(chain length).

use serde::{Deserialize, Serialize};

use crate::model::{Game, Node, PlayerSpec, Strategy, StrategyProfile, SystemTopology};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("VM {vm} is not used by player {player}")]
    VmNotInStrategy { player: usize, vm: usize },
    #[error("profiles have different player counts ({left} vs {right})")]
    PlayerMismatch { left: usize, right: usize },
}

/// Relative tolerance used when comparing costs.
pub const COST_RTOL: f64 = 1e-9;

/// Cost components of one player.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub latency_cost: f64,
    pub congestion_cost: f64,
    pub expected_cost: f64,
}

/// Ingress leg, inter-VM legs and egress leg of a chain.
pub fn latency_cost(player: &PlayerSpec, strategy: &Strategy, topology: &SystemTopology) -> f64 {
    let vms = strategy.vms();
    let first = topology.latency(Node::Router(player.ingress), Node::Vm(vms[0]));
    let middle: f64 = vms
        .windows(2)
        .map(|w| topology.latency(Node::Vm(w[0]), Node::Vm(w[1])))
        .sum();
    let last = topology.latency(Node::Vm(vms[vms.len() - 1]), Node::Router(player.egress));
    first + middle + last
}

/// Players whose strategy uses `vm`, ascending.
pub fn sharers(vm: usize, profile: &StrategyProfile) -> Vec<usize> {
    profile
        .0
        .iter()
        .enumerate()
        .filter(|(_, s)| s.contains(vm))
        .map(|(k, _)| k)
        .collect()
}

/// Expected traffic on `vm` seen by player `i`, given that `i` survives.
pub fn workload(i: usize, vm: usize, profile: &StrategyProfile, game: &Game) -> Result<f64, GameError> {
    if !profile.strategy(i).contains(vm) {
        return Err(GameError::VmNotInStrategy { player: i, vm });
    }
    let gamma = game.params().gamma_user;
    let others: f64 = sharers(vm, profile)
        .into_iter()
        .filter(|&k| k != i)
        .map(|k| gamma * game.player(k).rate)
        .sum();
    Ok(game.player(i).rate + others)
}

pub fn congestion_cost(i: usize, profile: &StrategyProfile, game: &Game) -> f64 {
    profile
        .strategy(i)
        .vms()
        .iter()
        .map(|&vm| workload(i, vm, profile, game).expect("vm taken from the player's own strategy"))
        .sum()
}

pub fn expected_cost(i: usize, profile: &StrategyProfile, game: &Game) -> CostBreakdown {
    let p = game.params();
    let player = game.player(i);
    let latency = latency_cost(player, profile.strategy(i), game.topology());
    let congestion = congestion_cost(i, profile, game);
    let all_vms_up = p.gamma_vm.powi(player.chain_len() as i32);
    let omega = player.failure_cost;
    let expected = p.user_failure() * omega
        + p.gamma_user * (1.0 - all_vms_up) * omega
        + p.gamma_user * all_vms_up * (p.alpha * latency + congestion);
    CostBreakdown {
        latency_cost: latency,
        congestion_cost: congestion,
        expected_cost: expected,
    }
}

/// Traffic-weighted latency plus the squared expected load of every VM.
pub fn potential(profile: &StrategyProfile, game: &Game) -> f64 {
    let p = game.params();
    let latency: f64 = game
        .players()
        .iter()
        .zip(&profile.0)
        .map(|(pl, s)| pl.rate * latency_cost(pl, s, game.topology()))
        .sum();
    let congestion: f64 = game
        .topology()
        .vms()
        .iter()
        .map(|vm| {
            let load: f64 = sharers(vm.id, profile)
                .into_iter()
                .map(|k| game.player(k).rate * p.gamma_user)
                .sum();
            load * load
        })
        .sum();
    2.0 * p.alpha * p.gamma_user * latency + congestion
}

/// The factor `2 lambda_i gamma_vm^(-F_i)` relating a unilateral change in
/// player `i`'s cost to the change in potential.
pub fn potential_weight(player: &PlayerSpec, gamma_vm: f64) -> f64 {
    2.0 * player.rate * gamma_vm.powi(-(player.chain_len() as i32))
}

/// Number of players whose strategies differ.
pub fn hamming(a: &StrategyProfile, b: &StrategyProfile) -> Result<usize, GameError> {
    if a.players() != b.players() {
        return Err(GameError::PlayerMismatch {
            left: a.players(),
            right: b.players(),
        });
    }
    Ok(a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count())
}

pub fn weighted_average_cost(profile: &StrategyProfile, game: &Game) -> f64 {
    let n = game.num_players() as f64;
    (0..game.num_players())
        .map(|i| game.player(i).rate * expected_cost(i, profile, game).expected_cost)
        .sum::<f64>()
        / n
}

#[derive(Debug, Clone, PartialEq)]
pub enum NashCheck {
    Equilibrium,
    /// First strictly improving unilateral deviation, in player then
    /// canonical strategy order.
    Deviation {
        player: usize,
        strategy: Strategy,
        current_cost: f64,
        improved_cost: f64,
    },
}

impl NashCheck {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, NashCheck::Equilibrium)
    }
}

pub(crate) fn strictly_less(candidate: f64, current: f64) -> bool {
    candidate < current - COST_RTOL * current.abs().max(1.0)
}

pub fn is_nash_equilibrium(profile: &StrategyProfile, game: &Game) -> NashCheck {
    for i in 0..game.num_players() {
        let current = expected_cost(i, profile, game).expected_cost;
        for s in game.space(i) {
            if s == profile.strategy(i) {
                continue;
            }
            let deviated = profile.with_strategy(i, s.clone());
            let c = expected_cost(i, &deviated, game).expected_cost;
            if strictly_less(c, current) {
                return NashCheck::Deviation {
                    player: i,
                    strategy: s.clone(),
                    current_cost: current,
                    improved_cost: c,
                };
            }
        }
    }
    NashCheck::Equilibrium
}

/// Per-VM traffic sums for a profile given as strategy indices.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadState {
    /// Sum of raw rates of the players using each VM.
    rate_on_vm: Vec<f64>,
}

impl LoadState {
    pub fn new(game: &Game, choices: &[usize]) -> Self {
        let mut state = Self {
            rate_on_vm: vec![0.0; game.topology().vms().len()],
        };
        for (i, &s) in choices.iter().enumerate() {
            state.add(game, i, s);
        }
        state
    }

    pub fn add(&mut self, game: &Game, i: usize, s: usize) {
        let rate = game.player(i).rate;
        for &vm in game.space(i)[s].vms() {
            self.rate_on_vm[vm] += rate;
        }
    }

    pub fn remove(&mut self, game: &Game, i: usize, s: usize) {
        let rate = game.player(i).rate;
        for &vm in game.space(i)[s].vms() {
            self.rate_on_vm[vm] -= rate;
        }
    }

    /// Moves player `i` from strategy `from` to `to`.
    pub fn apply(&mut self, game: &Game, i: usize, from: usize, to: usize) {
        if from != to {
            self.remove(game, i, from);
            self.add(game, i, to);
        }
    }

    pub fn rate_on_vm(&self, vm: usize) -> f64 {
        self.rate_on_vm[vm]
    }

    /// `alpha * latency + congestion` for player `i` if it switched from its
    /// current strategy `current` to `candidate`.
    pub fn inner_cost(&self, game: &Game, i: usize, current: usize, candidate: usize) -> f64 {
        let p = game.params();
        let rate = game.player(i).rate;
        let own = game.space(i)[current].vms();
        let congestion: f64 = game.space(i)[candidate]
            .vms()
            .iter()
            .map(|&vm| {
                let mut others = self.rate_on_vm[vm];
                if own.contains(&vm) {
                    others -= rate;
                }
                rate + p.gamma_user * others
            })
            .sum();
        p.alpha * game.strategy_latency(i, candidate) + congestion
    }

    /// Expected cost of player `i` after switching to `candidate`.
    pub fn cost(&self, game: &Game, i: usize, current: usize, candidate: usize) -> f64 {
        let p = game.params();
        let player = game.player(i);
        let up = p.gamma_user * p.gamma_vm.powi(player.chain_len() as i32);
        player.failure_cost * (1.0 - up) + up * self.inner_cost(game, i, current, candidate)
    }

    /// Player `i`'s share of the potential for `candidate`, up to a term that
    /// does not depend on `i`'s strategy:
    /// `2 lambda_i gamma_user (alpha L + C)`. Equal to
    /// `potential_weight * cost` minus a constant, so differences between
    /// candidates equal potential differences exactly.
    pub fn energy(&self, game: &Game, i: usize, current: usize, candidate: usize) -> f64 {
        let p = game.params();
        2.0 * game.player(i).rate * p.gamma_user * self.inner_cost(game, i, current, candidate)
    }

    /// Potential of the profile `choices`, which must be the one this state
    /// was built from.
    pub fn potential(&self, game: &Game, choices: &[usize]) -> f64 {
        let p = game.params();
        let latency: f64 = choices
            .iter()
            .enumerate()
            .map(|(i, &s)| game.player(i).rate * game.strategy_latency(i, s))
            .sum();
        let congestion: f64 = self
            .rate_on_vm
            .iter()
            .map(|r| {
                let load = r * p.gamma_user;
                load * load
            })
            .sum();
        2.0 * p.alpha * p.gamma_user * latency + congestion
    }

    pub fn weighted_average_cost(&self, game: &Game, choices: &[usize]) -> f64 {
        let total: f64 = choices
            .iter()
            .enumerate()
            .map(|(i, &s)| game.player(i).rate * self.cost(game, i, s, s))
            .sum();
        total / choices.len() as f64
    }
}

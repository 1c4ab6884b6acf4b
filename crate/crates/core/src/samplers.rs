//! MA-SCCA, MH-SCCA and the USCS baseline as single-step kernels.
//!
//! Kernels work on a [`ChainState`] (strategy indices plus per-VM loads) and
//! only ever read the chosen player's local quantities: its own candidate
//! costs given everyone else's current choices.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::game::{self, LoadState};
use crate::model::{Game, Strategy, StrategyProfile};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error("no active players to select from")]
    NoPlayers,
    #[error("selection rate must be positive and finite, got {0}")]
    InvalidRate(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum SelectionMode {
    #[default]
    UniformDraw,
    /// Every player runs an exponential countdown of rate `rate`; the first
    /// to expire moves.
    ExponentialRace { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub player: usize,
    /// Simulated time until the winning countdown fired (race mode only).
    pub elapsed: Option<f64>,
}

pub fn select_player<R: Rng + ?Sized>(
    active: &[usize],
    mode: SelectionMode,
    rng: &mut R,
) -> Result<Selection, SamplerError> {
    if active.is_empty() {
        return Err(SamplerError::NoPlayers);
    }
    match mode {
        SelectionMode::UniformDraw => Ok(Selection {
            player: active[rng.random_range(0..active.len())],
            elapsed: None,
        }),
        SelectionMode::ExponentialRace { rate } => {
            let clock = Exp::new(rate)
                .ok()
                .filter(|_| rate.is_finite() && rate > 0.0)
                .ok_or(SamplerError::InvalidRate(rate))?;
            let mut best = (active[0], f64::INFINITY);
            for &p in active {
                let t = clock.sample(rng);
                if t < best.1 {
                    best = (p, t);
                }
            }
            Ok(Selection {
                player: best.0,
                elapsed: Some(best.1),
            })
        }
    }
}

/// Current strategy indices together with the matching load sums.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    choices: Vec<usize>,
    loads: LoadState,
}

impl ChainState {
    pub fn new(game: &Game, choices: Vec<usize>) -> Self {
        let loads = LoadState::new(game, &choices);
        Self { choices, loads }
    }

    pub fn from_profile(game: &Game, profile: &StrategyProfile) -> Result<Self, crate::model::ModelError> {
        Ok(Self::new(game, game.choices_of(profile)?))
    }

    pub fn choices(&self) -> &[usize] {
        &self.choices
    }

    pub fn loads(&self) -> &LoadState {
        &self.loads
    }

    pub fn profile(&self, game: &Game) -> StrategyProfile {
        game.profile_from_choices(&self.choices)
    }

    pub fn set(&mut self, game: &Game, i: usize, s: usize) {
        self.loads.apply(game, i, self.choices[i], s);
        self.choices[i] = s;
    }

    pub fn potential(&self, game: &Game) -> f64 {
        self.loads.potential(game, &self.choices)
    }

    pub fn weighted_average_cost(&self, game: &Game) -> f64 {
        self.loads.weighted_average_cost(game, &self.choices)
    }

    /// Player `i`'s local energy for every candidate strategy.
    pub fn energies(&self, game: &Game, i: usize) -> Vec<f64> {
        let cur = self.choices[i];
        (0..game.space_len(i))
            .map(|s| self.loads.energy(game, i, cur, s))
            .collect()
    }

    pub fn cost(&self, game: &Game, i: usize, candidate: usize) -> f64 {
        self.loads.cost(game, i, self.choices[i], candidate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub chosen_player: usize,
    pub old_index: usize,
    pub new_index: usize,
    pub old_strategy: Strategy,
    pub new_strategy: Strategy,
    /// Whether the proposal was taken (always true for MA; for USCS, whether
    /// the player moved).
    pub accepted: bool,
    pub potential_after: f64,
    /// Race-mode selection time, if any.
    pub elapsed: Option<f64>,
}

impl StepOutcome {
    pub fn changed(&self) -> bool {
        self.old_index != self.new_index
    }
}

/// Softmax of `-beta * x`, computed with max-subtraction.
pub fn gibbs_weights(beta: f64, energies: &[f64]) -> Vec<f64> {
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut w: Vec<f64> = energies.iter().map(|&e| (-beta * (e - min)).exp()).collect();
    let z: f64 = w.iter().sum();
    for x in &mut w {
        *x /= z;
    }
    w
}

/// Player `i`'s MA transition distribution over its strategy space, from a
/// chain state.
pub fn ma_distribution(game: &Game, state: &ChainState, i: usize) -> Vec<f64> {
    gibbs_weights(game.params().beta, &state.energies(game, i))
}

/// Player `i`'s MA transition distribution at `profile`.
pub fn ma_transition_distribution(i: usize, profile: &StrategyProfile, game: &Game) -> Vec<f64> {
    let state = ChainState::from_profile(game, profile).expect("profile drawn from the game's strategy spaces");
    ma_distribution(game, &state, i)
}

/// MH acceptance probability for player `i` moving to `candidate` at `profile`,
/// evaluated from the player's literal expected costs.
pub fn mh_acceptance(i: usize, profile: &StrategyProfile, candidate: &Strategy, game: &Game) -> f64 {
    let p = game.params();
    let weight = game::potential_weight(game.player(i), p.gamma_vm);
    let now = game::expected_cost(i, profile, game).expected_cost;
    let then = game::expected_cost(i, &profile.with_strategy(i, candidate.clone()), game).expected_cost;
    (-p.beta * weight * (then - now)).exp().min(1.0)
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // u landed in the rounding slack past the last cumulative sum
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

fn outcome(game: &Game, state: &ChainState, sel: Selection, old: usize, accepted: bool) -> StepOutcome {
    let i = sel.player;
    let new = state.choices[i];
    StepOutcome {
        chosen_player: i,
        old_index: old,
        new_index: new,
        old_strategy: game.space(i)[old].clone(),
        new_strategy: game.space(i)[new].clone(),
        accepted,
        potential_after: state.potential(game),
        elapsed: sel.elapsed,
    }
}

/// One MA-SCCA iteration: select a player, resample its strategy from the
/// local Gibbs distribution (self-transitions allowed).
pub fn ma_step<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    game: &Game,
    state: &mut ChainState,
    active: &[usize],
    mode: SelectionMode,
    selection_rng: &mut R1,
    proposal_rng: &mut R2,
) -> Result<StepOutcome, SamplerError> {
    let sel = select_player(active, mode, selection_rng)?;
    let i = sel.player;
    let old = state.choices[i];
    let probs = ma_distribution(game, state, i);
    let next = sample_index(&probs, proposal_rng);
    state.set(game, i, next);
    Ok(outcome(game, state, sel, old, true))
}

/// One MH-SCCA iteration: uniform proposal over the chosen player's space,
/// Metropolis acceptance on the local energy difference.
pub fn mh_step<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    game: &Game,
    state: &mut ChainState,
    active: &[usize],
    mode: SelectionMode,
    selection_rng: &mut R1,
    proposal_rng: &mut R2,
) -> Result<StepOutcome, SamplerError> {
    let sel = select_player(active, mode, selection_rng)?;
    let i = sel.player;
    let old = state.choices[i];
    let proposal = proposal_rng.random_range(0..game.space_len(i));
    let delta = state.loads.energy(game, i, old, proposal) - state.loads.energy(game, i, old, old);
    let accept = if delta <= 0.0 {
        true
    } else {
        proposal_rng.random::<f64>() < (-game.params().beta * delta).exp()
    };
    if accept {
        state.set(game, i, proposal);
    }
    Ok(outcome(game, state, sel, old, accept))
}

/// Canonical-first minimizer of player `i`'s cost given the others' choices.
pub fn best_response(game: &Game, state: &ChainState, i: usize) -> usize {
    let cur = state.choices[i];
    let mut best = 0;
    let mut best_cost = f64::INFINITY;
    for s in 0..game.space_len(i) {
        let c = state.loads.inner_cost(game, i, cur, s);
        if c < best_cost {
            best = s;
            best_cost = c;
        }
    }
    best
}

/// Round-robin cursor for USCS.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoundRobin {
    next: usize,
}

impl RoundRobin {
    pub fn next_player(&mut self, active: &[usize]) -> Result<usize, SamplerError> {
        if active.is_empty() {
            return Err(SamplerError::NoPlayers);
        }
        let p = active[self.next % active.len()];
        self.next = (self.next + 1) % active.len();
        Ok(p)
    }
}

/// One USCS iteration: the next player in turn switches to its best response
/// when that strictly lowers its cost.
pub fn uscs_step(
    game: &Game,
    state: &mut ChainState,
    active: &[usize],
    order: &mut RoundRobin,
) -> Result<StepOutcome, SamplerError> {
    let i = order.next_player(active)?;
    let old = state.choices[i];
    let p = game.params();
    let up = p.gamma_user * p.gamma_vm.powi(game.player(i).chain_len() as i32);
    let mut moved = false;
    if up > 0.0 {
        let br = best_response(game, state, i);
        let now = state.loads.inner_cost(game, i, old, old);
        let then = state.loads.inner_cost(game, i, old, br);
        if game::strictly_less(then, now) {
            state.set(game, i, br);
            moved = true;
        }
    }
    Ok(outcome(
        game,
        state,
        Selection {
            player: i,
            elapsed: None,
        },
        old,
        moved,
    ))
}

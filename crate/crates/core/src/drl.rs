//! DRL-SCCA: a one-hidden-layer policy network over whole profiles that
//! outputs a distribution over `(player, strategy)` update actions, trained
//! with REINFORCE on potential-difference rewards.

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::game::{self, LoadState};
use crate::model::{Game, StrategyProfile};
use crate::rng::SimRng;
use crate::samplers::ChainState;

#[derive(Debug, thiserror::Error)]
pub enum DrlError {
    #[error("input has length {got}, network expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("profiles differ in {0} players; a reward needs at most one change")]
    NotUnilateral(usize),
    #[error("profiles differ at player {found}, not at player {expected}")]
    WrongPlayer { expected: usize, found: usize },
    #[error("training diverged at episode {episode}")]
    Diverged { episode: usize },
    #[error("invalid training setting: {0}")]
    InvalidConfig(String),
    #[error("invalid network file: {0}")]
    BadFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One-hot encoding of every `(player, chain position)` choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateEncoder {
    /// Start of each `(i, j)` block, flattened player-major.
    offsets: Vec<Vec<usize>>,
    /// Live hosts of each block's VNF type, ascending.
    hosts: Vec<Vec<Vec<usize>>>,
    len: usize,
}

impl StateEncoder {
    pub fn new(game: &Game) -> Self {
        let mut len = 0;
        let mut offsets = Vec::new();
        let mut hosts = Vec::new();
        for p in game.players() {
            let mut off = Vec::new();
            let mut hs = Vec::new();
            for &t in &p.chain {
                let h = game.topology().hosts(t);
                off.push(len);
                len += h.len();
                hs.push(h);
            }
            offsets.push(off);
            hosts.push(hs);
        }
        Self { offsets, hosts, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn encode(&self, game: &Game, choices: &[usize]) -> Vec<f64> {
        let mut x = vec![0.0; self.len];
        for (i, &s) in choices.iter().enumerate() {
            for (j, &vm) in game.space(i)[s].vms().iter().enumerate() {
                let k = self.hosts[i][j].binary_search(&vm).expect("strategy uses a live host");
                x[self.offsets[i][j] + k] = 1.0;
            }
        }
        x
    }

    pub fn decode(&self, game: &Game, x: &[f64]) -> Option<Vec<usize>> {
        (0..self.offsets.len())
            .map(|i| {
                let vms: Option<Vec<usize>> = (0..self.offsets[i].len())
                    .map(|j| {
                        let start = self.offsets[i][j];
                        let block = &x[start..start + self.hosts[i][j].len()];
                        let k = block.iter().position(|&v| v == 1.0)?;
                        Some(self.hosts[i][j][k])
                    })
                    .collect();
                game.index_of(i, &crate::model::Strategy(vms?))
            })
            .collect()
    }
}

/// Flat numbering of all `(player, strategy)` actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionIndex {
    offsets: Vec<usize>,
    len: usize,
}

impl ActionIndex {
    pub fn new(game: &Game) -> Self {
        let mut offsets = Vec::with_capacity(game.num_players());
        let mut len = 0;
        for i in 0..game.num_players() {
            offsets.push(len);
            len += game.space_len(i);
        }
        Self { offsets, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn encode(&self, player: usize, strategy: usize) -> usize {
        self.offsets[player] + strategy
    }

    pub fn decode(&self, action: usize) -> (usize, usize) {
        let player = self.offsets.partition_point(|&o| o <= action) - 1;
        (player, action - self.offsets[player])
    }
}

/// Parameters of `softmax(W2 relu(W1 x + b1) + b2)`, stored flat as
/// `W1 | b1 | W2 | b2` with row-major weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyNet {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
    pub seed: u64,
    pub params: Vec<f64>,
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct Forward {
    pub pre: Vec<f64>,
    pub hidden: Vec<f64>,
    pub probs: Vec<f64>,
}

const MAGIC: &[u8; 8] = b"SCCNET01";

impl PolicyNet {
    /// He-uniform hidden layer, small output layer, zero biases.
    pub fn new(input: usize, hidden: usize, output: usize, seed: u64) -> Self {
        let mut rng = SimRng::seed_from_u64(seed);
        let mut net = Self {
            input,
            hidden,
            output,
            seed,
            params: vec![0.0; hidden * input + hidden + output * hidden + output],
        };
        let a1 = (6.0 / input.max(1) as f64).sqrt();
        let a2 = (1.0 / hidden.max(1) as f64).sqrt() * 0.1;
        let (w1, rest) = net.params.split_at_mut(hidden * input);
        for w in w1 {
            *w = rng.random_range(-a1..=a1);
        }
        let w2 = &mut rest[hidden..hidden + output * hidden];
        for w in w2 {
            *w = rng.random_range(-a2..=a2);
        }
        net
    }

    pub fn for_game(game: &Game, hidden: usize, seed: u64) -> Self {
        Self::new(StateEncoder::new(game).len(), hidden, ActionIndex::new(game).len(), seed)
    }

    fn split(&self) -> (&[f64], &[f64], &[f64], &[f64]) {
        let (w1, rest) = self.params.split_at(self.hidden * self.input);
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, b2) = rest.split_at(self.output * self.hidden);
        (w1, b1, w2, b2)
    }

    /// Zeroes the output layer, which makes every output uniform.
    pub fn zero_output_layer(&mut self) {
        let start = self.hidden * self.input + self.hidden;
        for p in &mut self.params[start..] {
            *p = 0.0;
        }
    }

    pub fn forward(&self, x: &[f64]) -> Result<Forward, DrlError> {
        if x.len() != self.input {
            return Err(DrlError::DimensionMismatch {
                expected: self.input,
                got: x.len(),
            });
        }
        let (w1, b1, w2, b2) = self.split();
        let mut pre = b1.to_vec();
        for (k, &xk) in x.iter().enumerate() {
            if xk == 0.0 {
                continue;
            }
            for (h, p) in pre.iter_mut().enumerate() {
                *p += w1[h * self.input + k] * xk;
            }
        }
        let hidden: Vec<f64> = pre.iter().map(|&v| v.max(0.0)).collect();
        let mut logits = b2.to_vec();
        for (o, l) in logits.iter_mut().enumerate() {
            let row = &w2[o * self.hidden..(o + 1) * self.hidden];
            *l += row.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>();
        }
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= z;
        }
        Ok(Forward { pre, hidden, probs })
    }

    pub fn policy(&self, x: &[f64]) -> Result<Vec<f64>, DrlError> {
        Ok(self.forward(x)?.probs)
    }

    /// Adds `scale * d log pi(action | x) / d theta` into `grad`.
    pub fn accumulate_log_prob_grad(&self, x: &[f64], fwd: &Forward, action: usize, scale: f64, grad: &mut [f64]) {
        let (_, _, w2, _) = self.split();
        let (i, h, o) = (self.input, self.hidden, self.output);
        let mut dlogits: Vec<f64> = fwd.probs.iter().map(|p| -p * scale).collect();
        dlogits[action] += scale;
        let (g1, rest) = grad.split_at_mut(h * i);
        let (gb1, rest) = rest.split_at_mut(h);
        let (g2, gb2) = rest.split_at_mut(o * h);
        let mut dh = vec![0.0; h];
        for (out, &d) in dlogits.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            gb2[out] += d;
            let row = &w2[out * h..(out + 1) * h];
            let grow = &mut g2[out * h..(out + 1) * h];
            for k in 0..h {
                grow[k] += d * fwd.hidden[k];
                dh[k] += d * row[k];
            }
        }
        for k in 0..h {
            if fwd.pre[k] <= 0.0 {
                continue;
            }
            gb1[k] += dh[k];
            let row = &mut g1[k * i..(k + 1) * i];
            for (j, &xj) in x.iter().enumerate() {
                if xj != 0.0 {
                    row[j] += dh[k] * xj;
                }
            }
        }
    }

    pub fn log_prob_grad(&self, x: &[f64], action: usize) -> Result<Vec<f64>, DrlError> {
        let fwd = self.forward(x)?;
        let mut g = vec![0.0; self.params.len()];
        self.accumulate_log_prob_grad(x, &fwd, action, 1.0, &mut g);
        Ok(g)
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<(), DrlError> {
        w.write_all(MAGIC)?;
        for d in [self.input, self.hidden, self.output] {
            w.write_all(&(d as u64).to_le_bytes())?;
        }
        w.write_all(&self.seed.to_le_bytes())?;
        for p in &self.params {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self, DrlError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(DrlError::BadFile("unrecognized header".into()));
        }
        let mut word = [0u8; 8];
        let mut next = |r: &mut dyn Read| -> Result<u64, DrlError> {
            r.read_exact(&mut word)?;
            Ok(u64::from_le_bytes(word))
        };
        let input = next(&mut r)? as usize;
        let hidden = next(&mut r)? as usize;
        let output = next(&mut r)? as usize;
        let seed = next(&mut r)?;
        let count = hidden
            .checked_mul(input)
            .and_then(|a| a.checked_add(hidden))
            .and_then(|a| output.checked_mul(hidden).and_then(|b| a.checked_add(b)))
            .and_then(|a| a.checked_add(output))
            .ok_or_else(|| DrlError::BadFile("dimensions overflow".into()))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != count * 8 {
            return Err(DrlError::BadFile(format!(
                "expected {} parameter bytes, found {}",
                count * 8,
                bytes.len()
            )));
        }
        let params = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Ok(Self {
            input,
            hidden,
            output,
            seed,
            params,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DrlError> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DrlError> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

/// `Phi(w) - Phi(w')` for profiles differing at most at player `i`, from
/// player `i`'s own cost change.
pub fn reward(w: &StrategyProfile, w2: &StrategyProfile, i: usize, game: &Game) -> Result<f64, DrlError> {
    let d = game::hamming(w, w2).map_err(|_| DrlError::NotUnilateral(usize::MAX))?;
    if d > 1 {
        return Err(DrlError::NotUnilateral(d));
    }
    if d == 1 && w.strategy(i) == w2.strategy(i) {
        let found = (0..w.players()).find(|&k| w.strategy(k) != w2.strategy(k)).unwrap_or(i);
        return Err(DrlError::WrongPlayer { expected: i, found });
    }
    if d == 0 {
        return Ok(0.0);
    }
    let p = game.params();
    let weight = game::potential_weight(game.player(i), p.gamma_vm);
    if weight.is_finite() {
        Ok(weight * (game::expected_cost(i, w, game).expected_cost - game::expected_cost(i, w2, game).expected_cost))
    } else {
        // every VM fails surely: costs are flat, use the energy form
        let a = game.choices_of(w).map_err(|e| DrlError::InvalidConfig(e.to_string()))?;
        let b = game.choices_of(w2).map_err(|e| DrlError::InvalidConfig(e.to_string()))?;
        let loads = LoadState::new(game, &a);
        Ok(loads.energy(game, i, a[i], a[i]) - loads.energy(game, i, a[i], b[i]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub episodes: usize,
    /// Actions per episode; `None` means 20 per player.
    pub horizon: Option<usize>,
    pub lr: f64,
    pub discount: f64,
    /// Decay of the exponential moving-average baseline.
    pub baseline_decay: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            episodes: 2000,
            horizon: None,
            lr: 1e-4,
            discount: 0.99,
            baseline_decay: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean potential over each episode's visited states.
    pub curve: Vec<f64>,
}

/// Adam moment estimates for gradient ascent.
#[derive(Debug, Clone)]
struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn ascend(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let c1 = 1.0 - Self::B1.powi(self.t);
        let c2 = 1.0 - Self::B2.powi(self.t);
        for (k, p) in params.iter_mut().enumerate() {
            let g = grad[k];
            self.m[k] = Self::B1 * self.m[k] + (1.0 - Self::B1) * g;
            self.v[k] = Self::B2 * self.v[k] + (1.0 - Self::B2) * g * g;
            *p += lr * (self.m[k] / c1) / ((self.v[k] / c2).sqrt() + Self::EPS);
        }
    }
}

fn sample<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    probs.len() - 1
}

/// REINFORCE with a per-step moving-average baseline; each episode's
/// advantages are rescaled to unit RMS before the Adam step.
pub fn train<R: Rng + ?Sized>(net: &mut PolicyNet, game: &Game, config: &TrainConfig, rng: &mut R) -> Result<TrainReport, DrlError> {
    let encoder = StateEncoder::new(game);
    let actions = ActionIndex::new(game);
    if net.input != encoder.len() || net.output != actions.len() {
        return Err(DrlError::DimensionMismatch {
            expected: net.input,
            got: encoder.len(),
        });
    }
    let horizon = config.horizon.unwrap_or(20 * game.num_players());
    if horizon == 0 || config.lr.is_nan() || config.lr < 0.0 || !(0.0..=1.0).contains(&config.discount) {
        return Err(DrlError::InvalidConfig(format!(
            "horizon {horizon}, lr {}, discount {}",
            config.lr, config.discount
        )));
    }
    let mut adam = Adam::new(net.params.len());
    let mut baseline: Vec<Option<f64>> = vec![None; horizon];
    let mut curve = Vec::with_capacity(config.episodes);
    let mut grad = vec![0.0; net.params.len()];
    for episode in 0..config.episodes {
        let mut state = ChainState::new(game, game.random_choices(rng));
        let mut phi_sum = state.potential(game);
        let mut xs = Vec::with_capacity(horizon);
        let mut taken = Vec::with_capacity(horizon);
        let mut rewards = Vec::with_capacity(horizon);
        let mut fwds = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            let x = encoder.encode(game, state.choices());
            let fwd = net.forward(&x)?;
            let a = sample(&fwd.probs, rng);
            let (i, s) = actions.decode(a);
            let cur = state.choices()[i];
            let r = state.loads().energy(game, i, cur, cur) - state.loads().energy(game, i, cur, s);
            state.set(game, i, s);
            phi_sum += state.potential(game);
            xs.push(x);
            taken.push(a);
            rewards.push(r);
            fwds.push(fwd);
        }
        curve.push(phi_sum / (horizon + 1) as f64);

        let mut g = 0.0;
        let mut returns = vec![0.0; horizon];
        for t in (0..horizon).rev() {
            g = rewards[t] + config.discount * g;
            returns[t] = g;
        }
        grad.iter_mut().for_each(|v| *v = 0.0);
        let adv: Vec<f64> = (0..horizon).map(|t| returns[t] - baseline[t].unwrap_or(returns[t])).collect();
        // rescale to unit RMS so the step size does not depend on the
        // instance's potential scale
        let rms = (adv.iter().map(|a| a * a).sum::<f64>() / horizon as f64).sqrt();
        let scale = if rms > 0.0 { 1.0 / rms } else { 1.0 };
        for t in 0..horizon {
            net.accumulate_log_prob_grad(&xs[t], &fwds[t], taken[t], scale * adv[t] / horizon as f64, &mut grad);
            baseline[t] = Some(match baseline[t] {
                None => returns[t],
                Some(old) => config.baseline_decay * old + (1.0 - config.baseline_decay) * returns[t],
            });
        }
        if !grad.iter().all(|v| v.is_finite()) {
            return Err(DrlError::Diverged { episode });
        }
        if config.lr > 0.0 {
            adam.ascend(&mut net.params, &grad, config.lr);
        }
        if !net.params.iter().all(|v| v.is_finite()) {
            return Err(DrlError::Diverged { episode });
        }
    }
    Ok(TrainReport { curve })
}

/// Index of the largest probability, lowest index on ties.
pub fn greedy_action(probs: &[f64]) -> usize {
    let mut best = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = k;
        }
    }
    best
}

/// Applies the network's most likely action `iterations` times.
pub fn drl_compose(net: &PolicyNet, game: &Game, start: &[usize], iterations: usize) -> Result<Vec<usize>, DrlError> {
    let encoder = StateEncoder::new(game);
    let actions = ActionIndex::new(game);
    let mut choices = start.to_vec();
    for _ in 0..iterations {
        let probs = net.policy(&encoder.encode(game, &choices))?;
        let (i, s) = actions.decode(greedy_action(&probs));
        choices[i] = s;
    }
    Ok(choices)
}

/// One greedy action applied to `choices`; returns the acting player.
pub fn drl_step(net: &PolicyNet, game: &Game, encoder: &StateEncoder, actions: &ActionIndex, choices: &mut [usize]) -> Result<usize, DrlError> {
    let probs = net.policy(&encoder.encode(game, choices))?;
    let (i, s) = actions.decode(greedy_action(&probs));
    choices[i] = s;
    Ok(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{self, RandomShape};
    use crate::rng::{stream, Stream};
    use proptest::prelude::*;

    #[test]
    fn t1_encoding() {
        let g = fixtures::t1();
        let enc = StateEncoder::new(&g);
        assert_eq!(enc.len(), 8);
        let idx = crate::oracle::ProfileIndex::new(&g);
        let mut seen = std::collections::HashSet::new();
        for k in 0..idx.len() {
            let c = idx.decode(k);
            let x = enc.encode(&g, &c);
            assert_eq!(x.iter().filter(|&&v| v == 1.0).count(), 4);
            assert_eq!(enc.decode(&g, &x).unwrap(), c);
            assert!(seen.insert(x.iter().map(|v| *v as u8).collect::<Vec<_>>()));
        }
        // player 0 switches f2 from m1 to m2
        let a = enc.encode(&g, &[0, 0]);
        let b = enc.encode(&g, &[1, 0]);
        assert_eq!(a.iter().zip(&b).filter(|(p, q)| p != q).count(), 2);
    }

    #[test]
    fn action_index_round_trip() {
        let g = fixtures::random_instance(5, RandomShape::SMALL);
        let acts = ActionIndex::new(&g);
        let total: usize = (0..g.num_players()).map(|i| g.space_len(i)).sum();
        assert_eq!(acts.len(), total);
        for a in 0..acts.len() {
            let (i, s) = acts.decode(a);
            assert_eq!(acts.encode(i, s), a);
        }
    }

    #[test]
    fn zero_output_layer_is_uniform() {
        let mut net = PolicyNet::new(8, 16, 8, 1);
        net.zero_output_layer();
        let p = net.policy(&[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        for v in p {
            assert!((v - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn forward_checks_dimensions() {
        let net = PolicyNet::new(8, 4, 8, 1);
        assert!(matches!(net.forward(&[0.0; 3]), Err(DrlError::DimensionMismatch { expected: 8, got: 3 })));
    }

    #[test]
    fn outputs_are_distributions() {
        let mut rng = stream(0, Stream::Evaluation);
        for seed in 0..100 {
            let mut net = PolicyNet::new(12, 10, 7, seed);
            for p in &mut net.params {
                *p += rng.random_range(-3.0..3.0);
            }
            let x: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = net.policy(&x).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-6);
            assert!(p.iter().all(|&v| v >= 0.0));
        }
    }

    pub(crate) fn finite_difference_error(seed: u64) -> f64 {
        let mut rng = stream(seed, Stream::Evaluation);
        let mut net = PolicyNet::new(6, 5, 4, seed);
        for p in &mut net.params {
            *p += rng.random_range(-0.5..0.5);
        }
        let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = rng.random_range(0..4);
        let g = net.log_prob_grad(&x, a).unwrap();
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for (k, gk) in g.iter().enumerate() {
            let mut up = net.clone();
            up.params[k] += h;
            let mut dn = net.clone();
            dn.params[k] -= h;
            let fd = (up.policy(&x).unwrap()[a].ln() - dn.policy(&x).unwrap()[a].ln()) / (2.0 * h);
            let denom = gk.abs().max(fd.abs()).max(1e-3);
            worst = worst.max((gk - fd).abs() / denom);
        }
        worst
    }

    #[test]
    fn log_prob_gradient_matches_finite_differences() {
        for seed in 0..5 {
            let err = finite_difference_error(seed);
            assert!(err < 1e-4, "seed {seed}: {err}");
        }
    }

    #[test]
    fn reward_examples() {
        let g = fixtures::t1();
        let shared = g.profile_from_choices(&[0, 0]);
        assert_eq!(reward(&shared, &shared, 0, &g).unwrap(), 0.0);
        let moved = g.profile_from_choices(&[3, 0]);
        assert!((reward(&shared, &moved, 0, &g).unwrap() - 4.0).abs() < 1e-12);
        let both = g.profile_from_choices(&[3, 3]);
        assert!(matches!(reward(&shared, &both, 0, &g), Err(DrlError::NotUnilateral(2))));
        assert!(matches!(reward(&shared, &moved, 1, &g), Err(DrlError::WrongPlayer { .. })));
    }

    #[test]
    fn reward_matches_global_difference() {
        let mut rng = stream(1, Stream::Evaluation);
        for trial in 0..1000 {
            let g = fixtures::random_instance(trial % 25, RandomShape::SMALL);
            let c = g.random_choices(&mut rng);
            let i = rng.random_range(0..g.num_players());
            let mut c2 = c.clone();
            c2[i] = rng.random_range(0..g.space_len(i));
            let (w, w2) = (g.profile_from_choices(&c), g.profile_from_choices(&c2));
            let r = reward(&w, &w2, i, &g).unwrap();
            let d = game::potential(&w, &g) - game::potential(&w2, &g);
            assert!((r - d).abs() <= 1e-9 * game::potential(&w, &g).max(1.0));
        }
    }

    #[test]
    fn zero_lr_leaves_parameters() {
        let g = fixtures::t1();
        let mut net = PolicyNet::for_game(&g, 8, 3);
        let before = net.params.clone();
        let cfg = TrainConfig { episodes: 20, lr: 0.0, ..TrainConfig::default() };
        train(&mut net, &g, &cfg, &mut stream(3, Stream::Training)).unwrap();
        assert_eq!(net.params, before);
    }

    #[test]
    fn training_is_reproducible() {
        let g = fixtures::t1();
        let cfg = TrainConfig { episodes: 30, lr: 1e-2, ..TrainConfig::default() };
        let run = || {
            let mut net = PolicyNet::for_game(&g, 8, 4);
            let rep = train(&mut net, &g, &cfg, &mut stream(4, Stream::Training)).unwrap();
            (net.params, rep.curve)
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn rejects_bad_config() {
        let g = fixtures::t1();
        let mut net = PolicyNet::for_game(&g, 8, 4);
        let cfg = TrainConfig { horizon: Some(0), ..TrainConfig::default() };
        assert!(matches!(train(&mut net, &g, &cfg, &mut stream(0, Stream::Training)), Err(DrlError::InvalidConfig(_))));
        let mut wrong = PolicyNet::new(3, 4, 5, 0);
        assert!(train(&mut wrong, &g, &TrainConfig::default(), &mut stream(0, Stream::Training)).is_err());
    }

    #[test]
    fn compose_zero_iterations_is_identity() {
        let g = fixtures::t1();
        let net = PolicyNet::for_game(&g, 8, 1);
        assert_eq!(drl_compose(&net, &g, &[2, 1], 0).unwrap(), vec![2, 1]);
    }

    #[test]
    fn net_file_round_trip() {
        let net = PolicyNet::new(5, 3, 4, 99);
        let mut buf = Vec::new();
        net.write_to(&mut buf).unwrap();
        assert_eq!(PolicyNet::read_from(buf.as_slice()).unwrap(), net);
        assert!(PolicyNet::read_from(&buf[..buf.len() - 1]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(PolicyNet::read_from(bad.as_slice()), Err(DrlError::BadFile(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn rewards_telescope(seed in 0u64..1000, steps in 1usize..40) {
            let g = fixtures::random_instance(seed, RandomShape::SMALL);
            let mut rng = stream(seed, Stream::Evaluation);
            let mut c = g.random_choices(&mut rng);
            let start = game::potential(&g.profile_from_choices(&c), &g);
            let mut total = 0.0;
            for _ in 0..steps {
                let i = rng.random_range(0..g.num_players());
                let mut next = c.clone();
                next[i] = rng.random_range(0..g.space_len(i));
                total += reward(&g.profile_from_choices(&c), &g.profile_from_choices(&next), i, &g).unwrap();
                c = next;
            }
            let end = game::potential(&g.profile_from_choices(&c), &g);
            prop_assert!((total - (start - end)).abs() <= 1e-9 * start.max(1.0));
        }

        #[test]
        fn greedy_steps_change_one_player(seed in 0u64..1000) {
            let g = fixtures::random_instance(seed, RandomShape::SMALL);
            let net = PolicyNet::for_game(&g, 8, seed);
            let mut rng = stream(seed, Stream::Evaluation);
            let start = g.random_choices(&mut rng);
            let mut c = start.clone();
            for _ in 0..5 {
                let before = c.clone();
                let enc = StateEncoder::new(&g);
                let acts = ActionIndex::new(&g);
                drl_step(&net, &g, &enc, &acts, &mut c).unwrap();
                prop_assert!(before.iter().zip(&c).filter(|(a, b)| a != b).count() <= 1);
            }
        }
    }
}

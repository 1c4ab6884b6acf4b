//! Exhaustive ground truth for small instances.
//!
//! Everything here enumerates the joint strategy space and evaluates the
//! global potential directly; none of it reuses the samplers' local energies,
//! so it doubles as an independent check of them.

use serde::{Deserialize, Serialize};

use crate::game::LoadState;
use crate::model::{Game, StrategyProfile};

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;
/// Largest joint space for which dense transition matrices are built.
pub const MATRIX_CAP: u128 = 2048;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("joint strategy space has {size} states, above the cap of {cap}; use a sampler instead")]
    TooLarge { size: u128, cap: u128 },
    #[error("vector lengths differ ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("distance {last} still above {epsilon} after {iterations} iterations")]
    NoConvergence { iterations: usize, last: f64, epsilon: f64 },
}

/// Mixed-radix bijection between strategy-index vectors and `0..|W|`,
/// player 0 most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileIndex {
    radices: Vec<usize>,
    len: usize,
}

impl ProfileIndex {
    pub fn new(game: &Game) -> Self {
        let radices: Vec<usize> = (0..game.num_players()).map(|i| game.space_len(i)).collect();
        let len = radices.iter().product();
        Self { radices, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn encode(&self, choices: &[usize]) -> usize {
        choices
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&c, &r)| acc * r + c)
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = index % r;
            index /= r;
        }
        out
    }

    /// Index of the state where player `i` switches to strategy `s`.
    pub fn with_choice(&self, index: usize, choices: &[usize], i: usize, s: usize) -> usize {
        let stride: usize = self.radices[i + 1..].iter().product();
        index - choices[i] * stride + s * stride
    }
}

fn check_cap(game: &Game, cap: u128) -> Result<(), OracleError> {
    let size = game.joint_space_size();
    if size > cap {
        Err(OracleError::TooLarge { size, cap })
    } else {
        Ok(())
    }
}

/// Potential of every state, in index order.
pub fn all_potentials(game: &Game) -> Result<Vec<f64>, OracleError> {
    all_potentials_capped(game, DEFAULT_ENUMERATION_CAP)
}

pub fn all_potentials_capped(game: &Game, cap: u128) -> Result<Vec<f64>, OracleError> {
    check_cap(game, cap)?;
    let index = ProfileIndex::new(game);
    Ok((0..index.len())
        .map(|k| {
            let choices = index.decode(k);
            LoadState::new(game, &choices).potential(game, &choices)
        })
        .collect())
}

/// Exact potential minimizer, lowest index on ties.
pub fn enumerate_optimal(game: &Game) -> Result<(StrategyProfile, f64), OracleError> {
    enumerate_optimal_capped(game, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_optimal_capped(game: &Game, cap: u128) -> Result<(StrategyProfile, f64), OracleError> {
    let phi = all_potentials_capped(game, cap)?;
    let (best, value) = phi
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
    let index = ProfileIndex::new(game);
    Ok((game.profile_from_choices(&index.decode(best)), value))
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `exp(-beta * phi) / Z` for a list of potentials.
pub fn gibbs_distribution(beta: f64, phi: &[f64]) -> Vec<f64> {
    let logits: Vec<f64> = phi.iter().map(|p| -beta * p).collect();
    let lz = log_sum_exp(&logits);
    logits.iter().map(|l| (l - lz).exp()).collect()
}

pub fn stationary_distribution(game: &Game) -> Result<Vec<f64>, OracleError> {
    Ok(gibbs_distribution(game.params().beta, &all_potentials(game)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Ma,
    Mh,
}

/// Dense transition matrix of one of the two chains, with its target
/// distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMatrices {
    pub kind: ChainKind,
    pub size: usize,
    /// Row-major `size x size`.
    pub p: Vec<f64>,
    pub pi: Vec<f64>,
    /// Nonzero entries of each row, `(column, probability)`.
    rows: Vec<Vec<(usize, f64)>>,
}

impl ChainMatrices {
    pub fn entry(&self, from: usize, to: usize) -> f64 {
        self.p[from * self.size + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.p[from * self.size..(from + 1) * self.size]
    }

    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.size)
            .map(|w| (self.row(w).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// One step of distribution evolution, `v^T P`.
    pub fn step(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        for (w, row) in self.rows.iter().enumerate() {
            if v[w] == 0.0 {
                continue;
            }
            for &(to, p) in row {
                out[to] += v[w] * p;
            }
        }
        out
    }

    /// `max_w |(pi^T P)_w - pi_w|`.
    pub fn stationarity_residual(&self, pi: &[f64]) -> f64 {
        self.step(pi)
            .iter()
            .zip(pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub fn build_chain_matrices(kind: ChainKind, game: &Game) -> Result<ChainMatrices, OracleError> {
    check_cap(game, MATRIX_CAP)?;
    let phi = all_potentials_capped(game, MATRIX_CAP)?;
    let beta = game.params().beta;
    let index = ProfileIndex::new(game);
    let n = index.len();
    let players = game.num_players() as f64;
    let mut p = vec![0.0; n * n];
    for w in 0..n {
        let choices = index.decode(w);
        let row = &mut p[w * n..(w + 1) * n];
        for i in 0..game.num_players() {
            let targets: Vec<usize> = (0..game.space_len(i))
                .map(|s| index.with_choice(w, &choices, i, s))
                .collect();
            match kind {
                ChainKind::Ma => {
                    let local: Vec<f64> = targets.iter().map(|&t| phi[t]).collect();
                    for (&t, q) in targets.iter().zip(gibbs_distribution(beta, &local)) {
                        row[t] += q / players;
                    }
                }
                ChainKind::Mh => {
                    let q = 1.0 / (players * targets.len() as f64);
                    for &t in &targets {
                        if t == w {
                            row[w] += q;
                            continue;
                        }
                        let a = (-beta * (phi[t] - phi[w])).exp().min(1.0);
                        row[t] += q * a;
                        row[w] += q * (1.0 - a);
                    }
                }
            }
        }
    }
    let rows = (0..n)
        .map(|w| {
            (0..n)
                .filter_map(|t| {
                    let x = p[w * n + t];
                    (x != 0.0).then_some((t, x))
                })
                .collect()
        })
        .collect();
    Ok(ChainMatrices {
        kind,
        size: n,
        p,
        pi: gibbs_distribution(beta, &phi),
        rows,
    })
}

/// `max_{w,w'} |pi_w P_{w,w'} - pi_{w'} P_{w',w}|`.
pub fn verify_detailed_balance(chain: &ChainMatrices, pi: &[f64]) -> Result<f64, OracleError> {
    if pi.len() != chain.size {
        return Err(OracleError::DimensionMismatch {
            left: chain.size,
            right: pi.len(),
        });
    }
    let mut worst: f64 = 0.0;
    for a in 0..chain.size {
        for b in (a + 1)..chain.size {
            worst = worst.max((pi[a] * chain.entry(a, b) - pi[b] * chain.entry(b, a)).abs());
        }
    }
    Ok(worst)
}

pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64, OracleError> {
    if p.len() != q.len() {
        return Err(OracleError::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

pub const DEFAULT_MIXING_LIMIT: usize = 10_000_000;

/// First `t` with `TV(start^T P^t, pi) <= epsilon`. Without a start vector the
/// worst case over all point-mass starts is returned.
pub fn empirical_mixing_time(
    chain: &ChainMatrices,
    pi: &[f64],
    epsilon: f64,
    start: Option<&[f64]>,
    limit: usize,
) -> Result<usize, OracleError> {
    let starts: Vec<Vec<f64>> = match start {
        Some(s) => {
            if s.len() != chain.size {
                return Err(OracleError::DimensionMismatch {
                    left: chain.size,
                    right: s.len(),
                });
            }
            vec![s.to_vec()]
        }
        None => (0..chain.size)
            .map(|w| {
                let mut v = vec![0.0; chain.size];
                v[w] = 1.0;
                v
            })
            .collect(),
    };
    let mut worst = 0;
    for mut v in starts {
        let mut t = 0;
        loop {
            let d = tv_distance(&v, pi)?;
            if d <= epsilon {
                break;
            }
            if t >= limit {
                return Err(OracleError::NoConvergence {
                    iterations: t,
                    last: d,
                    epsilon,
                });
            }
            v = chain.step(&v);
            t += 1;
        }
        worst = worst.max(t);
    }
    Ok(worst)
}

/// Log-sum-exp approximation gap `F N ln(M) / beta`.
pub fn gap_bound(beta: f64, f: usize, n: usize, m: usize) -> f64 {
    f as f64 * n as f64 * (m as f64).ln() / beta
}

/// Mixing-time upper bounds `(theorem, appendix)`; the appendix form carries
/// the extra `N^2` in the spectral-gap term.
pub fn mixing_time_bound(epsilon: f64, beta: f64, f: usize, n: usize, m: usize, d: f64) -> (f64, f64) {
    if m <= 1 {
        return (0.0, 0.0);
    }
    let (ff, nn, mm) = (f as f64, n as f64, m as f64);
    let numerator = (1.0 / (2.0 * epsilon)).ln() + 0.5 * ff * nn * mm.ln() + 0.5 * beta * d;
    // ln of the subtracted term exp(-4 beta D) / (2 M^(2F(N+1)))
    let ln_x = -4.0 * beta * d - 2f64.ln() - 2.0 * ff * (nn + 1.0) * mm.ln();
    let bound = |ln_x: f64| {
        let q = if ln_x > -700.0 {
            numerator / -(-ln_x.exp()).ln_1p()
        } else {
            // -ln(1 - x) = x to double precision here
            (numerator.ln() - ln_x).exp()
        };
        q.ceil().max(0.0)
    };
    (bound(ln_x), bound(ln_x - 2.0 * nn.ln()))
}

/// Entropy-regularized optimum `-ln(Z)/beta`, by log-sum-exp.
pub fn g_beta(beta: f64, phi: &[f64]) -> f64 {
    let logits: Vec<f64> = phi.iter().map(|p| -beta * p).collect();
    -log_sum_exp(&logits) / beta
}

/// The regularized objective `sum p Phi + (1/beta) sum p ln p` at `p`.
pub fn regularized_objective(beta: f64, phi: &[f64], p: &[f64]) -> f64 {
    phi.iter()
        .zip(p)
        .map(|(f, &q)| q * f + if q > 0.0 { q * q.ln() / beta } else { 0.0 })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub states: u64,
    pub beta: f64,
    pub epsilon: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    /// Potential range `max Phi - min Phi`.
    pub d: f64,
    pub g_beta: f64,
    pub gap_bound: f64,
    pub tmix_bound_theorem: f64,
    pub tmix_bound_appendix: f64,
    /// Worst-case mixing time of the MH chain.
    pub tmix_empirical: u64,
    pub tmix_empirical_ma: u64,
}

/// Chain length and per-type host count used in the closed-form bounds:
/// the largest of each, which makes the bounds hold for non-uniform
/// instances too.
pub fn bound_dimensions(game: &Game) -> (usize, usize) {
    let f = game.max_chain_len();
    let m = game
        .players()
        .iter()
        .flat_map(|p| p.chain.iter().map(|&t| game.topology().hosts(t).len()))
        .max()
        .unwrap_or(1);
    (f, m)
}

pub fn bound_report(game: &Game, epsilon: f64) -> Result<BoundReport, OracleError> {
    let phi = all_potentials_capped(game, MATRIX_CAP)?;
    let beta = game.params().beta;
    let phi_min = phi.iter().copied().fold(f64::INFINITY, f64::min);
    let phi_max = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let d = phi_max - phi_min;
    let (f, m) = bound_dimensions(game);
    let n = game.num_players();
    let (theorem, appendix) = mixing_time_bound(epsilon, beta, f, n, m, d);
    let mh = build_chain_matrices(ChainKind::Mh, game)?;
    let ma = build_chain_matrices(ChainKind::Ma, game)?;
    let tmix_mh = empirical_mixing_time(&mh, &mh.pi, epsilon, None, DEFAULT_MIXING_LIMIT)?;
    let tmix_ma = empirical_mixing_time(&ma, &ma.pi, epsilon, None, DEFAULT_MIXING_LIMIT)?;
    Ok(BoundReport {
        states: phi.len() as u64,
        beta,
        epsilon,
        phi_min,
        phi_max,
        d,
        g_beta: g_beta(beta, &phi),
        gap_bound: gap_bound(beta, f, n, m),
        tmix_bound_theorem: theorem,
        tmix_bound_appendix: appendix,
        tmix_empirical: tmix_mh as u64,
        tmix_empirical_ma: tmix_ma as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game;
    use crate::model::fixtures::{self, RandomShape};
    use crate::model::GameParams;
    use proptest::prelude::*;

    #[test]
    fn index_round_trip_on_t1() {
        let g = fixtures::t1();
        let idx = ProfileIndex::new(&g);
        assert_eq!(idx.len(), 16);
        for k in 0..16 {
            assert_eq!(idx.encode(&idx.decode(k)), k);
        }
        assert_eq!(idx.decode(1), vec![0, 1]);
        assert_eq!(idx.decode(4), vec![1, 0]);
    }

    #[test]
    fn t1_optimum() {
        let g = fixtures::t1();
        let (best, phi) = enumerate_optimal(&g).unwrap();
        assert!((phi - 16.0).abs() < 1e-12);
        // lowest index among the two disjoint layouts: player 0 on m1
        assert_eq!(g.choices_of(&best).unwrap(), vec![0, 3]);
    }

    #[test]
    fn single_player_optimum_is_its_cheapest_strategy() {
        let mut cfg = fixtures::p_default_config();
        cfg.players[0].count = 1;
        let g = Game::from_config(&cfg, 5).unwrap();
        let (best, _) = enumerate_optimal(&g).unwrap();
        let alone = |s: usize| {
            let prof = g.profile_from_choices(&[s]);
            let b = game::expected_cost(0, &prof, &g);
            g.params().alpha * b.latency_cost + b.congestion_cost
        };
        let expected = (0..g.space_len(0)).min_by(|&a, &b| alone(a).total_cmp(&alone(b))).unwrap();
        assert_eq!(g.choices_of(&best).unwrap(), vec![expected]);
    }

    #[test]
    fn p_default_is_refused() {
        let g = fixtures::p_default(1);
        assert!(matches!(enumerate_optimal(&g), Err(OracleError::TooLarge { .. })));
        assert!(matches!(stationary_distribution(&g), Err(OracleError::TooLarge { .. })));
        assert!(matches!(build_chain_matrices(ChainKind::Mh, &g), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn stationary_examples() {
        assert_eq!(gibbs_distribution(0.1, &[3.0]), vec![1.0]);
        let two = gibbs_distribution(0.1, &[0.0, 4.0]);
        assert!((two[0] - 1.0 / (1.0 + (-0.4f64).exp())).abs() < 1e-12);
        assert!((two[0] - 0.5987).abs() < 1e-4 && (two[1] - 0.4013).abs() < 1e-4);

        let g = fixtures::t1();
        for beta in [0.01, 1.0, 5.0] {
            let gb = fixtures::t1_with(GameParams { beta, ..*g.params() });
            let pi = stationary_distribution(&gb).unwrap();
            assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let top = pi.iter().copied().fold(0.0, f64::max);
            let phi = all_potentials(&gb).unwrap();
            for (p, f) in pi.iter().zip(&phi) {
                assert_eq!(*p == top, (*f - 16.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn t1_ma_entry_by_hand() {
        // From both-on-m1 (index 0) to player 0 on m2m2 (index 3*4 + 0 = 12):
        // player 0 is picked with probability 1/2, and its local softmax over
        // potentials (20, 20, 20, 16) at beta 1 gives e^-16 / (3e^-20 + e^-16).
        let g = fixtures::t1();
        let ma = build_chain_matrices(ChainKind::Ma, &g).unwrap();
        let idx = ProfileIndex::new(&g);
        let from = idx.encode(&[0, 0]);
        let to = idx.encode(&[3, 0]);
        let phi = all_potentials(&g).unwrap();
        let local: Vec<f64> = (0..4).map(|s| phi[idx.encode(&[s, 0])]).collect();
        let z: f64 = local.iter().map(|p| (-p).exp()).sum();
        assert!((ma.entry(from, to) - 0.5 * (-local[3]).exp() / z).abs() < 1e-12);
        // the softmax from the other side: costs (5,7,7,7) for player 0
        // against player 1 on m2m2
        let other = idx.encode(&[0, 3]);
        let stay = 0.5 * 1.0 / (1.0 + 3.0 * (-4.0f64).exp());
        let self_mass_from_p0 = ma.entry(other, other) - 0.5 * ma_self_share(&g, &idx, &phi, [0, 3], 1);
        assert!((self_mass_from_p0 - stay).abs() < 1e-12);
        assert!((ma.entry(other, idx.encode(&[1, 3])) - 0.5 * 0.01735).abs() < 1e-5);
    }

    fn ma_self_share(g: &Game, idx: &ProfileIndex, phi: &[f64], at: [usize; 2], player: usize) -> f64 {
        let local: Vec<f64> = (0..g.space_len(player))
            .map(|s| {
                let mut c = at;
                c[player] = s;
                phi[idx.encode(&c)]
            })
            .collect();
        gibbs_distribution(g.params().beta, &local)[at[player]]
    }

    #[test]
    fn symmetric_chain_with_uniform_pi_is_balanced() {
        let g = fixtures::t1();
        let flat = fixtures::t1_with(GameParams { beta: 0.0, ..*g.params() });
        let mh = build_chain_matrices(ChainKind::Mh, &flat).unwrap();
        let uniform = vec![1.0 / 16.0; 16];
        assert_eq!(verify_detailed_balance(&mh, &uniform).unwrap(), 0.0);
        assert!(verify_detailed_balance(&mh, &[1.0]).is_err());
    }

    #[test]
    fn t1_chains_are_reversible_and_stationary() {
        let g = fixtures::t1();
        let pi = stationary_distribution(&g).unwrap();
        for kind in [ChainKind::Ma, ChainKind::Mh] {
            let c = build_chain_matrices(kind, &g).unwrap();
            assert!(c.max_row_sum_error() <= 1e-12);
            assert!(verify_detailed_balance(&c, &pi).unwrap() <= 1e-12);
            assert!(c.stationarity_residual(&pi) <= 1e-10);
        }
    }

    #[test]
    fn chain_support_respects_hamming() {
        let g = fixtures::random_instance(11, RandomShape::TINY);
        let idx = ProfileIndex::new(&g);
        for kind in [ChainKind::Ma, ChainKind::Mh] {
            let c = build_chain_matrices(kind, &g).unwrap();
            for a in 0..c.size {
                assert!(c.entry(a, a) > 0.0);
                for b in 0..c.size {
                    if c.entry(a, b) != 0.0 {
                        let pa = g.profile_from_choices(&idx.decode(a));
                        let pb = g.profile_from_choices(&idx.decode(b));
                        assert!(game::hamming(&pa, &pb).unwrap() <= 1);
                    }
                    assert!(c.entry(a, b) >= 0.0);
                }
            }
        }
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!((tv_distance(&[0.6, 0.4], &[0.5, 0.5]).unwrap() - 0.1).abs() < 1e-12);
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn mixing_from_stationary_is_zero() {
        let g = fixtures::t1();
        let c = build_chain_matrices(ChainKind::Mh, &g).unwrap();
        assert_eq!(empirical_mixing_time(&c, &c.pi, 1e-3, Some(&c.pi.clone()), 10).unwrap(), 0);
    }

    #[test]
    fn mixing_reports_non_convergence() {
        let g = fixtures::t1();
        let c = build_chain_matrices(ChainKind::Mh, &g).unwrap();
        let err = empirical_mixing_time(&c, &c.pi, 1e-9, None, 3).unwrap_err();
        assert!(matches!(err, OracleError::NoConvergence { iterations: 3, .. }));
    }

    #[test]
    fn t1_mixing_within_bound() {
        let g = fixtures::t1();
        let report = bound_report(&g, 1e-3).unwrap();
        assert!(report.tmix_bound_theorem.is_finite() && report.tmix_bound_appendix.is_finite());
        assert!(report.tmix_bound_appendix >= report.tmix_bound_theorem);
        assert!((report.tmix_empirical as f64) <= report.tmix_bound_appendix);
        assert!(report.tmix_empirical > 0 && report.tmix_empirical_ma > 0);
    }

    #[test]
    fn single_state_bound() {
        assert_eq!(mixing_time_bound(1e-3, 1.0, 1, 1, 1, 0.0), (0.0, 0.0));
        let mut cfg = fixtures::t1_config();
        cfg.servers.truncate(1);
        let g = Game::from_config(&cfg, 0).unwrap();
        let report = bound_report(&g, 1e-3).unwrap();
        assert_eq!(report.states, 1);
        assert_eq!(report.tmix_empirical, 0);
        assert!(report.tmix_empirical as f64 <= report.tmix_bound_appendix);
    }

    #[test]
    fn bound_is_monotone_in_beta() {
        let g = fixtures::t1();
        let (f, m) = bound_dimensions(&g);
        let phi = all_potentials(&g).unwrap();
        let d = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max) - 16.0;
        let mut last = (0.0, 0.0);
        for beta in [0.01, 0.1, 1.0] {
            let b = mixing_time_bound(1e-3, beta, f, 2, m, d);
            assert!(b.0 >= last.0 && b.1 >= last.1);
            last = b;
        }
    }

    #[test]
    fn bound_survives_underflow() {
        let (t, a) = mixing_time_bound(1e-3, 10.0, 3, 10, 5, 500.0);
        assert!(t > 0.0 && a >= t);
    }

    #[test]
    fn gap_bound_values() {
        assert!((gap_bound(0.1, 3, 10, 5) - 300.0 * 5f64.ln()).abs() < 1e-9);
        assert!((gap_bound(0.1, 3, 10, 5) - 482.83).abs() < 0.01);
        assert!(gap_bound(1e12, 3, 10, 5) < 1e-9);
    }

    #[test]
    fn g_beta_sandwich_on_t1() {
        let g = fixtures::t1();
        let phi = all_potentials(&g).unwrap();
        for beta in [0.1, 1.0, 10.0] {
            let v = g_beta(beta, &phi);
            let pi = gibbs_distribution(beta, &phi);
            assert!((v - regularized_objective(beta, &phi, &pi)).abs() < 1e-9);
            assert!(v <= 16.0 + 1e-12);
            assert!(v >= 16.0 - (phi.len() as f64).ln() / beta - 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn tiny_chains_check_out(seed in 0u64..100_000) {
            let g = fixtures::random_instance(seed, RandomShape::TINY);
            let pi = stationary_distribution(&g).unwrap();
            for kind in [ChainKind::Ma, ChainKind::Mh] {
                let c = build_chain_matrices(kind, &g).unwrap();
                prop_assert!(c.max_row_sum_error() <= 1e-12);
                prop_assert!(verify_detailed_balance(&c, &pi).unwrap() <= 1e-12);
                prop_assert!(c.stationarity_residual(&pi) <= 1e-10);
            }
        }

        #[test]
        fn optimum_is_an_equilibrium(seed in 0u64..100_000) {
            let g = fixtures::random_instance(seed, RandomShape::TINY);
            let (best, _) = enumerate_optimal(&g).unwrap();
            prop_assert!(game::is_nash_equilibrium(&best, &g).is_equilibrium());
        }
    }
}

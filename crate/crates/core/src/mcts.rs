//! MCTS-SCCA: players pick their strategies one after another, each pick
//! decided by a UCB-guided tree search over the remaining players.
//!
//! Nodes keep the raw sum of leaf potentials seen through them. With
//! [`RewardMode::Normalized`] the mean is mapped into `[-1, 0]` using the
//! smallest and largest potentials seen so far at the moment a score is
//! needed; [`RewardMode::Raw`] scores with `-mean` directly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::game::LoadState;
use crate::model::{Game, StrategyProfile};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MctsError {
    #[error("sample budget must be positive")]
    ZeroBudget,
    #[error("node {0} still has untried children")]
    NotFullyExpanded(usize),
    #[error("node {0} has no children")]
    NoChildren(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardMode {
    #[default]
    Normalized,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MctsConfig {
    /// Search rounds per player.
    pub budget: usize,
    /// Exploration weight used while traversing.
    pub omega: f64,
    pub reward: RewardMode,
}

impl Default for MctsConfig {
    fn default() -> Self {
        Self {
            budget: 500,
            omega: std::f64::consts::SQRT_2,
            reward: RewardMode::Normalized,
        }
    }
}

const SCALE_EPS: f64 = 1e-9;

/// UCB score of a child with cumulative reward `q` over `n` visits whose
/// parent has `parent_n` visits.
pub fn ucb(q: f64, n: u64, parent_n: u64, omega: f64) -> f64 {
    q / n as f64 + omega * (2.0 * (parent_n as f64).ln() / n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    /// Number of players assigned on the path from the tree's base to here.
    pub depth: usize,
    /// Strategy index assigned by the edge into this node.
    pub action: Option<usize>,
    pub children: Vec<usize>,
    pub untried: Vec<usize>,
    pub visits: u64,
    /// Sum of the raw leaf potentials back-propagated through this node.
    pub phi_sum: f64,
    /// Rounds that ended at this node (its own expansion, or leaf hits).
    pub end_visits: u64,
}

/// Search tree over player assignments, stored as an arena.
#[derive(Debug, Clone)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    root: usize,
    /// Choices fixed above the root.
    prefix: Vec<usize>,
    phi_min: f64,
    phi_max: f64,
    reward: RewardMode,
}

impl Tree {
    /// Fresh tree whose root is the partial assignment `prefix`.
    pub fn new(game: &Game, prefix: Vec<usize>, reward: RewardMode) -> Self {
        let depth = prefix.len();
        let mut tree = Self {
            nodes: Vec::new(),
            root: 0,
            prefix,
            phi_min: f64::INFINITY,
            phi_max: f64::NEG_INFINITY,
            reward,
        };
        tree.push(game, None, depth, None);
        tree
    }

    fn push(&mut self, game: &Game, parent: Option<usize>, depth: usize, action: Option<usize>) -> usize {
        let untried = if depth < game.num_players() {
            (0..game.space_len(depth)).collect()
        } else {
            Vec::new()
        };
        self.nodes.push(TreeNode {
            parent,
            depth,
            action,
            children: Vec::new(),
            untried,
            visits: 0,
            phi_sum: 0.0,
            end_visits: 0,
        });
        self.nodes.len() - 1
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    /// Cumulative reward of a node as used by the UCB rule.
    pub fn q(&self, id: usize) -> f64 {
        let node = &self.nodes[id];
        match self.reward {
            RewardMode::Raw => -node.phi_sum,
            RewardMode::Normalized => {
                let n = node.visits as f64;
                let mean = node.phi_sum / n;
                let span = self.phi_max - self.phi_min + SCALE_EPS;
                // the clamp only absorbs summation rounding
                -n * ((mean - self.phi_min) / span).clamp(0.0, 1.0)
            }
        }
    }

    fn pick(&self, id: usize, omega: f64, visited_only: bool) -> Result<usize, MctsError> {
        let node = &self.nodes[id];
        if !visited_only && !node.untried.is_empty() {
            return Err(MctsError::NotFullyExpanded(id));
        }
        let mut best: Option<(usize, f64, usize)> = None;
        for &c in &node.children {
            let child = &self.nodes[c];
            let score = ucb(self.q(c), child.visits, node.visits, omega);
            let action = child.action.expect("children carry an action");
            let better = match best {
                None => true,
                Some((_, s, a)) => score > s || (score == s && action < a),
            };
            if better {
                best = Some((c, score, action));
            }
        }
        best.map(|b| b.0).ok_or(MctsError::NoChildren(id))
    }

    /// UCB argmax over the children of a fully expanded node; ties go to the
    /// lowest strategy index.
    pub fn best_child(&self, id: usize, omega: f64) -> Result<usize, MctsError> {
        self.pick(id, omega, false)
    }

    /// Like [`Tree::best_child`] but ranks only the children expanded so far.
    pub fn best_visited_child(&self, id: usize, omega: f64) -> Result<usize, MctsError> {
        self.pick(id, omega, true)
    }

    fn path_choices(&self, mut id: usize) -> Vec<usize> {
        let mut tail = Vec::new();
        while let Some(a) = self.nodes[id].action {
            if id == self.root {
                break;
            }
            tail.push(a);
            id = self.nodes[id].parent.expect("non-root has a parent");
        }
        let mut out = self.prefix.clone();
        out.extend(tail.into_iter().rev());
        out
    }

    /// One selection / expansion / simulation / back-propagation round.
    pub fn round<R: Rng + ?Sized>(&mut self, game: &Game, omega: f64, rng: &mut R) {
        let n = game.num_players();
        let mut id = self.root;
        loop {
            if self.nodes[id].depth >= n {
                break;
            }
            if !self.nodes[id].untried.is_empty() {
                let k = rng.random_range(0..self.nodes[id].untried.len());
                let action = self.nodes[id].untried.swap_remove(k);
                let depth = self.nodes[id].depth + 1;
                let child = self.push(game, Some(id), depth, Some(action));
                self.nodes[id].children.push(child);
                id = child;
                break;
            }
            id = self.best_child(id, omega).expect("fully expanded inner node has children");
        }
        let z = self.path_choices(id);
        let phi = simulate(game, &z, rng);
        self.phi_min = self.phi_min.min(phi);
        self.phi_max = self.phi_max.max(phi);
        self.nodes[id].end_visits += 1;
        let mut cur = Some(id);
        while let Some(c) = cur {
            self.nodes[c].visits += 1;
            self.nodes[c].phi_sum += phi;
            if c == self.root {
                break;
            }
            cur = self.nodes[c].parent;
        }
    }

    /// Makes `child` the new root; its subtree keeps its statistics.
    pub fn promote(&mut self, child: usize) {
        let action = self.nodes[child].action.expect("promoted node has an action");
        self.prefix.push(action);
        self.root = child;
    }
}

/// Potential of a uniformly random completion of the partial assignment `z`.
pub fn simulate<R: Rng + ?Sized>(game: &Game, z: &[usize], rng: &mut R) -> f64 {
    let mut choices = z.to_vec();
    for i in z.len()..game.num_players() {
        choices.push(rng.random_range(0..game.space_len(i)));
    }
    LoadState::new(game, &choices).potential(game, &choices)
}

/// Runs `config.budget` rounds from the tree's root and returns the chosen
/// child node (its action is the strategy for the root's player).
pub fn select_strategy<R: Rng + ?Sized>(
    tree: &mut Tree,
    game: &Game,
    config: &MctsConfig,
    rng: &mut R,
) -> Result<usize, MctsError> {
    if config.budget == 0 {
        return Err(MctsError::ZeroBudget);
    }
    for _ in 0..config.budget {
        tree.round(game, config.omega, rng);
    }
    let root = tree.root();
    if tree.node(root).untried.is_empty() {
        tree.best_child(root, 0.0)
    } else {
        tree.best_visited_child(root, 0.0)
    }
}

/// Assigns players in id order, promoting the chosen subtree after each pick.
pub fn mcts_compose<R: Rng + ?Sized>(game: &Game, config: &MctsConfig, rng: &mut R) -> Result<StrategyProfile, MctsError> {
    Ok(game.profile_from_choices(&mcts_compose_choices(game, config, rng)?))
}

pub fn mcts_compose_choices<R: Rng + ?Sized>(
    game: &Game,
    config: &MctsConfig,
    rng: &mut R,
) -> Result<Vec<usize>, MctsError> {
    if config.budget == 0 {
        return Err(MctsError::ZeroBudget);
    }
    let mut tree = Tree::new(game, Vec::new(), config.reward);
    for _ in 0..game.num_players() {
        let child = select_strategy(&mut tree, game, config, rng)?;
        tree.promote(child);
    }
    Ok(tree.prefix().to_vec())
}

//! Service chain composition in NFV systems, modelled as a weighted
//! potential game.
//!
//! * [`model`]: topology, players, strategy spaces and scenario files.
//! * [`game`]: costs, the potential, equilibrium checks.
//! * [`samplers`]: MA-SCCA, MH-SCCA and USCS step kernels.
//! * [`oracle`]: exhaustive ground truth and closed-form bounds.
//! * [`mcts`] and [`drl`]: the centralized composers.
//! * [`harness`]: timed runs with events, aggregation and CSV output.

pub mod drl;
pub mod game;
pub mod harness;
pub mod mcts;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod samplers;

pub use drl::{PolicyNet, TrainConfig};
pub use game::{CostBreakdown, LoadState, NashCheck};
pub use harness::{Aggregate, ExperimentTrace, FailureTable, HarnessError, RunOptions, Scheme, TraceRecord};
pub use mcts::{MctsConfig, RewardMode};
pub use model::{Game, GameParams, ModelError, PlayerSpec, ScenarioConfig, Strategy, StrategyProfile, SystemTopology};
pub use oracle::BoundReport;
pub use samplers::{ChainState, SelectionMode, StepOutcome};

//! Tabular model-based reinforcement learning in which simulated exploration
//! over an optimistic approximate model steers real exploration.
//!
//! The pieces, bottom-up:
//!
//! * [`env`]: deterministic ASCII grid worlds and initial paths.
//! * [`model`]: observation, recent-effect and combined approximate models.
//! * [`learning`]: sparse Q-table, full Bellman backups, greedy selection.
//! * [`planner`]: trajectory sampling and prioritized sweeping.
//! * [`agent`]: the learn / plan / act loop and strategy configurations.
//! * [`harness`]: convergence detection, metrics and result tables.
//! * [`bundled`]: the shipped mazes and initial paths.

pub mod agent;
pub mod bundled;
pub mod env;
pub mod harness;
pub mod learning;
pub mod mazegen;
pub mod model;
pub mod planner;
pub mod types;

pub use agent::{Agent, AgentError, StrategyConfig, StrategyKind};
pub use bundled::Bundled;
pub use env::{EnvError, Environment, GridMap, InitialPath, Transition};
pub use harness::{OutputFormat, RunMetrics, RunSettings};
pub use learning::{LearnerConfig, QTable};
pub use model::{CombinedModel, Model, ObservationModel, Prediction, RecentEffectModel};
pub use planner::{SweepMode, SweepQueue, TrajectoryPlannerConfig};
pub use types::{ActionId, StateId};

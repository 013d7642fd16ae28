//! The learn / plan / act loop and the exploration strategies it is run with.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::env::{EnvError, Environment, InitialPath, Transition};
use crate::learning::{estimate_q, select_greedy, LearnerConfig, QTable};
use crate::model::{CombinedModel, Model};
use crate::planner::{run_trajectory_batch, SweepMode, SweepQueue, TrajectoryPlannerConfig};
use crate::types::{ActionId, StateId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("protocol violation: {0}")]
    ProtocolViolation(&'static str),
    #[error("forced path diverged at step {step} in state {state}")]
    PathDiverged { step: usize, state: StateId },
    #[error(transparent)]
    Env(#[from] EnvError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Greedy acting over Q-values initialised to 1.0.
    OptimisticInit,
    /// Random simulated trajectories from the current state.
    TrajectorySampling { max_depth: usize },
    /// Prioritized sweeping that also reaches parents the model imagines.
    UnexploredSweeping,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub default_q: f64,
    pub trajectories_per_step: usize,
    pub min_priority: f64,
    pub max_updates_per_step: usize,
}

impl StrategyConfig {
    pub const OPTIMISTIC_Q: f64 = 1.0;
    pub const LOW_Q: f64 = 1e-32;
    pub const DEFAULT_TRAJECTORIES: usize = 10;

    fn with_kind(kind: StrategyKind, default_q: f64) -> StrategyConfig {
        StrategyConfig {
            kind,
            default_q,
            trajectories_per_step: StrategyConfig::DEFAULT_TRAJECTORIES,
            min_priority: SweepQueue::DEFAULT_MIN_PRIORITY,
            max_updates_per_step: SweepQueue::DEFAULT_MAX_UPDATES,
        }
    }

    pub fn optimistic_init() -> StrategyConfig {
        StrategyConfig::with_kind(StrategyKind::OptimisticInit, StrategyConfig::OPTIMISTIC_Q)
    }

    pub fn trajectory_sampling(max_depth: usize) -> StrategyConfig {
        StrategyConfig::with_kind(
            StrategyKind::TrajectorySampling { max_depth },
            StrategyConfig::LOW_Q,
        )
    }

    pub fn unexplored_sweeping() -> StrategyConfig {
        StrategyConfig::with_kind(StrategyKind::UnexploredSweeping, StrategyConfig::LOW_Q)
    }

    /// The five configurations compared in the experiment, in table order.
    pub fn all() -> Vec<StrategyConfig> {
        vec![
            StrategyConfig::optimistic_init(),
            StrategyConfig::trajectory_sampling(3),
            StrategyConfig::trajectory_sampling(6),
            StrategyConfig::trajectory_sampling(12),
            StrategyConfig::unexplored_sweeping(),
        ]
    }

    pub fn sweep_mode(&self) -> SweepMode {
        match self.kind {
            StrategyKind::UnexploredSweeping => SweepMode::IncludeUnexplored,
            _ => SweepMode::ExploredOnly,
        }
    }

    pub fn is_simulated_exploration(&self) -> bool {
        self.kind != StrategyKind::OptimisticInit
    }
}

impl fmt::Display for StrategyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            StrategyKind::OptimisticInit => write!(f, "optimistic-init"),
            StrategyKind::TrajectorySampling { max_depth } => write!(f, "trajectory-{max_depth}"),
            StrategyKind::UnexploredSweeping => write!(f, "unexplored-sweeping"),
        }
    }
}

pub struct Agent {
    strategy: StrategyConfig,
    learner: LearnerConfig,
    model: CombinedModel,
    q: QTable,
    queue: SweepQueue,
    rng: ChaCha8Rng,
    last: Option<(StateId, ActionId)>,
    simulated_backups: u64,
}

impl Agent {
    /// A fresh agent with the standard observation + recent-effect model.
    pub fn new(strategy: StrategyConfig, learner: LearnerConfig, terminal: StateId, seed: u64) -> Agent {
        let model = CombinedModel::standard(learner.action_count, terminal);
        Agent::with_model(strategy, learner, terminal, model, seed)
    }

    pub fn with_model(
        strategy: StrategyConfig,
        learner: LearnerConfig,
        terminal: StateId,
        model: CombinedModel,
        seed: u64,
    ) -> Agent {
        Agent {
            q: QTable::new(learner.action_count, strategy.default_q, terminal),
            queue: SweepQueue::new(
                strategy.sweep_mode(),
                strategy.min_priority,
                strategy.max_updates_per_step,
            ),
            rng: ChaCha8Rng::seed_from_u64(seed),
            strategy,
            learner,
            model,
            last: None,
            simulated_backups: 0,
        }
    }

    pub fn strategy(&self) -> &StrategyConfig {
        &self.strategy
    }

    pub fn learner(&self) -> &LearnerConfig {
        &self.learner
    }

    pub fn q(&self) -> &QTable {
        &self.q
    }

    pub fn model(&self) -> &CombinedModel {
        &self.model
    }

    pub fn queue(&self) -> &SweepQueue {
        &self.queue
    }

    pub fn last(&self) -> Option<(StateId, ActionId)> {
        self.last
    }

    pub fn simulated_backups(&self) -> u64 {
        self.simulated_backups
    }

    /// Sees state `s` and the reward for the previous action, learns, plans
    /// and returns the next action, or `None` once `s` is terminal.
    pub fn step(&mut self, s: StateId, r: Option<f64>) -> Result<Option<ActionId>, AgentError> {
        self.step_with(s, r, None)
    }

    /// Same as [`Agent::step`] but executes `action` instead of the greedy one.
    pub fn forced_step(
        &mut self,
        s: StateId,
        r: Option<f64>,
        action: ActionId,
    ) -> Result<Option<ActionId>, AgentError> {
        self.step_with(s, r, Some(action))
    }

    /// Forgets the pending transition, e.g. when an episode is cut short.
    pub fn abort_episode(&mut self) {
        self.last = None;
    }

    /// Sweeps until the queue is empty or `limit` backups were done.
    pub fn drain_queue(&mut self, limit: usize) -> usize {
        let n = self
            .queue
            .sweep_up_to(&mut self.q, &self.model, &self.learner, limit);
        self.simulated_backups += n as u64;
        n
    }

    fn step_with(
        &mut self,
        s: StateId,
        r: Option<f64>,
        forced: Option<ActionId>,
    ) -> Result<Option<ActionId>, AgentError> {
        match (r, self.last) {
            (Some(r), Some((last_s, last_a))) => self.learn(last_s, last_a, r, s),
            (None, None) => {}
            (Some(_), None) => {
                return Err(AgentError::ProtocolViolation("reward given at episode start"))
            }
            (None, Some(_)) => {
                return Err(AgentError::ProtocolViolation("reward missing mid-episode"))
            }
        }

        if self.q.is_terminal(s) {
            self.last = None;
            return Ok(None);
        }

        self.plan(s);

        let a = forced.unwrap_or_else(|| select_greedy(&self.q, s, &mut self.rng));
        self.last = Some((s, a));
        Ok(Some(a))
    }

    fn learn(&mut self, s: StateId, a: ActionId, r: f64, next: StateId) {
        self.model.learn(s, a, r, next);
        if let Some(backup) = estimate_q(&mut self.q, &self.model, &self.learner, s, a) {
            self.queue.enqueue_parents(&self.model, s, backup.delta);
        }
    }

    fn plan(&mut self, s: StateId) {
        if let StrategyKind::TrajectorySampling { max_depth } = self.strategy.kind {
            let cfg = TrajectoryPlannerConfig::new(max_depth, self.strategy.trajectories_per_step);
            let n = run_trajectory_batch(&mut self.q, &self.model, &self.learner, &cfg, s, &mut self.rng);
            self.simulated_backups += n as u64;
        }
        let n = self.queue.sweep(&mut self.q, &self.model, &self.learner);
        self.simulated_backups += n as u64;
    }
}

/// Replays the initial path from the start state with learning enabled.
/// `observe` sees every real transition. Returns the number of steps taken.
pub fn run_forced_path<E, F>(
    agent: &mut Agent,
    env: &mut E,
    path: &InitialPath,
    mut observe: F,
) -> Result<usize, AgentError>
where
    E: Environment,
    F: FnMut(StateId, ActionId, &Transition),
{
    let mut s = env.start();
    let mut r = None;
    for (i, &action) in path.actions().iter().enumerate() {
        if env.is_terminal(s) {
            return Err(AgentError::PathDiverged { step: i, state: s });
        }
        let a = agent
            .forced_step(s, r, action)?
            .expect("non-terminal state yields an action");
        let t = env.step(s, a)?;
        observe(s, a, &t);
        s = t.next;
        r = Some(t.reward);
    }
    if !env.is_terminal(s) {
        return Err(AgentError::PathDiverged {
            step: path.len(),
            state: s,
        });
    }
    agent.step(s, r)?;
    Ok(path.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpisodeOutcome {
    pub steps: usize,
    pub reached_goal: bool,
}

/// Runs one greedy episode from the start state, stopping at the goal or
/// after `step_cap` real steps.
pub fn run_episode<E, F>(
    agent: &mut Agent,
    env: &mut E,
    step_cap: usize,
    mut observe: F,
) -> Result<EpisodeOutcome, AgentError>
where
    E: Environment,
    F: FnMut(StateId, ActionId, &Transition),
{
    let mut s = env.start();
    let mut r = None;
    let mut steps = 0;
    loop {
        if steps == step_cap && !env.is_terminal(s) {
            agent.abort_episode();
            return Ok(EpisodeOutcome {
                steps,
                reached_goal: false,
            });
        }
        let Some(a) = agent.step(s, r)? else {
            return Ok(EpisodeOutcome {
                steps,
                reached_goal: true,
            });
        };
        let t = env.step(s, a)?;
        observe(s, a, &t);
        steps += 1;
        s = t.next;
        r = Some(t.reward);
    }
}

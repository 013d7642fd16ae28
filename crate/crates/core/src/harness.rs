//! Experiment driver: replays the initial path, runs greedy episodes until
//! the shortest path is repeated, and reports exploration metrics.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::agent::{run_episode, run_forced_path, Agent, AgentError, StrategyConfig};
use crate::env::{EnvError, Environment, GridMap, InitialPath};
use crate::learning::{ConfigError, LearnerConfig};
use crate::types::{ActionId, StateId};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Load { path: PathBuf, source: EnvError },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("bad results table: {0}")]
    Table(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunMetrics {
    pub forced_steps: u64,
    pub exploration_steps: u64,
    pub episodes: u64,
    pub explored_states: u64,
    pub explored_state_actions: u64,
    pub simulated_backups: u64,
    pub converged: bool,
}

impl RunMetrics {
    /// Headline step count: forced replay plus exploration.
    pub fn steps(&self) -> u64 {
        self.forced_steps + self.exploration_steps
    }

    pub fn actions_per_state(&self) -> f64 {
        self.explored_state_actions as f64 / self.explored_states as f64
    }
}

/// Distinct states and state-actions really experienced.
#[derive(Clone, Debug, Default)]
pub struct ExplorationLog {
    states: FxHashSet<StateId>,
    state_actions: FxHashSet<(StateId, ActionId)>,
}

impl ExplorationLog {
    pub fn record(&mut self, s: StateId, a: ActionId, next: StateId, next_is_terminal: bool) {
        self.states.insert(s);
        if !next_is_terminal {
            self.states.insert(next);
        }
        self.state_actions.insert((s, a));
    }

    pub fn states(&self) -> &FxHashSet<StateId> {
        &self.states
    }

    pub fn state_actions(&self) -> &FxHashSet<(StateId, ActionId)> {
        &self.state_actions
    }
}

/// True iff the last `k` episodes all took exactly `optimal` steps.
pub fn detect_convergence(history: &[usize], optimal: usize, k: usize) -> bool {
    k >= 1 && history.len() >= k && history[history.len() - k..].iter().all(|&n| n == optimal)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    pub gamma: f64,
    pub seed: u64,
    pub convergence_repeats: usize,
    pub max_episodes: usize,
    /// Per-episode step cap; `None` means ten times the grid area.
    pub step_cap: Option<usize>,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            gamma: LearnerConfig::DEFAULT_GAMMA,
            seed: 0,
            convergence_repeats: 2,
            max_episodes: 1000,
            step_cap: None,
        }
    }
}

/// Everything one strategy run produced.
pub struct StrategyRun {
    pub strategy: StrategyConfig,
    pub metrics: RunMetrics,
    pub episode_lengths: Vec<usize>,
    pub log: ExplorationLog,
    pub agent: Agent,
}

/// Runs a single strategy to convergence (or until the episode budget runs
/// out). Metrics are taken at the start of the first episode of the
/// converged streak.
pub fn run_strategy(
    map: &GridMap,
    path: &InitialPath,
    strategy: StrategyConfig,
    settings: &RunSettings,
    seed: u64,
) -> Result<StrategyRun, HarnessError> {
    let learner = LearnerConfig::new(settings.gamma, map.action_count())?;
    let mut env = map.clone();
    let terminal = map.terminal();
    let optimal = map.shortest_path_length();
    let step_cap = settings
        .step_cap
        .unwrap_or(10 * map.width() * map.height());
    let mut agent = Agent::new(strategy, learner, terminal, seed);
    let mut log = ExplorationLog::default();

    let forced = run_forced_path(&mut agent, &mut env, path, |s, a, t| {
        log.record(s, a, t.next, t.terminal)
    })?;

    let snapshot = |log: &ExplorationLog, agent: &Agent, exploration_steps: u64, episodes: u64| RunMetrics {
        forced_steps: forced as u64,
        exploration_steps,
        episodes,
        explored_states: log.states.len() as u64,
        explored_state_actions: log.state_actions.len() as u64,
        simulated_backups: agent.simulated_backups(),
        converged: false,
    };

    let k = settings.convergence_repeats;
    let mut history = Vec::new();
    let mut starts = Vec::new();
    let mut exploration_steps = 0u64;
    for episode in 0..settings.max_episodes {
        starts.push(snapshot(&log, &agent, exploration_steps, episode as u64));
        let outcome = run_episode(&mut agent, &mut env, step_cap, |s, a, t| {
            log.record(s, a, t.next, t.terminal)
        })?;
        exploration_steps += outcome.steps as u64;
        history.push(if outcome.reached_goal {
            outcome.steps
        } else {
            usize::MAX
        });
        if detect_convergence(&history, optimal, k) {
            let metrics = RunMetrics {
                converged: true,
                ..starts[history.len() - k]
            };
            return Ok(StrategyRun {
                strategy,
                metrics,
                episode_lengths: history,
                log,
                agent,
            });
        }
    }
    let metrics = snapshot(&log, &agent, exploration_steps, history.len() as u64);
    Ok(StrategyRun {
        strategy,
        metrics,
        episode_lengths: history,
        log,
        agent,
    })
}

/// Runs every strategy on its own agent, in parallel. Strategy `i` is
/// seeded with `settings.seed + i`; rows come back in input order.
pub fn run_strategies(
    map: &GridMap,
    path: &InitialPath,
    strategies: &[StrategyConfig],
    settings: &RunSettings,
) -> Result<Vec<(StrategyConfig, RunMetrics)>, HarnessError> {
    strategies
        .par_iter()
        .enumerate()
        .map(|(i, &strategy)| {
            let seed = settings.seed.wrapping_add(i as u64);
            run_strategy(map, path, strategy, settings, seed).map(|run| (strategy, run.metrics))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Tsv,
    Csv,
}

impl OutputFormat {
    fn separator(self) -> char {
        match self {
            OutputFormat::Tsv => '\t',
            OutputFormat::Csv => ',',
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(OutputFormat::Tsv),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected tsv or csv)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Tsv => "tsv",
            OutputFormat::Csv => "csv",
        })
    }
}

/// Paths plus run settings, as given on the command line.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub maze_file: PathBuf,
    pub path_file: PathBuf,
    pub strategies: Vec<StrategyConfig>,
    pub settings: RunSettings,
    pub output_format: OutputFormat,
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl ExperimentConfig {
    pub fn load(&self) -> Result<(GridMap, InitialPath), HarnessError> {
        let map = GridMap::parse(&read(&self.maze_file)?).map_err(|source| HarnessError::Load {
            path: self.maze_file.clone(),
            source,
        })?;
        let path = InitialPath::load(&read(&self.path_file)?, &map).map_err(|source| {
            HarnessError::Load {
                path: self.path_file.clone(),
                source,
            }
        })?;
        Ok((map, path))
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<(StrategyConfig, RunMetrics)>, HarnessError> {
    let (map, path) = cfg.load()?;
    run_strategies(&map, &path, &cfg.strategies, &cfg.settings)
}

pub const TABLE_COLUMNS: [&str; 8] = [
    "strategy",
    "steps",
    "forced_steps",
    "exploration_steps",
    "explored_states",
    "explored_state_actions",
    "simulated_backups",
    "converged",
];

pub fn emit_table<S: fmt::Display>(results: &[(S, RunMetrics)], format: OutputFormat) -> String {
    let sep = format.separator().to_string();
    let mut out = TABLE_COLUMNS.join(&sep);
    out.push('\n');
    for (name, m) in results {
        let fields = [
            name.to_string(),
            m.steps().to_string(),
            m.forced_steps.to_string(),
            m.exploration_steps.to_string(),
            m.explored_states.to_string(),
            m.explored_state_actions.to_string(),
            m.simulated_backups.to_string(),
            m.converged.to_string(),
        ];
        out.push_str(&fields.join(&sep));
        out.push('\n');
    }
    out
}

/// One parsed row of an emitted table. `episodes` is not part of the table
/// and comes back as zero.
pub fn parse_table(text: &str, format: OutputFormat) -> Result<Vec<(String, RunMetrics)>, HarnessError> {
    let sep = format.separator();
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| HarnessError::Table("missing header".into()))?
        .split(sep)
        .collect();
    if header != TABLE_COLUMNS {
        return Err(HarnessError::Table(format!("unexpected header {header:?}")));
    }
    lines
        .map(|line| {
            let fields: Vec<&str> = line.split(sep).collect();
            if fields.len() != TABLE_COLUMNS.len() {
                return Err(HarnessError::Table(format!("wrong field count in {line:?}")));
            }
            let num = |i: usize| {
                fields[i]
                    .parse::<u64>()
                    .map_err(|e| HarnessError::Table(format!("{}: {e}", TABLE_COLUMNS[i])))
            };
            let metrics = RunMetrics {
                forced_steps: num(2)?,
                exploration_steps: num(3)?,
                episodes: 0,
                explored_states: num(4)?,
                explored_state_actions: num(5)?,
                simulated_backups: num(6)?,
                converged: fields[7]
                    .parse()
                    .map_err(|e| HarnessError::Table(format!("converged: {e}")))?,
            };
            if num(1)? != metrics.steps() {
                return Err(HarnessError::Table(format!("steps column disagrees in {line:?}")));
            }
            Ok((fields[0].to_string(), metrics))
        })
        .collect()
}

//! Sparse Q-table with full model-based Bellman backups.

use rand::Rng;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;
use thiserror::Error;

use crate::model::Model;
use crate::types::{ActionId, StateId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("discount must lie strictly between 0 and 1, got {0}")]
    Discount(f64),
    #[error("action count must be positive")]
    NoActions,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LearnerConfig {
    pub gamma: f64,
    pub action_count: usize,
}

impl LearnerConfig {
    pub const DEFAULT_GAMMA: f64 = 0.95;

    pub fn new(gamma: f64, action_count: usize) -> Result<LearnerConfig, ConfigError> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(ConfigError::Discount(gamma));
        }
        if action_count == 0 {
            return Err(ConfigError::NoActions);
        }
        Ok(LearnerConfig {
            gamma,
            action_count,
        })
    }
}

/// Q-values keyed by (state, action). Absent entries read as `default_q`, so
/// the table never has to enumerate the state space.
#[derive(Clone, Debug)]
pub struct QTable {
    entries: FxHashMap<(StateId, ActionId), f64>,
    default_q: f64,
    action_count: usize,
    terminal: StateId,
}

impl QTable {
    pub fn new(action_count: usize, default_q: f64, terminal: StateId) -> QTable {
        QTable {
            entries: FxHashMap::default(),
            default_q,
            action_count,
            terminal,
        }
    }

    pub fn default_q(&self) -> f64 {
        self.default_q
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn is_terminal(&self, s: StateId) -> bool {
        s == self.terminal
    }

    pub fn read(&self, s: StateId, a: ActionId) -> f64 {
        self.entries.get(&(s, a)).copied().unwrap_or(self.default_q)
    }

    pub fn write(&mut self, s: StateId, a: ActionId, value: f64) {
        self.entries.insert((s, a), value);
    }

    pub fn is_touched(&self, s: StateId, a: ActionId) -> bool {
        self.entries.contains_key(&(s, a))
    }

    /// Entries that have ever been written.
    pub fn touched(&self) -> impl Iterator<Item = ((StateId, ActionId), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn touched_len(&self) -> usize {
        self.entries.len()
    }

    /// Zero for the terminal state, otherwise the best action value.
    pub fn state_value(&self, s: StateId) -> f64 {
        if self.is_terminal(s) {
            return 0.0;
        }
        (0..self.action_count)
            .map(|a| self.read(s, ActionId(a)))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Backup {
    pub value: f64,
    pub delta: f64,
}

/// Full expected backup of `(s, a)` through the model's prediction. Returns
/// `None`, writing nothing, when the model has no prediction.
pub fn estimate_q<M: Model + ?Sized>(
    q: &mut QTable,
    model: &M,
    cfg: &LearnerConfig,
    s: StateId,
    a: ActionId,
) -> Option<Backup> {
    let prediction = model.predict(s, a);
    if prediction.is_empty() {
        return None;
    }
    let value: f64 = prediction
        .next
        .iter()
        .map(|&(next, p)| p * (prediction.reward + cfg.gamma * q.state_value(next)))
        .sum();
    let old = q.read(s, a);
    q.write(s, a, value);
    Some(Backup {
        value,
        delta: (value - old).abs(),
    })
}

/// Greedy action with uniform random tie-breaking. The generator is only
/// consulted when there is more than one maximizer.
pub fn select_greedy<R: Rng + ?Sized>(q: &QTable, s: StateId, rng: &mut R) -> ActionId {
    let mut best = f64::NEG_INFINITY;
    let mut ties: SmallVec<[ActionId; 4]> = SmallVec::new();
    for a in (0..q.action_count()).map(ActionId) {
        let v = q.read(s, a);
        if v > best {
            best = v;
            ties.clear();
            ties.push(a);
        } else if v == best {
            ties.push(a);
        }
    }
    match ties.len() {
        1 => ties[0],
        n => ties[rng.gen_range(0..n)],
    }
}

//! Simulated exploration: random trajectory sampling through the model and
//! prioritized sweeping, optionally over parents the model only imagines.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rustc_hash::FxHashMap;

use crate::learning::{estimate_q, LearnerConfig, QTable};
use crate::model::{CombinedModel, Model, Prediction};
use crate::types::{ActionId, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrajectoryPlannerConfig {
    pub max_depth: usize,
    pub trajectories_per_step: usize,
}

impl TrajectoryPlannerConfig {
    pub fn new(max_depth: usize, trajectories_per_step: usize) -> TrajectoryPlannerConfig {
        assert!(max_depth >= 1 && trajectories_per_step >= 1);
        TrajectoryPlannerConfig {
            max_depth,
            trajectories_per_step,
        }
    }
}

fn choose_probable<R: Rng + ?Sized>(prediction: &Prediction, rng: &mut R) -> StateId {
    if let [(only, _)] = prediction.next.as_slice() {
        return *only;
    }
    let mut u: f64 = rng.gen();
    for &(s, p) in &prediction.next {
        if u < p {
            return s;
        }
        u -= p;
    }
    prediction.next[prediction.next.len() - 1].0
}

/// Samples one trajectory from `s0` with uniformly random actions, then
/// backs up the visited pairs in reverse order. Returns the number of
/// backups performed.
pub fn plan_along_trajectory<M, R>(
    q: &mut QTable,
    model: &M,
    learner: &LearnerConfig,
    cfg: &TrajectoryPlannerConfig,
    s0: StateId,
    rng: &mut R,
) -> usize
where
    M: Model + ?Sized,
    R: Rng + ?Sized,
{
    let path = sample_trajectory(q, model, learner, cfg, s0, rng);
    path.iter()
        .rev()
        .filter(|&&(s, a)| estimate_q(q, model, learner, s, a).is_some())
        .count()
}

/// The (state, action) pairs of one simulated trajectory, without backing
/// anything up.
pub fn sample_trajectory<M, R>(
    q: &QTable,
    model: &M,
    learner: &LearnerConfig,
    cfg: &TrajectoryPlannerConfig,
    s0: StateId,
    rng: &mut R,
) -> Vec<(StateId, ActionId)>
where
    M: Model + ?Sized,
    R: Rng + ?Sized,
{
    let mut path = Vec::with_capacity(cfg.max_depth);
    let mut s = s0;
    while path.len() < cfg.max_depth {
        if q.is_terminal(s) {
            break;
        }
        let a = ActionId(rng.gen_range(0..learner.action_count));
        let prediction = model.predict(s, a);
        if prediction.is_empty() {
            break;
        }
        path.push((s, a));
        let next = choose_probable(&prediction, rng);
        if next == s {
            break;
        }
        s = next;
    }
    path
}

/// Runs `trajectories_per_step` trajectories from `s0`.
pub fn run_trajectory_batch<M, R>(
    q: &mut QTable,
    model: &M,
    learner: &LearnerConfig,
    cfg: &TrajectoryPlannerConfig,
    s0: StateId,
    rng: &mut R,
) -> usize
where
    M: Model + ?Sized,
    R: Rng + ?Sized,
{
    (0..cfg.trajectories_per_step)
        .map(|_| plan_along_trajectory(q, model, learner, cfg, s0, rng))
        .sum()
}

/// Which parents a value change propagates to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// Only really observed predecessors.
    ExploredOnly,
    /// Everything the combined model proposes, including never-visited states.
    IncludeUnexplored,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    priority: f64,
    target: (StateId, ActionId),
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.target.cmp(&self.target))
    }
}

/// Max-priority queue of pending backups with one live entry per target.
///
/// Escalation pushes a fresh heap entry and leaves the old one behind; stale
/// heap entries are skipped on pop by checking them against the index.
#[derive(Clone, Debug)]
pub struct SweepQueue {
    heap: BinaryHeap<Entry>,
    index: FxHashMap<(StateId, ActionId), f64>,
    min_priority: f64,
    max_updates_per_step: usize,
    mode: SweepMode,
}

impl SweepQueue {
    pub const DEFAULT_MIN_PRIORITY: f64 = 1e-6;
    pub const DEFAULT_MAX_UPDATES: usize = 1000;

    pub fn new(mode: SweepMode, min_priority: f64, max_updates_per_step: usize) -> SweepQueue {
        assert!(min_priority >= 0.0 && max_updates_per_step >= 1);
        SweepQueue {
            heap: BinaryHeap::new(),
            index: FxHashMap::default(),
            min_priority,
            max_updates_per_step,
            mode,
        }
    }

    pub fn mode(&self) -> SweepMode {
        self.mode
    }

    pub fn min_priority(&self) -> f64 {
        self.min_priority
    }

    pub fn max_updates_per_step(&self) -> usize {
        self.max_updates_per_step
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn priority_of(&self, s: StateId, a: ActionId) -> Option<f64> {
        self.index.get(&(s, a)).copied()
    }

    /// Live entries, unordered.
    pub fn entries(&self) -> impl Iterator<Item = ((StateId, ActionId), f64)> + '_ {
        self.index.iter().map(|(&k, &v)| (k, v))
    }

    /// Inserts or escalates `target`. Priorities below the threshold (and
    /// zero priorities) are dropped. Returns whether the queue changed.
    pub fn push(&mut self, target: (StateId, ActionId), priority: f64) -> bool {
        if !(priority > 0.0) || priority < self.min_priority {
            return false;
        }
        match self.index.get(&target) {
            Some(&old) if old >= priority => false,
            _ => {
                self.index.insert(target, priority);
                self.heap.push(Entry { priority, target });
                true
            }
        }
    }

    pub fn pop(&mut self) -> Option<((StateId, ActionId), f64)> {
        while let Some(entry) = self.heap.pop() {
            if self.index.get(&entry.target) == Some(&entry.priority) {
                self.index.remove(&entry.target);
                return Some((entry.target, entry.priority));
            }
        }
        None
    }

    /// Schedules the parents of `s` with the size of its value change.
    pub fn enqueue_parents(&mut self, model: &CombinedModel, s: StateId, delta: f64) {
        if !(delta > 0.0) || delta < self.min_priority {
            return;
        }
        let parents = match self.mode {
            SweepMode::ExploredOnly => model.explored_parents(s),
            SweepMode::IncludeUnexplored => model.get_parents(s),
        };
        for parent in parents {
            self.push(parent, delta);
        }
    }

    /// Performs up to `max_updates_per_step` backups in priority order.
    pub fn sweep(&mut self, q: &mut QTable, model: &CombinedModel, learner: &LearnerConfig) -> usize {
        self.sweep_up_to(q, model, learner, self.max_updates_per_step)
    }

    /// Sweeps until the queue is empty or `limit` backups were done.
    pub fn sweep_up_to(
        &mut self,
        q: &mut QTable,
        model: &CombinedModel,
        learner: &LearnerConfig,
        limit: usize,
    ) -> usize {
        let mut backups = 0;
        while backups < limit {
            let Some(((s, a), _)) = self.pop() else {
                break;
            };
            if q.is_terminal(s) {
                continue;
            }
            backups += 1;
            if let Some(backup) = estimate_q(q, model, learner, s, a) {
                self.enqueue_parents(model, s, backup.delta);
            }
        }
        backups
    }
}

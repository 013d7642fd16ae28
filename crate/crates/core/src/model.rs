//! Approximate environment models.
//!
//! An [`ObservationModel`] replays exactly what was seen. A
//! [`RecentEffectModel`] assumes every action keeps doing what it last did,
//! which makes it optimistic about unexplored states (it never learns walls).
//! [`CombinedModel`] asks models in decreasing order of accuracy.

use rustc_hash::FxHashMap;
use smallvec::{smallvec, SmallVec};

use crate::types::{ActionId, StateId};

/// Predicted next-state distribution and reward. An empty distribution means
/// the model knows nothing about the transition.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub next: SmallVec<[(StateId, f64); 2]>,
    pub reward: f64,
}

impl Prediction {
    pub fn empty() -> Prediction {
        Prediction {
            next: SmallVec::new(),
            reward: 0.0,
        }
    }

    pub fn certain(next: StateId, reward: f64) -> Prediction {
        Prediction {
            next: smallvec![(next, 1.0)],
            reward,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.next.is_empty()
    }

    pub fn probability_of(&self, s: StateId) -> f64 {
        self.next
            .iter()
            .filter(|(n, _)| *n == s)
            .map(|(_, p)| p)
            .sum()
    }
}

pub trait Model: Send {
    fn predict(&self, s: StateId, a: ActionId) -> Prediction;

    fn learn(&mut self, s: StateId, a: ActionId, r: f64, next: StateId);

    /// Candidate (state, action) pairs that this model believes lead to `s`.
    fn parents(&self, s: StateId) -> Vec<(StateId, ActionId)>;
}

/// Frequency counts of really observed outcomes.
#[derive(Clone, Debug, Default)]
pub struct ObservationModel {
    counts: FxHashMap<(StateId, ActionId), SmallVec<[(StateId, u32); 2]>>,
    rewards: FxHashMap<(StateId, ActionId), f64>,
    predecessors: FxHashMap<StateId, Vec<(StateId, ActionId)>>,
}

impl ObservationModel {
    pub fn new() -> ObservationModel {
        ObservationModel::default()
    }

    pub fn knows(&self, s: StateId, a: ActionId) -> bool {
        self.counts.contains_key(&(s, a))
    }

    /// Every (state, action) pair learned so far, in no particular order.
    pub fn known_pairs(&self) -> impl Iterator<Item = (StateId, ActionId)> + '_ {
        self.counts.keys().copied()
    }
}

impl Model for ObservationModel {
    fn predict(&self, s: StateId, a: ActionId) -> Prediction {
        let Some(outcomes) = self.counts.get(&(s, a)) else {
            return Prediction::empty();
        };
        let total: u32 = outcomes.iter().map(|(_, c)| c).sum();
        Prediction {
            next: outcomes
                .iter()
                .map(|&(n, c)| (n, f64::from(c) / f64::from(total)))
                .collect(),
            reward: self.rewards[&(s, a)],
        }
    }

    fn learn(&mut self, s: StateId, a: ActionId, r: f64, next: StateId) {
        let outcomes = self.counts.entry((s, a)).or_default();
        match outcomes.iter_mut().find(|(n, _)| *n == next) {
            Some((_, count)) => *count += 1,
            None => outcomes.push((next, 1)),
        }
        self.rewards.insert((s, a), r);
        let preds = self.predecessors.entry(next).or_default();
        if !preds.contains(&(s, a)) {
            preds.push((s, a));
        }
    }

    fn parents(&self, s: StateId) -> Vec<(StateId, ActionId)> {
        self.predecessors.get(&s).cloned().unwrap_or_default()
    }
}

/// Remembers the last non-zero state-id increment of each action and
/// predicts that the action has the same effect everywhere.
#[derive(Clone, Debug)]
pub struct RecentEffectModel {
    increments: Vec<Option<i64>>,
    initial_r: f64,
    terminal: StateId,
}

impl RecentEffectModel {
    pub fn new(action_count: usize, terminal: StateId) -> RecentEffectModel {
        RecentEffectModel::with_reward(action_count, terminal, 0.0)
    }

    pub fn with_reward(action_count: usize, terminal: StateId, initial_r: f64) -> RecentEffectModel {
        RecentEffectModel {
            increments: vec![None; action_count],
            initial_r,
            terminal,
        }
    }

    pub fn increment(&self, a: ActionId) -> Option<i64> {
        self.increments[a.index()]
    }
}

impl Model for RecentEffectModel {
    fn predict(&self, s: StateId, a: ActionId) -> Prediction {
        match self.increments[a.index()] {
            Some(inc) => Prediction::certain(s.offset(inc), self.initial_r),
            None => Prediction::empty(),
        }
    }

    fn learn(&mut self, s: StateId, a: ActionId, _r: f64, next: StateId) {
        if next == self.terminal {
            return;
        }
        // Walls are never learned; the model stays optimistic.
        let increment = next.0 - s.0;
        if increment != 0 {
            self.increments[a.index()] = Some(increment);
        }
    }

    fn parents(&self, s: StateId) -> Vec<(StateId, ActionId)> {
        self.increments
            .iter()
            .enumerate()
            .filter_map(|(a, inc)| inc.map(|inc| (s.offset(-inc), ActionId(a))))
            .collect()
    }
}

/// True unless the first model (in accuracy order) that knows `(p, a)`
/// predicts that `s` cannot follow.
pub fn is_possible_transition(
    p: StateId,
    s: StateId,
    a: ActionId,
    models: &[Box<dyn Model>],
) -> bool {
    models
        .iter()
        .map(|m| m.predict(p, a))
        .find(|pred| !pred.is_empty())
        .is_none_or(|pred| pred.probability_of(s) > 0.0)
}

/// Accuracy-ordered fallback chain of models.
pub struct CombinedModel {
    models: Vec<Box<dyn Model>>,
}

impl CombinedModel {
    /// `models` must be ordered from most to least accurate.
    pub fn new(models: Vec<Box<dyn Model>>) -> CombinedModel {
        assert!(!models.is_empty(), "a combined model needs at least one model");
        CombinedModel { models }
    }

    /// The observation model backed by the recent-effect model.
    pub fn standard(action_count: usize, terminal: StateId) -> CombinedModel {
        CombinedModel::new(vec![
            Box::new(ObservationModel::new()),
            Box::new(RecentEffectModel::new(action_count, terminal)),
        ])
    }

    pub fn models(&self) -> &[Box<dyn Model>] {
        &self.models
    }

    /// Parents known to the most accurate model, i.e. really observed ones.
    pub fn explored_parents(&self, s: StateId) -> Vec<(StateId, ActionId)> {
        self.models[0].parents(s)
    }

    /// Parents proposed by every model, least accurate first, each kept only
    /// if no more accurate model contradicts it.
    pub fn get_parents(&self, s: StateId) -> Vec<(StateId, ActionId)> {
        let mut parents = Vec::new();
        for (i, model) in self.models.iter().enumerate().rev() {
            for (p, a) in model.parents(s) {
                if is_possible_transition(p, s, a, &self.models[..i]) && !parents.contains(&(p, a))
                {
                    parents.push((p, a));
                }
            }
        }
        parents
    }
}

impl Model for CombinedModel {
    fn predict(&self, s: StateId, a: ActionId) -> Prediction {
        self.models
            .iter()
            .map(|m| m.predict(s, a))
            .find(|pred| !pred.is_empty())
            .unwrap_or_else(Prediction::empty)
    }

    fn learn(&mut self, s: StateId, a: ActionId, r: f64, next: StateId) {
        for model in &mut self.models {
            model.learn(s, a, r, next);
        }
    }

    fn parents(&self, s: StateId) -> Vec<(StateId, ActionId)> {
        self.get_parents(s)
    }
}

//! Reference implementations used as test oracles. They work on raw map text
//! and plain transition tables so they share no code with the crate.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use simex_core::env::{EnvError, Environment, Transition};
use simex_core::{ActionId, GridMap, StateId};

pub const MOVES: [(i64, i64); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

/// Character grid with start and goal coordinates.
pub struct RawMaze {
    pub rows: Vec<Vec<char>>,
    pub start: (i64, i64),
    pub goal: (i64, i64),
}

impl RawMaze {
    pub fn new(text: &str) -> RawMaze {
        let rows: Vec<Vec<char>> = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim_end().chars().collect())
            .collect();
        let find = |target: char| {
            rows.iter()
                .enumerate()
                .find_map(|(r, row)| row.iter().position(|&c| c == target).map(|c| (r as i64, c as i64)))
                .expect("marker present")
        };
        let (start, goal) = (find('S'), find('G'));
        RawMaze { rows, start, goal }
    }

    pub fn width(&self) -> i64 {
        self.rows[0].len() as i64
    }

    pub fn height(&self) -> i64 {
        self.rows.len() as i64
    }

    pub fn free(&self, r: i64, c: i64) -> bool {
        r >= 0 && c >= 0 && r < self.height() && c < self.width() && self.rows[r as usize][c as usize] != '#'
    }

    pub fn free_count(&self) -> usize {
        self.rows.iter().flatten().filter(|&&c| c != '#').count()
    }

    pub fn id(&self, r: i64, c: i64) -> StateId {
        StateId(r * self.width() + c)
    }

    pub fn terminal(&self) -> StateId {
        StateId(self.width() * self.height())
    }

    /// Where `a` leads from a free cell, with the goal collapsed to the
    /// terminal id.
    pub fn next(&self, r: i64, c: i64, a: usize) -> (StateId, f64) {
        let (nr, nc) = (r + MOVES[a].0, c + MOVES[a].1);
        if !self.free(nr, nc) {
            (self.id(r, c), 0.0)
        } else if (nr, nc) == self.goal {
            (self.terminal(), 1.0)
        } else {
            (self.id(nr, nc), 0.0)
        }
    }

    /// Breadth-first distance from start to goal.
    pub fn bfs_length(&self) -> usize {
        let mut dist = HashMap::new();
        dist.insert(self.start, 0usize);
        let mut queue = VecDeque::from([self.start]);
        while let Some((r, c)) = queue.pop_front() {
            let d = dist[&(r, c)];
            if (r, c) == self.goal {
                return d;
            }
            for (dr, dc) in MOVES {
                let n = (r + dr, c + dc);
                if self.free(n.0, n.1) && !dist.contains_key(&n) {
                    dist.insert(n, d + 1);
                    queue.push_back(n);
                }
            }
        }
        panic!("goal unreachable");
    }

    /// Every free non-goal cell's transitions.
    pub fn transitions(&self) -> Transitions {
        let mut t = Transitions::default();
        for r in 0..self.height() {
            for c in 0..self.width() {
                if self.free(r, c) && (r, c) != self.goal {
                    for a in 0..4 {
                        let (next, reward) = self.next(r, c, a);
                        t.insert(self.id(r, c), a, next, reward);
                    }
                }
            }
        }
        t
    }
}

/// Deterministic transition table: (state, action) -> (next, reward).
#[derive(Clone, Debug, Default)]
pub struct Transitions {
    pub table: HashMap<(StateId, usize), (StateId, f64)>,
}

impl Transitions {
    pub fn insert(&mut self, s: StateId, a: usize, next: StateId, r: f64) {
        self.table.insert((s, a), (next, r));
    }

    /// Value iteration on the induced MDP. Actions missing from the table
    /// contribute `default_q`; `terminal` has value zero.
    pub fn value_iteration(
        &self,
        gamma: f64,
        default_q: f64,
        terminal: StateId,
        actions: usize,
    ) -> HashMap<(StateId, usize), f64> {
        let mut q: HashMap<(StateId, usize), f64> = self.table.keys().map(|&k| (k, default_q)).collect();
        let value = |q: &HashMap<(StateId, usize), f64>, s: StateId| {
            if s == terminal {
                return 0.0;
            }
            (0..actions)
                .map(|a| q.get(&(s, a)).copied().unwrap_or(default_q))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        for _ in 0..100_000 {
            let mut change = 0.0f64;
            let snapshot = q.clone();
            for (&(s, a), &(next, r)) in &self.table {
                let v = r + gamma * value(&snapshot, next);
                change = change.max((v - snapshot[&(s, a)]).abs());
                q.insert((s, a), v);
            }
            if change < 1e-15 {
                return q;
            }
        }
        panic!("value iteration did not converge");
    }
}

/// Environment wrapper that counts real steps.
pub struct CountingEnv {
    pub inner: GridMap,
    pub steps: usize,
}

impl CountingEnv {
    pub fn new(inner: GridMap) -> CountingEnv {
        CountingEnv { inner, steps: 0 }
    }
}

impl Environment for CountingEnv {
    fn action_count(&self) -> usize {
        self.inner.action_count()
    }

    fn start(&self) -> StateId {
        self.inner.start()
    }

    fn is_terminal(&self, s: StateId) -> bool {
        self.inner.is_terminal(s)
    }

    fn step(&mut self, s: StateId, a: ActionId) -> Result<Transition, EnvError> {
        self.steps += 1;
        self.inner.step(s, a)
    }
}

/// A 1xN corridor text with the start at the left and the goal at the right.
pub fn corridor(len: usize) -> String {
    assert!(len >= 2);
    format!("S{}G\n", ".".repeat(len - 2))
}

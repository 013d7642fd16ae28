//! Deterministic grid-world environment.
//!
//! Maps are plain ASCII: `#` wall, `.` free, `S` start, `G` goal. States are
//! row-major cell ids; entering the goal cell moves the agent to a dedicated
//! terminal id one past the last cell.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::types::{ActionId, StateId};

pub const NORTH: ActionId = ActionId(0);
pub const EAST: ActionId = ActionId(1);
pub const SOUTH: ActionId = ActionId(2);
pub const WEST: ActionId = ActionId(3);

pub const ACTION_COUNT: usize = 4;
pub const ACTION_NAMES: [&str; ACTION_COUNT] = ["North", "East", "South", "West"];
const ACTION_LETTERS: [char; ACTION_COUNT] = ['N', 'E', 'S', 'W'];

/// Reward for entering the goal. Every other transition pays zero.
pub const GOAL_REWARD: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvError {
    #[error("malformed map: {0}")]
    MalformedMap(String),
    #[error("goal is unreachable from start")]
    UnreachableGoal,
    #[error("cannot step from the terminal state")]
    TerminalState,
    #[error("state {0} is not a free cell of this map")]
    InvalidState(StateId),
    #[error("action {0} out of range")]
    InvalidAction(ActionId),
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("path does not end at the goal: {0}")]
    PathMissesGoal(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    Wall,
    Free,
}

/// Outcome of one real environment step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub next: StateId,
    pub reward: f64,
    pub terminal: bool,
}

/// Anything an agent can really act in.
pub trait Environment {
    fn action_count(&self) -> usize;
    fn start(&self) -> StateId;
    fn is_terminal(&self, s: StateId) -> bool;
    fn step(&mut self, s: StateId, a: ActionId) -> Result<Transition, EnvError>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    start: (usize, usize),
    goal: (usize, usize),
}

impl GridMap {
    /// Builds a map from parts, verifying the start/goal and connectivity invariants.
    pub fn new(
        width: usize,
        height: usize,
        cells: Vec<Cell>,
        start: (usize, usize),
        goal: (usize, usize),
    ) -> Result<GridMap, EnvError> {
        if width == 0 || height == 0 {
            return Err(EnvError::MalformedMap("empty map".into()));
        }
        if cells.len() != width * height {
            return Err(EnvError::MalformedMap(format!(
                "expected {} cells, got {}",
                width * height,
                cells.len()
            )));
        }
        let map = GridMap {
            width,
            height,
            cells,
            start,
            goal,
        };
        for (name, (row, col)) in [("start", start), ("goal", goal)] {
            if row >= height || col >= width || map.cell(row, col) != Cell::Free {
                return Err(EnvError::MalformedMap(format!("{name} is not a free cell")));
            }
        }
        if start == goal {
            return Err(EnvError::MalformedMap("start and goal coincide".into()));
        }
        if map.distances_to_goal()[map.index(start.0, start.1)].is_none() {
            return Err(EnvError::UnreachableGoal);
        }
        Ok(map)
    }

    /// Parses the ASCII map format.
    pub fn parse(text: &str) -> Result<GridMap, EnvError> {
        let rows: Vec<&str> = text
            .lines()
            .map(|line| line.trim_end_matches('\r'))
            .collect::<Vec<_>>();
        let rows: Vec<&str> = {
            let mut end = rows.len();
            while end > 0 && rows[end - 1].is_empty() {
                end -= 1;
            }
            rows[..end].to_vec()
        };
        if rows.is_empty() {
            return Err(EnvError::MalformedMap("empty map".into()));
        }
        let width = rows[0].chars().count();
        let height = rows.len();
        let mut cells = Vec::with_capacity(width * height);
        let mut start = None;
        let mut goal = None;
        for (row, line) in rows.iter().enumerate() {
            if line.chars().count() != width {
                return Err(EnvError::MalformedMap(format!(
                    "row {row} has length {}, expected {width}",
                    line.chars().count()
                )));
            }
            for (col, ch) in line.chars().enumerate() {
                let cell = match ch {
                    '#' => Cell::Wall,
                    '.' => Cell::Free,
                    'S' => {
                        if start.replace((row, col)).is_some() {
                            return Err(EnvError::MalformedMap("more than one S".into()));
                        }
                        Cell::Free
                    }
                    'G' => {
                        if goal.replace((row, col)).is_some() {
                            return Err(EnvError::MalformedMap("more than one G".into()));
                        }
                        Cell::Free
                    }
                    other => {
                        return Err(EnvError::MalformedMap(format!(
                            "unexpected character {other:?} at row {row}, column {col}"
                        )))
                    }
                };
                cells.push(cell);
            }
        }
        let start = start.ok_or_else(|| EnvError::MalformedMap("no S".into()))?;
        let goal = goal.ok_or_else(|| EnvError::MalformedMap("no G".into()))?;
        GridMap::new(width, height, cells, start, goal)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start_cell(&self) -> (usize, usize) {
        self.start
    }

    pub fn goal_cell(&self) -> (usize, usize) {
        self.goal
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.cells[self.index(row, col)]
    }

    pub fn free_cell_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Cell::Free).count()
    }

    pub fn encode(&self, row: usize, col: usize) -> StateId {
        StateId(self.index(row, col) as i64)
    }

    /// Cell coordinates of a non-terminal, in-range state id.
    pub fn decode(&self, s: StateId) -> Option<(usize, usize)> {
        if s.0 < 0 || s.0 >= (self.width * self.height) as i64 {
            return None;
        }
        let i = s.0 as usize;
        Some((i / self.width, i % self.width))
    }

    pub fn terminal(&self) -> StateId {
        StateId((self.width * self.height) as i64)
    }

    pub fn start_state(&self) -> StateId {
        self.encode(self.start.0, self.start.1)
    }

    /// State-id increment that each action produces on an unobstructed move.
    pub fn increment(&self, a: ActionId) -> i64 {
        match a {
            NORTH => -(self.width as i64),
            EAST => 1,
            SOUTH => self.width as i64,
            _ => -1,
        }
    }

    /// Pure transition function.
    pub fn transition(&self, s: StateId, a: ActionId) -> Result<Transition, EnvError> {
        if s == self.terminal() {
            return Err(EnvError::TerminalState);
        }
        if a.index() >= ACTION_COUNT {
            return Err(EnvError::InvalidAction(a));
        }
        let (row, col) = self
            .decode(s)
            .filter(|&(r, c)| self.cell(r, c) == Cell::Free)
            .ok_or(EnvError::InvalidState(s))?;
        let blocked = Transition {
            next: s,
            reward: 0.0,
            terminal: false,
        };
        let Some((nr, nc)) = self.neighbor(row, col, a) else {
            return Ok(blocked);
        };
        if self.cell(nr, nc) == Cell::Wall {
            return Ok(blocked);
        }
        if (nr, nc) == self.goal {
            return Ok(Transition {
                next: self.terminal(),
                reward: GOAL_REWARD,
                terminal: true,
            });
        }
        Ok(Transition {
            next: self.encode(nr, nc),
            reward: 0.0,
            terminal: false,
        })
    }

    /// Length of the shortest action sequence from start to goal.
    pub fn shortest_path_length(&self) -> usize {
        self.distances_to_goal()[self.index(self.start.0, self.start.1)]
            .expect("connectivity is checked at construction")
    }

    /// BFS distance (in actions) from every cell to the goal; `None` for walls
    /// and cells cut off from the goal.
    pub fn distances_to_goal(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.cells.len()];
        let mut queue = VecDeque::new();
        dist[self.index(self.goal.0, self.goal.1)] = Some(0);
        queue.push_back(self.goal);
        while let Some((row, col)) = queue.pop_front() {
            let d = dist[self.index(row, col)].unwrap();
            for a in 0..ACTION_COUNT {
                if let Some((nr, nc)) = self.neighbor(row, col, ActionId(a)) {
                    let i = self.index(nr, nc);
                    if self.cells[i] == Cell::Free && dist[i].is_none() {
                        dist[i] = Some(d + 1);
                        queue.push_back((nr, nc));
                    }
                }
            }
        }
        dist
    }

    fn neighbor(&self, row: usize, col: usize, a: ActionId) -> Option<(usize, usize)> {
        match a {
            NORTH if row > 0 => Some((row - 1, col)),
            EAST if col + 1 < self.width => Some((row, col + 1)),
            SOUTH if row + 1 < self.height => Some((row + 1, col)),
            WEST if col > 0 => Some((row, col - 1)),
            _ => None,
        }
    }

    fn index(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }
}

impl fmt::Display for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in 0..self.height {
            for col in 0..self.width {
                let ch = if (row, col) == self.start {
                    'S'
                } else if (row, col) == self.goal {
                    'G'
                } else if self.cell(row, col) == Cell::Wall {
                    '#'
                } else {
                    '.'
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl Environment for GridMap {
    fn action_count(&self) -> usize {
        ACTION_COUNT
    }

    fn start(&self) -> StateId {
        self.start_state()
    }

    fn is_terminal(&self, s: StateId) -> bool {
        s == self.terminal()
    }

    fn step(&mut self, s: StateId, a: ActionId) -> Result<Transition, EnvError> {
        self.transition(s, a)
    }
}

/// Forced action sequence replayed from the start before exploration begins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialPath {
    actions: Vec<ActionId>,
}

impl InitialPath {
    /// Parses a single line of `N`/`E`/`S`/`W` letters.
    pub fn parse(text: &str) -> Result<InitialPath, EnvError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let line = lines
            .next()
            .ok_or_else(|| EnvError::MalformedPath("empty path".into()))?;
        if lines.next().is_some() {
            return Err(EnvError::MalformedPath("expected a single line".into()));
        }
        let actions = line
            .chars()
            .map(|ch| {
                ACTION_LETTERS
                    .iter()
                    .position(|&l| l == ch)
                    .map(ActionId)
                    .ok_or_else(|| EnvError::MalformedPath(format!("unexpected character {ch:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(InitialPath { actions })
    }

    /// Parses and checks that replaying the path from start ends at the goal.
    pub fn load(text: &str, map: &GridMap) -> Result<InitialPath, EnvError> {
        let path = InitialPath::parse(text)?;
        path.validate(map)?;
        Ok(path)
    }

    pub fn from_actions(actions: Vec<ActionId>) -> InitialPath {
        InitialPath { actions }
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn validate(&self, map: &GridMap) -> Result<(), EnvError> {
        let mut s = map.start_state();
        for (i, &a) in self.actions.iter().enumerate() {
            if s == map.terminal() {
                return Err(EnvError::PathMissesGoal(format!(
                    "goal reached after {i} of {} actions",
                    self.actions.len()
                )));
            }
            s = map.transition(s, a)?.next;
        }
        if s != map.terminal() {
            return Err(EnvError::PathMissesGoal(format!("path ends in state {s}")));
        }
        Ok(())
    }

    /// Actions that never occur in the path. A non-empty result leaves the
    /// recent-effect model blind in those directions.
    pub fn missing_actions(&self, action_count: usize) -> Vec<ActionId> {
        (0..action_count)
            .map(ActionId)
            .filter(|a| !self.actions.contains(a))
            .collect()
    }
}

impl fmt::Display for InitialPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.actions {
            write!(f, "{}", ACTION_LETTERS[a.index()])?;
        }
        Ok(())
    }
}

//! Seeded maze generation and waypoint routing for authoring initial paths.

use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::env::{Cell, EnvError, GridMap, InitialPath, ACTION_COUNT};
use crate::types::ActionId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MazeGenError {
    #[error("cannot reach {target} free cells on a {width}x{height} grid")]
    Infeasible {
        width: usize,
        height: usize,
        target: usize,
    },
    #[error("gave up after {0} wall placement attempts")]
    Exhausted(usize),
    #[error("barrier from {0:?} to {1:?} is not a straight in-bounds segment")]
    BadBarrier((usize, usize), (usize, usize)),
    #[error("waypoint ({0}, {1}) is not a free cell")]
    BadWaypoint(usize, usize),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Parameters for a grid of free space broken up by straight wall segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MazeSpec {
    pub width: usize,
    pub height: usize,
    pub free_cells: usize,
    pub start: (usize, usize),
    pub goal: (usize, usize),
    pub min_segment: usize,
    pub max_segment: usize,
    /// Fixed wall segments drawn before any random ones, as inclusive
    /// `(from, to)` cell pairs sharing a row or a column.
    pub barriers: Vec<((usize, usize), (usize, usize))>,
    pub seed: u64,
}

const MAX_ATTEMPTS: usize = 200_000;

/// Places random horizontal and vertical wall segments until exactly
/// `free_cells` cells remain free, keeping all free cells connected.
pub fn generate(spec: &MazeSpec) -> Result<GridMap, MazeGenError> {
    let (w, h) = (spec.width, spec.height);
    if spec.free_cells < 2 || spec.free_cells > w * h {
        return Err(MazeGenError::Infeasible {
            width: w,
            height: h,
            target: spec.free_cells,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut cells = vec![Cell::Free; w * h];
    let mut free = w * h;
    let protected = |r: usize, c: usize| (r, c) == spec.start || (r, c) == spec.goal;

    for &(from, to) in &spec.barriers {
        let ((r0, c0), (r1, c1)) = (from.min(to), from.max(to));
        if (r0 != r1 && c0 != c1) || r1 >= h || c1.max(c0) >= w {
            return Err(MazeGenError::BadBarrier(from, to));
        }
        for r in r0..=r1 {
            for c in c0.min(c1)..=c0.max(c1) {
                if !protected(r, c) && cells[r * w + c] == Cell::Free {
                    cells[r * w + c] = Cell::Wall;
                    free -= 1;
                }
            }
        }
    }
    if free < spec.free_cells || connected_free_count(&cells, w, h, spec.start) != free {
        return Err(MazeGenError::Infeasible {
            width: w,
            height: h,
            target: spec.free_cells,
        });
    }

    let mut attempts = 0;
    while free > spec.free_cells {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(MazeGenError::Exhausted(MAX_ATTEMPTS));
        }
        let excess = free - spec.free_cells;
        let len = if excess < spec.min_segment {
            excess
        } else {
            rng.gen_range(spec.min_segment..=spec.max_segment.min(excess).max(spec.min_segment))
        };
        let horizontal = rng.gen_bool(0.5);
        let (r0, c0) = (rng.gen_range(0..h), rng.gen_range(0..w));
        let segment: Vec<usize> = (0..len)
            .map(|i| if horizontal { (r0, c0 + i) } else { (r0 + i, c0) })
            .filter(|&(r, c)| r < h && c < w && !protected(r, c))
            .map(|(r, c)| r * w + c)
            .filter(|&i| cells[i] == Cell::Free)
            .collect();
        if segment.is_empty() || segment.len() > excess {
            continue;
        }
        for &i in &segment {
            cells[i] = Cell::Wall;
        }
        if connected_free_count(&cells, w, h, spec.start) == free - segment.len() {
            free -= segment.len();
        } else {
            for &i in &segment {
                cells[i] = Cell::Free;
            }
        }
    }
    Ok(GridMap::new(w, h, cells, spec.start, spec.goal)?)
}

fn connected_free_count(cells: &[Cell], w: usize, h: usize, from: (usize, usize)) -> usize {
    let mut seen = vec![false; cells.len()];
    let mut queue = VecDeque::from([from]);
    seen[from.0 * w + from.1] = true;
    let mut count = 0;
    while let Some((r, c)) = queue.pop_front() {
        count += 1;
        let neighbors = [
            (r.wrapping_sub(1), c),
            (r, c + 1),
            (r + 1, c),
            (r, c.wrapping_sub(1)),
        ];
        for (nr, nc) in neighbors {
            if nr < h && nc < w {
                let i = nr * w + nc;
                if !seen[i] && cells[i] == Cell::Free {
                    seen[i] = true;
                    queue.push_back((nr, nc));
                }
            }
        }
    }
    count
}

/// Shortest action sequence between two free cells (ties broken in
/// North, East, South, West order).
pub fn shortest_route(
    map: &GridMap,
    from: (usize, usize),
    to: (usize, usize),
) -> Result<Vec<ActionId>, MazeGenError> {
    for (r, c) in [from, to] {
        if r >= map.height() || c >= map.width() || map.cell(r, c) != Cell::Free {
            return Err(MazeGenError::BadWaypoint(r, c));
        }
    }
    let w = map.width();
    let mut came_from: Vec<Option<(usize, ActionId)>> = vec![None; w * map.height()];
    let mut seen = vec![false; w * map.height()];
    let mut queue = VecDeque::from([from]);
    seen[from.0 * w + from.1] = true;
    while let Some((r, c)) = queue.pop_front() {
        if (r, c) == to {
            break;
        }
        for a in (0..ACTION_COUNT).map(ActionId) {
            let (nr, nc) = match a.index() {
                0 if r > 0 => (r - 1, c),
                1 if c + 1 < w => (r, c + 1),
                2 if r + 1 < map.height() => (r + 1, c),
                3 if c > 0 => (r, c - 1),
                _ => continue,
            };
            let i = nr * w + nc;
            if !seen[i] && map.cell(nr, nc) == Cell::Free {
                seen[i] = true;
                came_from[i] = Some((r * w + c, a));
                queue.push_back((nr, nc));
            }
        }
    }
    let mut actions = Vec::new();
    let mut i = to.0 * w + to.1;
    while let Some((prev, a)) = came_from[i] {
        actions.push(a);
        i = prev;
    }
    actions.reverse();
    Ok(actions)
}

/// Path from the start through each waypoint in turn to the goal, using the
/// shortest route for every leg.
pub fn route_through(map: &GridMap, waypoints: &[(usize, usize)]) -> Result<InitialPath, MazeGenError> {
    let mut stops = vec![map.start_cell()];
    stops.extend_from_slice(waypoints);
    stops.push(map.goal_cell());
    let mut actions = Vec::new();
    for leg in stops.windows(2) {
        actions.extend(shortest_route(map, leg[0], leg[1])?);
    }
    let path = InitialPath::from_actions(actions);
    path.validate(map)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(seed: u64) -> MazeSpec {
        MazeSpec {
            width: 20,
            height: 12,
            free_cells: 200,
            start: (0, 19),
            goal: (11, 0),
            min_segment: 2,
            max_segment: 6,
            barriers: vec![((4, 3), (4, 19))],
            seed,
        }
    }

    #[test]
    fn hits_exact_free_count_and_stays_connected() {
        for seed in 0..5 {
            let map = generate(&spec(seed)).unwrap();
            assert_eq!(map.free_cell_count(), 200);
            let reachable = map.distances_to_goal().iter().filter(|d| d.is_some()).count();
            assert_eq!(reachable, 200);
        }
    }

    #[test]
    fn generation_is_seeded() {
        assert_eq!(generate(&spec(3)).unwrap(), generate(&spec(3)).unwrap());
        assert_ne!(generate(&spec(3)).unwrap(), generate(&spec(4)).unwrap());
    }

    #[test]
    fn barriers_are_drawn_first() {
        let map = generate(&spec(2)).unwrap();
        for c in 3..19 {
            assert_eq!(map.cell(4, c), Cell::Wall);
        }
    }

    #[test]
    fn rejects_impossible_targets() {
        let mut s = spec(0);
        s.free_cells = 10_000;
        assert!(matches!(generate(&s), Err(MazeGenError::Infeasible { .. })));
        let mut s = spec(0);
        s.barriers = vec![((0, 0), (3, 3))];
        assert!(matches!(generate(&s), Err(MazeGenError::BadBarrier(..))));
    }

    #[test]
    fn routes_are_shortest_per_leg() {
        let map = generate(&spec(1)).unwrap();
        let direct = route_through(&map, &[]).unwrap();
        assert_eq!(direct.len(), map.shortest_path_length());
        let start = map.start_cell();
        let detour = route_through(&map, &[(start.0, start.1)]).unwrap();
        assert_eq!(detour.len(), direct.len());
    }
}

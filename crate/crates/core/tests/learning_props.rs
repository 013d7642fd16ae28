mod common;

use approx::assert_abs_diff_eq;
use common::{corridor, RawMaze, Transitions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use simex_core::env::{EAST, WEST};
use simex_core::learning::{estimate_q, select_greedy};
use simex_core::mazegen::{generate, MazeSpec};
use simex_core::{ActionId, LearnerConfig, Model, ObservationModel, QTable, StateId};

fn learn_all(t: &Transitions) -> ObservationModel {
    let mut obs = ObservationModel::new();
    for (&(s, a), &(next, r)) in &t.table {
        obs.learn(s, ActionId(a), r, next);
    }
    obs
}

/// Repeats full backups over every known pair until nothing moves.
fn backup_to_fixpoint(q: &mut QTable, model: &ObservationModel, cfg: &LearnerConfig, pairs: &[(StateId, usize)]) {
    for _ in 0..10_000 {
        let mut biggest = 0.0f64;
        for &(s, a) in pairs {
            let b = estimate_q(q, model, cfg, s, ActionId(a)).unwrap();
            biggest = biggest.max(b.delta);
        }
        if biggest < 1e-15 {
            return;
        }
    }
    panic!("backups did not settle");
}

#[test]
fn corridor_start_value() {
    let raw = RawMaze::new(&corridor(5));
    let t = raw.transitions();
    let model = learn_all(&t);
    let cfg = LearnerConfig::new(0.9, 4).unwrap();
    let mut q = QTable::new(4, 1e-32, raw.terminal());
    let mut pairs: Vec<_> = t.table.keys().copied().collect();
    pairs.sort();
    backup_to_fixpoint(&mut q, &model, &cfg, &pairs);
    assert_abs_diff_eq!(q.read(raw.id(0, 0), EAST), 0.729, epsilon = 1e-12);
    assert_abs_diff_eq!(q.read(raw.id(0, 3), EAST), 1.0, epsilon = 1e-12);
}

proptest! {
    #[test]
    fn backups_converge_to_value_iteration(
        seed in 0u64..1000,
        keep in prop::collection::vec(any::<bool>(), 200),
        gamma in 0.5f64..0.99,
    ) {
        let map = generate(&MazeSpec {
            width: 6,
            height: 5,
            free_cells: 24,
            start: (0, 0),
            goal: (4, 5),
            min_segment: 1,
            max_segment: 2,
            barriers: Vec::new(),
            seed,
        })
        .unwrap();
        let raw = RawMaze::new(&map.to_string());
        let full = raw.transitions();
        let mut known = Transitions::default();
        let mut entries: Vec<_> = full.table.iter().collect();
        entries.sort_by_key(|(k, _)| **k);
        for (i, (&(s, a), &(next, r))) in entries.into_iter().enumerate() {
            if keep[i % keep.len()] {
                known.insert(s, a, next, r);
            }
        }
        let model = learn_all(&known);
        let cfg = LearnerConfig::new(gamma, 4).unwrap();
        let mut q = QTable::new(4, 0.0, raw.terminal());
        let mut pairs: Vec<_> = known.table.keys().copied().collect();
        pairs.sort();
        backup_to_fixpoint(&mut q, &model, &cfg, &pairs);
        let oracle = known.value_iteration(gamma, 0.0, raw.terminal(), 4);
        for (&(s, a), &v) in &oracle {
            prop_assert!((q.read(s, ActionId(a)) - v).abs() < 1e-9, "({s},{a}): {} vs {v}", q.read(s, ActionId(a)));
        }
    }

    #[test]
    fn tie_set_survives_constant_shift(
        values in prop::collection::vec(0i32..4, 4),
        shift in -8i32..8,
        seed in any::<u64>(),
    ) {
        let s = StateId(0);
        let tie_set = |offset: i32| {
            let mut q = QTable::new(4, 0.0, StateId(1));
            for (a, &v) in values.iter().enumerate() {
                q.write(s, ActionId(a), f64::from(v + offset) * 0.125);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut seen = [false; 4];
            for _ in 0..64 {
                seen[select_greedy(&q, s, &mut rng).index()] = true;
            }
            seen
        };
        let max = *values.iter().max().unwrap();
        let expected: Vec<bool> = values.iter().map(|&v| v == max).collect();
        prop_assert_eq!(tie_set(0).to_vec(), expected);
        prop_assert_eq!(tie_set(0), tie_set(shift));
    }
}

#[test]
fn bumping_into_a_wall_loses_its_optimism() {
    let raw = RawMaze::new("SG\n");
    let cfg = LearnerConfig::new(0.9, 4).unwrap();
    let mut q = QTable::new(4, 1.0, raw.terminal());
    let mut model = ObservationModel::new();
    let s = raw.id(0, 0);
    model.learn(s, WEST, 0.0, s);
    let mut previous = q.read(s, WEST);
    for _ in 0..20 {
        estimate_q(&mut q, &model, &cfg, s, WEST).unwrap();
        let now = q.read(s, WEST);
        assert!(now <= previous);
        previous = now;
    }
    model.learn(s, EAST, 1.0, raw.terminal());
    estimate_q(&mut q, &model, &cfg, s, EAST).unwrap();
    for _ in 0..20 {
        estimate_q(&mut q, &model, &cfg, s, WEST).unwrap();
    }
    assert_abs_diff_eq!(q.read(s, WEST), cfg.gamma * q.state_value(s), epsilon = 1e-12);
    assert!(q.read(s, WEST) < q.read(s, EAST));
}

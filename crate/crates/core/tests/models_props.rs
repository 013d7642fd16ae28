use proptest::prelude::*;
use simex_core::env::{EAST, NORTH, SOUTH, WEST};
use simex_core::mazegen::{generate, MazeSpec};
use simex_core::model::is_possible_transition;
use simex_core::{ActionId, CombinedModel, Environment, GridMap, Model, ObservationModel, RecentEffectModel, StateId};

fn map(seed: u64) -> GridMap {
    generate(&MazeSpec {
        width: 8,
        height: 6,
        free_cells: 36,
        start: (0, 0),
        goal: (5, 7),
        min_segment: 1,
        max_segment: 3,
        barriers: Vec::new(),
        seed,
    })
    .unwrap()
}

/// Feeds `actions` from the start state into `model`, restarting after the
/// goal. Returns the learned (s, a, r, next) tuples.
fn walk(map: &GridMap, model: &mut CombinedModel, actions: &[usize]) -> Vec<(StateId, ActionId, f64, StateId)> {
    let mut env = map.clone();
    let mut s = env.start();
    let mut seen = Vec::new();
    for &a in actions {
        let t = env.step(s, ActionId(a)).unwrap();
        model.learn(s, ActionId(a), t.reward, t.next);
        seen.push((s, ActionId(a), t.reward, t.next));
        s = if t.terminal { env.start() } else { t.next };
    }
    seen
}

fn walks() -> impl Strategy<Value = (u64, Vec<usize>)> {
    (0u64..50, prop::collection::vec(0usize..4, 1..200))
}

proptest! {
    #[test]
    fn combined_agrees_with_observations((seed, actions) in walks()) {
        let map = map(seed);
        let mut model = CombinedModel::standard(4, map.terminal());
        let seen = walk(&map, &mut model, &actions);
        let obs = &model.models()[0];
        for (s, a, _, _) in seen {
            prop_assert_eq!(model.predict(s, a), obs.predict(s, a));
        }
    }

    #[test]
    fn effect_model_never_predicts_self_loops((seed, actions) in walks(), probe in -100i64..100) {
        let map = map(seed);
        let mut effect = RecentEffectModel::new(4, map.terminal());
        let mut combined = CombinedModel::standard(4, map.terminal());
        for (s, a, r, next) in walk(&map, &mut combined, &actions) {
            effect.learn(s, a, r, next);
        }
        let s = StateId(probe);
        let obs = &combined.models()[0];
        for a in (0..4).map(ActionId) {
            let p = effect.predict(s, a);
            prop_assert!(p.next.iter().all(|&(n, _)| n != s));
            if effect.increment(a).is_some() && obs.predict(s, a).is_empty() {
                let c = combined.predict(s, a);
                prop_assert!(!c.is_empty());
                prop_assert!(c.probability_of(s) == 0.0);
            }
        }
    }

    #[test]
    fn parents_are_consistent_with_children((seed, actions) in walks(), target in 0i64..48) {
        let map = map(seed);
        let mut model = CombinedModel::standard(4, map.terminal());
        walk(&map, &mut model, &actions);
        let s = StateId(target);
        for (p, a) in model.get_parents(s) {
            let prediction = model.predict(p, a);
            prop_assert!(!prediction.is_empty());
            prop_assert!(prediction.probability_of(s) > 0.0, "({p}, {a}) does not lead to {s}");
            prop_assert!(is_possible_transition(p, s, a, &model.models()[..1]));
        }
        let parents = model.get_parents(s);
        let mut deduped = parents.clone();
        deduped.sort();
        deduped.dedup();
        prop_assert_eq!(parents.len(), deduped.len());
    }

    #[test]
    fn wall_bump_removes_stale_parent(width in 3i64..20, p in 0i64..400, a in 0usize..4) {
        let terminal = StateId(10_000);
        let mut model = CombinedModel::standard(4, terminal);
        let steps = [(NORTH, -width), (EAST, 1), (SOUTH, width), (WEST, -1)];
        for (action, inc) in steps {
            model.learn(StateId(5000), action, 0.0, StateId(5000 + inc));
        }
        let a = ActionId(a);
        let s = StateId(p + steps[a.index()].1);
        prop_assert!(model.get_parents(s).contains(&(StateId(p), a)));
        model.learn(StateId(p), a, 0.0, StateId(p));
        prop_assert!(!model.get_parents(s).contains(&(StateId(p), a)));
        prop_assert!(model.get_parents(StateId(p)).contains(&(StateId(p), a)));
    }
}

#[test]
fn observation_parents_only_after_learning() {
    let mut obs = ObservationModel::new();
    assert!(obs.parents(StateId(3)).is_empty());
    obs.learn(StateId(2), EAST, 0.0, StateId(3));
    obs.learn(StateId(2), EAST, 0.0, StateId(3));
    assert_eq!(obs.parents(StateId(3)), vec![(StateId(2), EAST)]);
}

#[test]
fn terminal_transitions_teach_no_effect() {
    let mut effect = RecentEffectModel::new(4, StateId(99));
    effect.learn(StateId(4), SOUTH, 1.0, StateId(99));
    assert_eq!(effect.increment(SOUTH), None);
}

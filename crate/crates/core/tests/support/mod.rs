//! Shared helpers for integration tests: instance sampling, stub model
//! preconditions and a plain weighted-A* reference planner.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::sync::Arc;

use mfplan_core::planner::{state_key, ModelPreconditions, PlannerConfig, StateKey};
use mfplan_core::rng::mix;
use mfplan_core::world::{
    edge_cost, generate_params, sample_start, skill_precondition, TaskKind, TaskSpec, TransitionModel,
};
use mfplan_core::{Scene, Skill, SkillAction, WorldState};

pub fn instance(kind: TaskKind, seed: u64) -> (WorldState, TaskSpec) {
    let scene = Arc::new(Scene::default());
    let (s, target) = sample_start(&scene, seed);
    (s, TaskSpec::new(kind, target))
}

/// Stand-in for trained estimators: the simulator is trusted everywhere, the
/// drawer model for Pick and OpenDrawer, pick-and-place for Pick and for
/// transports of centre-grasped rods.
pub fn idealized(model: &TransitionModel, s: &WorldState, a: &SkillAction) -> bool {
    use mfplan_core::world::ModelKind::*;
    match (model.kind, a.skill) {
        (FineSimulator, _) => true,
        (_, Skill::Pick) => true,
        (AnalyticalDrawer, Skill::OpenDrawer) => true,
        (AnalyticalPickPlace, Skill::LiftAndDrop) => s.held.is_some_and(|h| h.grasp_offset.abs() <= 3.0),
        _ => false,
    }
}

pub fn idealized_pre() -> impl ModelPreconditions {
    idealized
}

#[derive(Clone, Copy)]
struct Item {
    f: f64,
    g: f64,
    seq: u64,
    key: StateKey,
}

impl PartialEq for Item {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.f.total_cmp(&self.f).then(self.g.total_cmp(&o.g)).then(o.seq.cmp(&self.seq))
    }
}

/// Textbook weighted A* over one model: goal test on pop, no reopening,
/// first-visit state per key, f ties to larger g then FIFO.
pub fn reference_wastar(start: &WorldState, task: &TaskSpec, model: &TransitionModel, cfg: &PlannerConfig) -> Option<f64> {
    let mut best: BTreeMap<StateKey, (f64, WorldState)> = BTreeMap::new();
    let mut closed: BTreeSet<StateKey> = BTreeSet::new();
    let mut open = BinaryHeap::new();
    let mut seq = 0;
    let k0 = state_key(start, &cfg.resolution);
    best.insert(k0, (0.0, start.clone()));
    open.push(Item { f: cfg.epsilon * task.heuristic(start), g: 0.0, seq, key: k0 });
    let mut expansions = 0;
    while let Some(item) = open.pop() {
        if closed.contains(&item.key) || best[&item.key].0 != item.g {
            continue;
        }
        let s = best[&item.key].1.clone();
        if task.is_goal(&s) {
            return Some(item.g);
        }
        if expansions >= cfg.expansion_budget {
            return None;
        }
        expansions += 1;
        closed.insert(item.key);
        let seed = mix(cfg.param_seed, item.key.fingerprint());
        let actions: Vec<SkillAction> = task.skills().iter().flat_map(|&k| generate_params(&s, k, task, seed)).collect();
        for a in actions {
            if !skill_precondition(&s, &a) {
                continue;
            }
            let Ok(next) = model.forward(&s, &a) else { continue };
            let key = state_key(&next, &cfg.resolution);
            if key == item.key {
                continue;
            }
            let g = item.g + edge_cost(&s, &a);
            match best.get_mut(&key) {
                Some(entry) if g < entry.0 => entry.0 = g,
                Some(_) => continue,
                None => {
                    best.insert(key, (g, next.clone()));
                }
            }
            if closed.contains(&key) {
                continue;
            }
            seq += 1;
            let h = task.heuristic(&best[&key].1);
            open.push(Item { f: g + cfg.epsilon * h, g, seq, key });
        }
    }
    None
}

/// Every action sequence of length ≤ `depth` over the PS edge set; returns the
/// cheapest cost reaching the goal.
pub fn enumerate_cheapest(
    start: &WorldState,
    task: &TaskSpec,
    models: &mfplan_core::world::ModelSet,
    pre: &dyn ModelPreconditions,
    cfg: &PlannerConfig,
    depth: usize,
) -> Option<(f64, Vec<SkillAction>)> {
    if task.is_goal(start) {
        return Some((0.0, Vec::new()));
    }
    if depth == 0 {
        return None;
    }
    let key = state_key(start, &cfg.resolution);
    let seed = mix(cfg.param_seed, key.fingerprint());
    let mut best: Option<(f64, Vec<SkillAction>)> = None;
    for &skill in task.skills() {
        for a in generate_params(start, skill, task, seed) {
            if !skill_precondition(start, &a) {
                continue;
            }
            let Some(m) = (0..models.len()).rev().find(|&i| pre.holds(models.get(i), start, &a)) else { continue };
            let next = models.get(m).forward(start, &a).unwrap();
            if let Some((c, mut tail)) = enumerate_cheapest(&next, task, models, pre, cfg, depth - 1) {
                let total = edge_cost(start, &a) + c;
                if best.as_ref().is_none_or(|(b, _)| total < *b) {
                    tail.insert(0, a);
                    best = Some((total, tail));
                }
            }
        }
    }
    best
}

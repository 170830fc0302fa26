mod support;

use std::collections::BTreeSet;

use mfplan_core::planner::*;
use mfplan_core::world::{ModelCosts, ModelKind, ModelSet, TaskKind, TaskSpec};
use mfplan_core::{Pose2, Scene, Skill, WorldState};
use proptest::prelude::*;
use std::sync::Arc;
use support::*;

fn models(kind: TaskKind) -> ModelSet {
    ModelSet::new(kind.default_models(), &ModelCosts::default()).unwrap()
}

fn cfg(kind: TaskKind, seed: u64) -> PlannerConfig {
    PlannerConfig { param_seed: seed, record_trace: true, ..PlannerConfig::for_task(kind) }
}

#[test]
fn single_model_matches_reference_weighted_astar() {
    let costs = ModelCosts::default();
    for seed in 0..50u64 {
        let kind = if seed % 2 == 0 { TaskKind::RodInBox } else { TaskKind::RodInDrawer };
        let model = if seed % 4 < 2 { ModelKind::FineSimulator } else { ModelKind::AnalyticalPickPlace };
        let set = ModelSet::single(model, &costs);
        let (start, task) = instance(kind, seed);
        let c = PlannerConfig { weights: vec![1.0], ..cfg(kind, seed) };
        let pe = plan(&start, &task, &set, &AllModels, &c).unwrap();
        let ps = plan_ps_only(&start, &task, &set, &AllModels, &c).unwrap();
        let reference = reference_wastar(&start, &task, set.get(0), &c);
        assert_eq!(pe.found().then_some(pe.cost), reference, "seed {seed}");
        assert_eq!(ps.found().then_some(ps.cost), reference, "seed {seed}");
        assert_eq!(pe.actions, ps.actions);
    }
}

#[test]
fn center_graspable_start_gives_two_step_plan() {
    let scene = Arc::new(Scene::default());
    let start = WorldState::new(
        scene,
        [Pose2::new(18.0, 30.0, 0.0).unwrap(), Pose2::new(10.0, 10.0, 0.0).unwrap()],
    );
    let task = TaskSpec::new(TaskKind::RodInBox, 0);
    let set = models(TaskKind::RodInBox);
    let c = cfg(TaskKind::RodInBox, 3);
    let pre = idealized_pre();
    let r = plan(&start, &task, &set, &pre, &c).unwrap();
    assert!(r.found());
    let skills: Vec<Skill> = r.actions.iter().map(|a| a.skill).collect();
    assert_eq!(skills, [Skill::Pick, Skill::LiftAndDrop]);
    assert_eq!(r.actions[0].theta()[3], 0.0);
    assert_eq!(r.predicted_states.len(), 3);
    let (best, _) = enumerate_cheapest(&start, &task, &set, &pre, &c, 2).unwrap();
    assert!((r.cost - best).abs() < 1e-9, "{} vs {best}", r.cost);
}

#[test]
fn anchor_model_used_once_on_the_only_covered_edge() {
    let (start, task) = instance(TaskKind::RodInBox, 7);
    let set = models(TaskKind::RodInBox);
    // pick-and-place covers centre picks only; transports need the simulator
    let pre = |m: &mfplan_core::world::TransitionModel, _: &WorldState, a: &mfplan_core::SkillAction| match a.skill {
        Skill::Pick => m.kind == ModelKind::AnalyticalPickPlace && a.theta()[3] == 0.0,
        _ => m.kind == ModelKind::FineSimulator,
    };
    let r = plan_ps_only(&start, &task, &set, &pre, &cfg(TaskKind::RodInBox, 7)).unwrap();
    assert!(r.found());
    assert_eq!(r.models_used.iter().filter(|&&m| m == 0).count(), 1);
    let (_, ld) = r.actions.iter().zip(&r.models_used).find(|(a, _)| a.skill == Skill::LiftAndDrop).unwrap();
    assert_eq!(*ld, 0);
}

#[test]
fn start_in_goal() {
    let (mut start, task) = instance(TaskKind::RodInBox, 1);
    let c = start.scene.box_rect.center();
    start.rods[task.goal.target_rod] = Pose2::new(c.x, c.y, 0.0).unwrap();
    let set = models(TaskKind::RodInBox);
    let pre = idealized_pre();
    let c = cfg(TaskKind::RodInBox, 0);
    let r = plan(&start, &task, &set, &pre, &c).unwrap();
    assert_eq!((r.status, r.cost, r.actions.len()), (PlanStatus::Found, 0.0, 0));
    assert_eq!(
        optimal_oracle(&start, &task, &set, &pre, &c, &OracleConfig::default()).unwrap(),
        OracleOutcome::Optimal(0.0)
    );
}

#[test]
fn oracle_reports_unreachable_without_edges() {
    let (start, task) = instance(TaskKind::RodInBox, 2);
    let set = models(TaskKind::RodInBox);
    let never = |_: &mfplan_core::world::TransitionModel, _: &WorldState, _: &mfplan_core::SkillAction| false;
    let c = cfg(TaskKind::RodInBox, 0);
    assert_eq!(
        optimal_oracle(&start, &task, &set, &never, &c, &OracleConfig::default()).unwrap(),
        OracleOutcome::Unreachable
    );
    assert_eq!(plan(&start, &task, &set, &never, &c).unwrap().status, PlanStatus::Exhausted);
}

#[test]
fn oracle_matches_two_step_enumeration() {
    for seed in 0..10 {
        let (start, task) = instance(TaskKind::RodInBox, seed);
        let set = models(TaskKind::RodInBox);
        let pre = idealized_pre();
        let c = cfg(TaskKind::RodInBox, seed);
        let oracle = optimal_oracle(&start, &task, &set, &pre, &c, &OracleConfig::default()).unwrap();
        let Some((two_step, _)) = enumerate_cheapest(&start, &task, &set, &pre, &c, 2) else { continue };
        let OracleOutcome::Optimal(g) = oracle else { panic!("seed {seed}: {oracle:?}") };
        assert!(g <= two_step + 1e-9);
    }
}

#[test]
fn baselines() {
    let (start, task) = instance(TaskKind::RodInDrawer, 4);
    let set = models(TaskKind::RodInDrawer);
    let c = PlannerConfig { expansion_budget: 300, ..cfg(TaskKind::RodInDrawer, 4) };
    let analytical = plan_baseline(&start, &task, &set, Method::SingleModel(2), &c).unwrap();
    assert!(!analytical.found());
    let sim = plan_baseline(&start, &task, &set, Method::SingleModel(0), &c).unwrap();
    assert!(sim.found());
    assert_eq!(sim.evals[1..], [0, 0]);
    assert_eq!(sim.weighted_eval_cost, 200.0 * sim.evals[0] as f64);
    let a = plan_baseline(&start, &task, &set, Method::RandomModel(9), &c).unwrap();
    let b = plan_baseline(&start, &task, &set, Method::RandomModel(9), &c).unwrap();
    assert_eq!(a, b);
}

#[test]
fn analytical_only_never_solves_the_drawer_task() {
    let set = models(TaskKind::RodInDrawer);
    for seed in 0..5 {
        let (start, task) = instance(TaskKind::RodInDrawer, seed);
        let c = PlannerConfig { expansion_budget: 200, ..cfg(TaskKind::RodInDrawer, seed) };
        assert!(!plan_baseline(&start, &task, &set, Method::SingleModel(2), &c).unwrap().found());
    }
}

fn check_trace(r: &PlanResult, set: &ModelSet, pre: &dyn ModelPreconditions) {
    let mut seen = BTreeSet::new();
    for e in &r.trace {
        assert!(seen.insert((e.key, e.action.bits())), "edge evaluated twice");
        let fastest = (0..set.len()).rev().find(|&i| pre.holds(set.get(i), &e.state, &e.action));
        assert_eq!(Some(e.model), fastest, "PS rule violated");
        assert!(e.model >= e.queue);
    }
    assert_eq!(r.trace.len(), r.total_evals());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn suboptimality_bounds_and_invariants(seed in 0u64..10_000, drawer in any::<bool>()) {
        let kind = if drawer { TaskKind::RodInDrawer } else { TaskKind::RodInBox };
        let (start, task) = instance(kind, seed);
        let set = models(kind);
        let pre = idealized_pre();
        let c = cfg(kind, seed);
        let pe = plan(&start, &task, &set, &pre, &c).unwrap();
        let ps = plan_ps_only(&start, &task, &set, &pre, &c).unwrap();
        check_trace(&pe, &set, &pre);
        check_trace(&ps, &set, &pre);
        prop_assert_eq!(&pe, &plan(&start, &task, &set, &pre, &c).unwrap());
        let oracle = optimal_oracle(&start, &task, &set, &pre, &c, &OracleConfig::default()).unwrap();
        if let OracleOutcome::Optimal(g) = oracle {
            prop_assert!(task.heuristic(&start) <= g + 1e-9);
            if ps.found() {
                prop_assert!(ps.cost <= c.epsilon * g + 1e-9, "ps {} vs g* {}", ps.cost, g);
            }
            if pe.found() {
                prop_assert!(pe.cost <= c.weight_ratio(set.len()) * c.epsilon * g + 1e-9);
            }
        }
        if pe.found() {
            prop_assert_eq!(pe.predicted_states.len(), pe.actions.len() + 1);
            prop_assert!(task.is_goal(pe.predicted_states.last().unwrap()));
        }
    }
}

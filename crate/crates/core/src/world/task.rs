use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use super::models::ModelKind;
use crate::geometry::{segment_distance, Pose2, Rect};
use crate::math::PI;
use crate::rng;
use crate::state::{Scene, Skill, SkillAction, SkillMap, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaskKind {
    RodInBox,
    RodInDrawer,
}

impl TaskKind {
    pub const ALL: [TaskKind; 2] = [TaskKind::RodInBox, TaskKind::RodInDrawer];

    pub const fn name(self) -> &'static str {
        match self {
            TaskKind::RodInBox => "rod_in_box",
            TaskKind::RodInDrawer => "rod_in_drawer",
        }
    }

    pub fn from_name(name: &str) -> Option<TaskKind> {
        let norm = name.to_ascii_lowercase().replace('-', "_");
        match norm.as_str() {
            "rod_in_box" | "rodinbox" => Some(TaskKind::RodInBox),
            "rod_in_drawer" | "rodindrawer" => Some(TaskKind::RodInDrawer),
            _ => None,
        }
    }

    /// Skills available in the task.
    pub fn skills(self) -> &'static [Skill] {
        match self {
            TaskKind::RodInBox => &[Skill::Pick, Skill::LiftAndDrop],
            TaskKind::RodInDrawer => &[Skill::Pick, Skill::LiftAndDrop, Skill::OpenDrawer],
        }
    }

    /// Model list used by the multi-model planners, slowest first.
    pub fn default_models(self) -> &'static [ModelKind] {
        match self {
            TaskKind::RodInBox => &[ModelKind::FineSimulator, ModelKind::AnalyticalPickPlace],
            TaskKind::RodInDrawer => &ModelKind::ALL,
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a task asks for: which rod, and where it must end up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GoalContext {
    pub kind: TaskKind,
    pub target_rod: usize,
}

impl GoalContext {
    pub fn new(kind: TaskKind, target_rod: usize) -> Self {
        Self { kind, target_rod }
    }

    /// Region the target rod centre must reach. For the drawer it is the
    /// exposed part of the drawer, assuming at least the minimum opening.
    pub fn region(&self, s: &WorldState) -> Rect {
        let scene = &*s.scene;
        match self.kind {
            TaskKind::RodInBox => scene.box_rect,
            TaskKind::RodInDrawer => {
                scene.drawer_exposed(s.drawer_open.max(scene.drawer_min_open))
            }
        }
    }

    pub fn is_goal(&self, s: &WorldState) -> bool {
        let scene = &*s.scene;
        if s.held.is_some() {
            return false;
        }
        let rod = s.rod_center(self.target_rod);
        match self.kind {
            TaskKind::RodInBox => scene.box_rect.contains(rod),
            TaskKind::RodInDrawer => {
                s.drawer_open >= scene.drawer_min_open
                    && scene.drawer_exposed(s.drawer_open).contains(rod)
            }
        }
    }

    /// Distance from the target rod to the goal region, plus the missing
    /// drawer opening for the drawer task. Zero on goal states.
    pub fn heuristic(&self, s: &WorldState) -> f64 {
        let scene = &*s.scene;
        let rod = self.region(s).distance_to(s.rod_center(self.target_rod));
        match self.kind {
            TaskKind::RodInBox => rod,
            TaskKind::RodInDrawer => rod + (scene.drawer_min_open - s.drawer_open).max(0.0),
        }
    }
}

/// A task instance plus its parameter-generation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    pub goal: GoalContext,
    /// LiftAndDrop / OpenDrawer candidates produced per expansion.
    pub samples_per_skill: usize,
    pub d_max: SkillMap<f64>,
    /// Drop targets keep this distance from the goal region's border.
    pub drop_margin: f64,
    /// End grasps sit this far in from each rod tip.
    pub grasp_end_margin: f64,
    pub open_range: (f64, f64),
}

impl TaskSpec {
    pub fn rod_in_box(target_rod: usize) -> Self {
        Self {
            goal: GoalContext::new(TaskKind::RodInBox, target_rod),
            samples_per_skill: 5,
            // OpenDrawer is not part of this task; its threshold is never consulted.
            d_max: SkillMap::new(3.0, 8.0, 6.0),
            drop_margin: 2.0,
            grasp_end_margin: 2.0,
            open_range: (14.0, 17.0),
        }
    }

    pub fn rod_in_drawer(target_rod: usize) -> Self {
        Self {
            goal: GoalContext::new(TaskKind::RodInDrawer, target_rod),
            samples_per_skill: 3,
            d_max: SkillMap::new(3.0, 5.0, 6.0),
            drop_margin: 2.0,
            grasp_end_margin: 2.0,
            open_range: (14.0, 17.0),
        }
    }

    pub fn new(kind: TaskKind, target_rod: usize) -> Self {
        match kind {
            TaskKind::RodInBox => Self::rod_in_box(target_rod),
            TaskKind::RodInDrawer => Self::rod_in_drawer(target_rod),
        }
    }

    pub fn kind(&self) -> TaskKind {
        self.goal.kind
    }

    pub fn skills(&self) -> &'static [Skill] {
        self.goal.kind.skills()
    }

    pub fn is_goal(&self, s: &WorldState) -> bool {
        self.goal.is_goal(s)
    }

    pub fn heuristic(&self, s: &WorldState) -> f64 {
        self.goal.heuristic(s)
    }

    /// Where LiftAndDrop targets are sampled, if anywhere.
    pub fn drop_region(&self, s: &WorldState) -> Option<Rect> {
        let scene = &*s.scene;
        match self.goal.kind {
            TaskKind::RodInBox => scene.box_rect.shrink(self.drop_margin),
            TaskKind::RodInDrawer if s.drawer_open >= scene.drawer_min_open => {
                scene.drawer_exposed(s.drawer_open).shrink(self.drop_margin)
            }
            TaskKind::RodInDrawer => None,
        }
    }
}

/// Candidate actions for `skill` in state `s`.
///
/// * Pick: for the target rod, a centre grasp and two grasps `l/2 - margin` from the tips.
/// * LiftAndDrop: `samples_per_skill` uniform targets in the shrunken goal region.
/// * OpenDrawer: `samples_per_skill` pull distances uniform in `open_range`.
///
/// The list is not filtered by skill preconditions.
pub fn generate_params(s: &WorldState, skill: Skill, task: &TaskSpec, seed: u64) -> Vec<SkillAction> {
    let scene = &*s.scene;
    match skill {
        Skill::Pick => {
            let end = 0.5 * scene.rod_length - task.grasp_end_margin;
            let rod = s.rods[task.goal.target_rod];
            let yaw = crate::geometry::wrap_angle(rod.yaw + 0.5 * PI);
            [-end, 0.0, end]
                .into_iter()
                .map(|offset| {
                    let g = rod.position() + rod.axis() * offset;
                    SkillAction::pick(g.x, g.y, yaw, offset)
                })
                .collect()
        }
        Skill::LiftAndDrop => {
            let Some(region) = task.drop_region(s) else {
                return Vec::new();
            };
            let mut rng = rng::stream(rng::mix(seed, 0x4c44));
            (0..task.samples_per_skill)
                .map(|_| {
                    let x = sample(&mut rng, region.x_min, region.x_max);
                    let y = sample(&mut rng, region.y_min, region.y_max);
                    SkillAction::lift_and_drop(x, y)
                })
                .collect()
        }
        Skill::OpenDrawer => {
            let mut rng = rng::stream(rng::mix(seed, 0x4f44));
            let (lo, hi) = task.open_range;
            (0..task.samples_per_skill)
                .map(|_| SkillAction::open_drawer(sample(&mut rng, lo, hi)))
                .collect()
        }
    }
}

fn sample(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Draws an initial state: two non-touching rods at uniform poses in the
/// spawn area, gripper home, drawer closed. Returns the state and a randomly
/// chosen target rod.
pub fn sample_start(scene: &Arc<Scene>, seed: u64) -> (WorldState, usize) {
    let mut rng = rng::stream(rng::mix(seed, 0x5354));
    let spawn = scene.rod_spawn;
    let half = 0.5 * scene.rod_length;
    let home = scene.gripper_home.position();
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| loop {
        let x = sample(rng, spawn.x_min, spawn.x_max);
        let y = sample(rng, spawn.y_min, spawn.y_max);
        let yaw = sample(rng, -PI, PI);
        let pose = Pose2::raw(x, y, yaw);
        if pose.position().dist(home) > half + 1.0 {
            return pose;
        }
    };
    let endpoints = |p: &Pose2| (p.position() + p.axis() * half, p.position() - p.axis() * half);
    let mut tries = 0u32;
    let rods = loop {
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let (a0, a1) = endpoints(&a);
        let (b0, b1) = endpoints(&b);
        tries += 1;
        if segment_distance(a0, a1, b0, b1) >= scene.rod_spawn_clearance + scene.rod_width
            && a.position().dist(b.position()) > half
            || tries > 10_000
        {
            break [a, b];
        }
    };
    let target = if rng.random_bool(0.5) { 1 } else { 0 };
    (WorldState::new(scene.clone(), rods), target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::world::skill_precondition;

    fn state() -> WorldState {
        let scene = Arc::new(Scene::default());
        WorldState::new(
            scene,
            [Pose2::new(15.0, 30.0, 0.0).unwrap(), Pose2::new(20.0, 15.0, 0.5).unwrap()],
        )
    }

    #[test]
    fn pick_candidates_on_target_rod() {
        let s = state();
        let picks = generate_params(&s, Skill::Pick, &TaskSpec::rod_in_box(0), 1);
        assert_eq!(picks.len(), 3);
        let offsets: Vec<f64> = picks.iter().map(|a| a.theta()[3]).collect();
        assert_eq!(offsets, [-7.25, 0.0, 7.25]);
        assert_eq!(picks[1].theta()[0], 15.0);
        assert_eq!(picks[1].theta()[1], 30.0);
        let other = generate_params(&s, Skill::Pick, &TaskSpec::rod_in_box(1), 1);
        assert_eq!((other[1].theta()[0], other[1].theta()[1]), (20.0, 15.0));
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let s = state();
        let task = TaskSpec::rod_in_box(0);
        let a = generate_params(&s, Skill::LiftAndDrop, &task, 42);
        let b = generate_params(&s, Skill::LiftAndDrop, &task, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert_ne!(a, generate_params(&s, Skill::LiftAndDrop, &task, 43));
    }

    #[test]
    fn drop_targets_inside_shrunken_goal() {
        let s = state();
        let task = TaskSpec::rod_in_box(0);
        let inner = s.scene.box_rect.shrink(2.0).unwrap();
        for seed in 0..50 {
            for a in generate_params(&s, Skill::LiftAndDrop, &task, seed) {
                assert!(inner.contains(Vec2::new(a.theta()[0], a.theta()[1])));
            }
        }
    }

    #[test]
    fn drawer_drops_need_open_drawer() {
        let mut s = state();
        let task = TaskSpec::rod_in_drawer(0);
        assert!(generate_params(&s, Skill::LiftAndDrop, &task, 3).is_empty());
        s.drawer_open = 15.0;
        assert_eq!(generate_params(&s, Skill::LiftAndDrop, &task, 3).len(), 3);
    }

    #[test]
    fn open_samples_in_range() {
        let s = state();
        let task = TaskSpec::rod_in_drawer(0);
        for a in generate_params(&s, Skill::OpenDrawer, &task, 9) {
            let y = a.theta()[0];
            assert!((14.0..17.0).contains(&y));
            assert!(skill_precondition(&s, &a));
        }
    }

    #[test]
    fn heuristic_examples() {
        let mut s = state();
        let boxed = GoalContext::new(TaskKind::RodInBox, 0);
        let c = s.scene.box_rect.center();
        s.rods[0] = Pose2::new(c.x, c.y, 0.0).unwrap();
        assert_eq!(boxed.heuristic(&s), 0.0);
        assert!(boxed.is_goal(&s));
        // 5 cm beyond the left wall
        s.rods[0].x = s.scene.box_rect.x_min - 5.0;
        assert_eq!(boxed.heuristic(&s), 5.0);

        let drawer = GoalContext::new(TaskKind::RodInDrawer, 0);
        let min_open = s.scene.drawer_min_open;
        s.drawer_open = min_open - 3.0;
        let region = s.scene.drawer_exposed(min_open);
        s.rods[0] = Pose2::new(region.x_min - 5.0, region.center().y, 0.0).unwrap();
        assert!((drawer.heuristic(&s) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn heuristic_zero_on_goal_states() {
        let mut s = state();
        let drawer = GoalContext::new(TaskKind::RodInDrawer, 1);
        s.drawer_open = 16.0;
        let r = s.scene.drawer_exposed(16.0);
        s.rods[1] = Pose2::new(r.x_min + 1.0, r.y_min + 1.0, 0.0).unwrap();
        assert!(drawer.is_goal(&s));
        assert_eq!(drawer.heuristic(&s), 0.0);
    }

    #[test]
    fn sampled_starts_are_valid() {
        let scene = Arc::new(Scene::default());
        for seed in 0..100 {
            let (s, target) = sample_start(&scene, seed);
            assert!(target < 2);
            s.validate().unwrap();
            assert!(!s.rod_within(0.5 * scene.rod_length));
            assert!(!GoalContext::new(TaskKind::RodInBox, target).is_goal(&s));
        }
        let (a, _) = sample_start(&scene, 7);
        let (b, _) = sample_start(&scene, 7);
        assert_eq!(a, b);
    }
}

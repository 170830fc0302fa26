use crate::error::{invalid_action, Result};
use crate::geometry::{bar_aabb, Pose2, Rect, Vec2};
use crate::math;
use crate::state::{Held, Scene, Skill, SkillAction, WorldState};

// Slack for comparisons against configured distances after float arithmetic.
const GEOM_EPS: f64 = 1e-9;

/// Whether `a` may be executed from `s` at all, independent of any model.
pub fn skill_precondition(s: &WorldState, a: &SkillAction) -> bool {
    let scene = &*s.scene;
    let half = 0.5 * scene.rod_length;
    let theta = a.theta();
    match a.skill {
        Skill::Pick => {
            s.held.is_none()
                && !s.rod_within(half)
                && scene.workspace.contains(Vec2::new(theta[0], theta[1]))
        }
        Skill::LiftAndDrop => match s.held {
            Some(h) => {
                math::abs(h.grasp_offset) <= half
                    && scene.workspace.contains(Vec2::new(theta[0], theta[1]))
            }
            None => false,
        },
        Skill::OpenDrawer => {
            let y_open = theta[0];
            let (_, end) = drawer_pull_pose(s, y_open);
            s.held.is_none()
                && !s.rod_within(half)
                && y_open > 0.0
                && s.drawer_open < scene.drawer_joint_limit
                && scene.workspace.contains(end)
        }
    }
}

/// Where an `OpenDrawer` skill hooks the drawer front and where the pull ends
/// if the drawer follows for the full `y_open`.
pub fn drawer_pull_pose(s: &WorldState, y_open: f64) -> (Vec2, Vec2) {
    let scene = &*s.scene;
    let front = scene.drawer_front_y - s.drawer_open;
    let hook = Vec2::new(
        scene.drawer_center_x() + scene.drawer_contact_x_offset,
        front + scene.drawer_contact_band,
    );
    (hook, Vec2::new(hook.x, hook.y - y_open))
}

/// Commanded end-effector travel for `a` from `s`. It depends only on the
/// command, never on which model predicts the outcome.
pub fn edge_cost(s: &WorldState, a: &SkillAction) -> f64 {
    let g = s.gripper.position();
    let theta = a.theta();
    match a.skill {
        Skill::Pick | Skill::LiftAndDrop => g.dist(Vec2::new(theta[0], theta[1])),
        Skill::OpenDrawer => {
            let (hook, _) = drawer_pull_pose(s, theta[0]);
            g.dist(hook) + theta[0]
        }
    }
}

fn check(s: &WorldState, a: &SkillAction) -> Result<()> {
    if skill_precondition(s, a) {
        Ok(())
    } else {
        Err(invalid_action("skill precondition does not hold"))
    }
}

fn in_contact(scene: &Scene, s: &WorldState, hook: Vec2) -> bool {
    let front = scene.drawer_front_y - s.drawer_open;
    let behind = hook.y - front;
    hook.x >= scene.drawer_x_min
        && hook.x <= scene.drawer_x_max
        && behind >= -GEOM_EPS
        && behind <= scene.drawer_contact_band + GEOM_EPS
}

// Shared by every model: Pick is purely kinematic.
fn pick(s: &WorldState, a: &SkillAction) -> WorldState {
    let scene = &*s.scene;
    let theta = a.theta();
    let mut next = s.clone();
    next.gripper = Pose2::raw(theta[0], theta[1], theta[2]);
    let g = next.gripper.position();
    let half = 0.5 * scene.rod_length;
    let lateral_limit = 0.5 * scene.rod_width + scene.grasp_tolerance;
    let grasped = s
        .rods
        .iter()
        .enumerate()
        .filter_map(|(i, rod)| {
            let rel = g - rod.position();
            let along = rel.dot(rod.axis());
            let lateral = math::abs(rel.cross(rod.axis()));
            let dist = rel.norm();
            (dist <= half + GEOM_EPS && lateral <= lateral_limit).then_some((i, along, dist))
        })
        .min_by(|a, b| a.2.total_cmp(&b.2));
    match grasped {
        Some((rod_index, along, _)) => {
            next.held = Some(Held { rod_index, grasp_offset: along.clamp(-half, half) });
            next.gripper_open_width = scene.rod_width;
        }
        None => {
            next.held = None;
            next.gripper_open_width = scene.gripper_open_width;
        }
    }
    next
}

fn release(next: &mut WorldState, goal: Vec2) {
    next.gripper = Pose2::raw(goal.x, goal.y, next.gripper.yaw);
    next.held = None;
    next.gripper_open_width = next.scene.gripper_open_width;
}

#[derive(Clone, Copy, PartialEq)]
enum WallResponse {
    /// Real behaviour: the rod stops against the wall on the outside.
    RestOutside,
    /// Simulator artefact: the rod slides over the wall into the container.
    SlideInside,
}

enum Transport {
    Rigid,
    Pivot,
    Drop,
}

fn transport_mode(scene: &Scene, held: Held) -> Transport {
    let off = math::abs(held.grasp_offset);
    if off <= scene.pivot_offset {
        Transport::Rigid
    } else if off <= scene.drop_offset {
        Transport::Pivot
    } else {
        Transport::Drop
    }
}

fn containers(s: &WorldState) -> [Option<Rect>; 2] {
    let scene = &*s.scene;
    let drawer = (s.drawer_open > 0.0).then(|| scene.drawer_exposed(s.drawer_open));
    [Some(scene.box_rect), drawer]
}

// Landing pose of a pivoting rod before any wall interaction.
fn pivot_landing(s: &WorldState, held: Held, goal: Vec2) -> Pose2 {
    let scene = &*s.scene;
    let rod = s.rods[held.rod_index];
    let lever = rod.position() - s.gripper.position();
    let angle = if held.grasp_offset >= 0.0 { scene.pivot_angle } else { -scene.pivot_angle };
    let (sin, cos) = (math::sin(angle), math::cos(angle));
    let rotated = Vec2::new(cos * lever.x - sin * lever.y, sin * lever.x + cos * lever.y);
    let shift = scene.pivot_shift_slope * (math::abs(held.grasp_offset) - scene.pivot_offset);
    let dir = match rotated.norm() {
        n if n > 0.0 => rotated * (1.0 / n),
        _ => rod.axis(),
    };
    let center = goal + rotated + dir * shift;
    Pose2::raw(center.x, center.y, rod.yaw + angle)
}

// First container whose wall the bar footprint straddles.
fn straddled_wall(s: &WorldState, pose: &Pose2) -> Option<Rect> {
    let scene = &*s.scene;
    let aabb = bar_aabb(pose, scene.rod_length, scene.rod_width);
    containers(s)
        .into_iter()
        .flatten()
        .find(|c| aabb.overlaps(c) && !c.contains_rect(&aabb))
}

fn resolve_wall(s: &WorldState, pose: Pose2, wall: Rect, response: WallResponse) -> Pose2 {
    let scene = &*s.scene;
    let b = bar_aabb(&pose, scene.rod_length, scene.rod_width);
    let shift = match response {
        WallResponse::RestOutside => {
            // Smallest translation that separates the footprint from the container.
            let candidates = [
                Vec2::new(-(b.x_max - wall.x_min), 0.0),
                Vec2::new(wall.x_max - b.x_min, 0.0),
                Vec2::new(0.0, -(b.y_max - wall.y_min)),
                Vec2::new(0.0, wall.y_max - b.y_min),
            ];
            candidates
                .into_iter()
                .min_by(|a, b| a.norm().total_cmp(&b.norm()))
                .unwrap_or_default()
        }
        WallResponse::SlideInside => {
            let axis = |lo: f64, hi: f64, clo: f64, chi: f64| {
                if hi - lo > chi - clo {
                    0.5 * (clo + chi) - 0.5 * (lo + hi)
                } else if lo < clo {
                    clo - lo
                } else if hi > chi {
                    chi - hi
                } else {
                    0.0
                }
            };
            Vec2::new(
                axis(b.x_min, b.x_max, wall.x_min, wall.x_max),
                axis(b.y_min, b.y_max, wall.y_min, wall.y_max),
            )
        }
    };
    Pose2::raw(pose.x + shift.x, pose.y + shift.y, pose.yaw)
}

fn lift_and_drop_physics(s: &WorldState, a: &SkillAction, response: WallResponse) -> WorldState {
    let scene = &*s.scene;
    let held = s.held.expect("precondition guarantees a held rod");
    let theta = a.theta();
    let goal = Vec2::new(theta[0], theta[1]);
    let delta = goal - s.gripper.position();
    let rod = s.rods[held.rod_index];
    let landed = match transport_mode(scene, held) {
        Transport::Rigid => Pose2::raw(rod.x + delta.x, rod.y + delta.y, rod.yaw),
        Transport::Drop => Pose2::raw(rod.x + 0.5 * delta.x, rod.y + 0.5 * delta.y, rod.yaw),
        Transport::Pivot => {
            let pose = pivot_landing(s, held, goal);
            match straddled_wall(s, &pose) {
                Some(wall) => resolve_wall(s, pose, wall, response),
                None => pose,
            }
        }
    };
    let mut next = s.clone();
    next.rods[held.rod_index] = landed;
    release(&mut next, goal);
    next
}

fn open_drawer_physics(s: &WorldState, a: &SkillAction, clamp: bool, carry_rods: bool) -> WorldState {
    let scene = &*s.scene;
    let y_open = a.theta()[0];
    let (hook, end) = drawer_pull_pose(s, y_open);
    let mut next = s.clone();
    if !in_contact(scene, s, hook) {
        next.gripper = Pose2::raw(end.x, end.y, 0.0);
        return next;
    }
    let travel = if clamp {
        y_open.min(scene.drawer_joint_limit - s.drawer_open).max(0.0)
    } else {
        y_open
    };
    if carry_rods {
        let body = scene.drawer_rect(s.drawer_open);
        for rod in next.rods.iter_mut() {
            if body.contains(rod.position()) {
                rod.y -= travel;
            }
        }
    }
    next.drawer_open = s.drawer_open + travel;
    next.gripper = Pose2::raw(hook.x, hook.y - travel, 0.0);
    next
}

/// The real world. Center grasps transport exactly, moderately off-center
/// grasps pivot (and stop outside a container wall they hit), far off-center
/// grasps drop the rod halfway. The drawer stops at its joint limit and
/// carries any rod lying inside it.
pub fn ground_truth(s: &WorldState, a: &SkillAction) -> Result<WorldState> {
    check(s, a)?;
    Ok(match a.skill {
        Skill::Pick => pick(s, a),
        Skill::LiftAndDrop => lift_and_drop_physics(s, a, WallResponse::RestOutside),
        Skill::OpenDrawer => open_drawer_physics(s, a, true, true),
    })
}

/// Slowest model. Matches the real world except that a pivoting rod whose
/// footprint lands on a container wall slides inside instead of stopping.
pub fn fine_simulator(s: &WorldState, a: &SkillAction) -> Result<WorldState> {
    check(s, a)?;
    Ok(match a.skill {
        Skill::Pick => pick(s, a),
        Skill::LiftAndDrop => lift_and_drop_physics(s, a, WallResponse::SlideInside),
        Skill::OpenDrawer => open_drawer_physics(s, a, true, true),
    })
}

/// True exactly where [`fine_simulator`] disagrees with [`ground_truth`].
pub fn in_miscalibration_region(s: &WorldState, a: &SkillAction) -> bool {
    if a.skill != Skill::LiftAndDrop || !skill_precondition(s, a) {
        return false;
    }
    let held = match s.held {
        Some(h) => h,
        None => return false,
    };
    if !matches!(transport_mode(&s.scene, held), Transport::Pivot) {
        return false;
    }
    let theta = a.theta();
    let pose = pivot_landing(s, held, Vec2::new(theta[0], theta[1]));
    straddled_wall(s, &pose).is_some()
}

/// Treats the held rod as rigidly attached, whatever the grasp offset. The
/// drawer never moves.
pub fn analytical_pick_place(s: &WorldState, a: &SkillAction) -> Result<WorldState> {
    check(s, a)?;
    Ok(match a.skill {
        Skill::Pick => pick(s, a),
        Skill::LiftAndDrop => {
            let held = s.held.expect("precondition guarantees a held rod");
            let theta = a.theta();
            let goal = Vec2::new(theta[0], theta[1]);
            let delta = goal - s.gripper.position();
            let mut next = s.clone();
            let rod = &mut next.rods[held.rod_index];
            rod.x += delta.x;
            rod.y += delta.y;
            release(&mut next, goal);
            next
        }
        Skill::OpenDrawer => {
            let (_, end) = drawer_pull_pose(s, a.theta()[0]);
            let mut next = s.clone();
            next.gripper = Pose2::raw(end.x, end.y, 0.0);
            next
        }
    })
}

/// Models only the drawer articulation: pulls for the full commanded
/// distance ignoring the joint limit and never moves rods.
pub fn analytical_drawer(s: &WorldState, a: &SkillAction) -> Result<WorldState> {
    check(s, a)?;
    Ok(match a.skill {
        Skill::Pick => pick(s, a),
        Skill::LiftAndDrop => {
            let theta = a.theta();
            let mut next = s.clone();
            release(&mut next, Vec2::new(theta[0], theta[1]));
            next
        }
        Skill::OpenDrawer => open_drawer_physics(s, a, false, false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::state_distance;
    use alloc::sync::Arc;

    fn scene() -> Arc<Scene> {
        Arc::new(Scene::default())
    }

    // rod 0 horizontal at (20, 30), rod 1 far away.
    fn start() -> WorldState {
        WorldState::new(
            scene(),
            [Pose2::new(20.0, 30.0, 0.0).unwrap(), Pose2::new(12.0, 12.0, 1.0).unwrap()],
        )
    }

    fn grasp(s: &WorldState, offset: f64) -> WorldState {
        let rod = s.rods[0];
        let g = rod.position() + rod.axis() * offset;
        ground_truth(s, &SkillAction::pick(g.x, g.y, rod.yaw + math::PI / 2.0, offset)).unwrap()
    }

    #[test]
    fn pick_attaches_with_offset() {
        let s = grasp(&start(), 7.25);
        let h = s.held.unwrap();
        assert_eq!(h.rod_index, 0);
        assert!((h.grasp_offset - 7.25).abs() < 1e-9);
    }

    #[test]
    fn pick_away_from_rods_grasps_nothing() {
        let s = ground_truth(&start(), &SkillAction::pick(50.0, 40.0, 0.0, 0.0)).unwrap();
        assert!(s.held.is_none());
        assert_eq!(s.gripper.position(), Vec2::new(50.0, 40.0));
    }

    #[test]
    fn center_grasp_lands_at_box_center() {
        let s = grasp(&start(), 0.0);
        let c = s.scene.box_rect.center();
        let next = ground_truth(&s, &SkillAction::lift_and_drop(c.x, c.y)).unwrap();
        assert!(next.rods[0].position().dist(c) < 1e-9);
        assert!(next.scene.box_rect.contains(next.rods[0].position()));
        assert!(next.held.is_none());
    }

    #[test]
    fn end_grasp_drops_at_transport_midpoint() {
        let s0 = start();
        let half = 0.5 * s0.scene.rod_length;
        let s = grasp(&s0, half);
        let g = s.gripper.position();
        let target = g + Vec2::new(0.0, -20.0);
        let next = ground_truth(&s, &SkillAction::lift_and_drop(target.x, target.y)).unwrap();
        // Scripted replay: the rod keeps its pose relative to the gripper for half the segment.
        let expected = s0.rods[0].position() + (target - g) * 0.5;
        assert!(next.rods[0].position().dist(expected) < 1e-9);
        assert!((next.rods[0].position().dist(s0.rods[0].position()) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn drawer_clamps_at_joint_limit() {
        let s = start();
        let next = ground_truth(&s, &SkillAction::open_drawer(30.0)).unwrap();
        assert_eq!(next.drawer_open, 17.0);
    }

    #[test]
    fn pick_place_model_matches_truth_for_center_grasp() {
        let s = grasp(&start(), 0.0);
        let a = SkillAction::lift_and_drop(45.0, 10.0);
        assert_eq!(ground_truth(&s, &a).unwrap(), analytical_pick_place(&s, &a).unwrap());
    }

    #[test]
    fn pick_place_model_misses_the_drop() {
        let s0 = start();
        let s = grasp(&s0, 0.5 * s0.scene.rod_length);
        let c = s.scene.box_rect.center();
        let a = SkillAction::lift_and_drop(c.x, c.y);
        let truth = ground_truth(&s, &a).unwrap();
        let rigid = analytical_pick_place(&s, &a).unwrap();
        // Independent evaluation: rigid lands at rod + Δ, truth at rod + Δ/2.
        let delta = c - s.gripper.position();
        let rigid_expected = s0.rods[0].position() + delta;
        let mid_expected = s0.rods[0].position() + delta * 0.5;
        assert!(rigid.rods[0].position().dist(rigid_expected) < 1e-9);
        let dev = state_distance(&truth, &rigid).unwrap();
        assert!((dev - mid_expected.dist(rigid_expected)).abs() < 1e-9);
        assert!((dev - 0.5 * delta.norm()).abs() < 1e-9);
    }

    #[test]
    fn pick_place_model_never_moves_drawer() {
        let s = start();
        let next = analytical_pick_place(&s, &SkillAction::open_drawer(10.0)).unwrap();
        assert_eq!(next.drawer_open, s.drawer_open);
    }

    #[test]
    fn drawer_model_within_limit_matches_truth() {
        let s = start();
        let a = SkillAction::open_drawer(10.0);
        let model = analytical_drawer(&s, &a).unwrap();
        assert_eq!(model.drawer_open, 10.0);
        assert_eq!(state_distance(&model, &ground_truth(&s, &a).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn drawer_model_ignores_joint_limit() {
        let s = start();
        let a = SkillAction::open_drawer(30.0);
        let model = analytical_drawer(&s, &a).unwrap();
        let truth = ground_truth(&s, &a).unwrap();
        assert_eq!(model.drawer_open, 30.0);
        assert_eq!(state_distance(&model, &truth).unwrap(), 13.0);
    }

    #[test]
    fn drawer_model_does_not_move_rods() {
        let s = grasp(&start(), 0.0);
        let g = s.gripper.position();
        let a = SkillAction::lift_and_drop(g.x + 20.0, g.y);
        let model = analytical_drawer(&s, &a).unwrap();
        let truth = ground_truth(&s, &a).unwrap();
        assert_eq!(model.rods[0], s.rods[0]);
        assert!((state_distance(&model, &truth).unwrap() - 20.0).abs() < 1e-9);
    }

    // Rod 0 held 5 cm off-centre (pivot regime) and released so the swung rod
    // straddles the left wall of the box.
    fn pivot_into_wall() -> (WorldState, SkillAction) {
        let s = grasp(&start(), 5.0);
        let b = s.scene.box_rect;
        let a = SkillAction::lift_and_drop(b.x_min + 4.0, b.center().y);
        (s, a)
    }

    #[test]
    fn simulator_slides_inside_where_truth_stops_outside() {
        let (s, a) = pivot_into_wall();
        assert!(in_miscalibration_region(&s, &a));
        let truth = ground_truth(&s, &a).unwrap();
        let sim = fine_simulator(&s, &a).unwrap();
        let scene = &*s.scene;
        let truth_box = bar_aabb(&truth.rods[0], scene.rod_length, scene.rod_width);
        let sim_box = bar_aabb(&sim.rods[0], scene.rod_length, scene.rod_width);
        assert!(!truth_box.overlaps(&scene.box_rect));
        assert!(scene.box_rect.contains_rect(&sim_box));
        assert!(state_distance(&truth, &sim).unwrap() > 0.0);
    }

    #[test]
    fn simulator_matches_truth_on_pick_and_zero_offset() {
        let s0 = start();
        let a = SkillAction::pick(20.0, 30.0, math::PI / 2.0, 0.0);
        assert_eq!(ground_truth(&s0, &a).unwrap(), fine_simulator(&s0, &a).unwrap());
        let s = grasp(&s0, 0.0);
        let a = SkillAction::lift_and_drop(40.0, 10.0);
        assert!(!in_miscalibration_region(&s, &a));
        assert_eq!(ground_truth(&s, &a).unwrap(), fine_simulator(&s, &a).unwrap());
    }

    #[test]
    fn preconditions() {
        let s = start();
        assert!(skill_precondition(&s, &SkillAction::pick(30.0, 30.0, 0.0, 0.0)));
        assert!(!skill_precondition(&s, &SkillAction::lift_and_drop(30.0, 30.0)));
        let held = grasp(&s, 0.0);
        assert!(!skill_precondition(&held, &SkillAction::open_drawer(15.0)));
        assert!(!skill_precondition(&s, &SkillAction::pick(70.0, 30.0, 0.0, 0.0)));
        assert!(matches!(
            ground_truth(&s, &SkillAction::lift_and_drop(30.0, 30.0)),
            Err(crate::Error::InvalidAction(_))
        ));
    }

    #[test]
    fn open_drawer_carries_rods_inside() {
        let mut s = start();
        s.drawer_open = 10.0;
        // rod 1 resting in the exposed part of the drawer
        s.rods[1] = Pose2::new(44.0, 30.0, 0.0).unwrap();
        s.gripper = Pose2::new(10.0, 48.0, 0.0).unwrap();
        let next = ground_truth(&s, &SkillAction::open_drawer(5.0)).unwrap();
        assert_eq!(next.drawer_open, 15.0);
        assert!((next.rods[1].y - 25.0).abs() < 1e-12);
        let model = analytical_drawer(&s, &SkillAction::open_drawer(5.0)).unwrap();
        assert_eq!(model.rods[1].y, 30.0);
    }

    #[test]
    fn edge_cost_is_commanded_travel() {
        let s = start();
        let a = SkillAction::pick(5.0, 44.0, 0.0, 0.0);
        assert!((edge_cost(&s, &a) - 5.0).abs() < 1e-12);
    }
}

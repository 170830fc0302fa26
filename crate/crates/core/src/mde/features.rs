use alloc::vec::Vec;

use crate::state::{Skill, SkillAction, WorldState};
use crate::world::GoalContext;

/// Number of state features preceding the skill parameters.
pub const STATE_FEATURES: usize = 6;

/// Model input: six state features followed by the skill parameters.
///
/// `[gripper→rod0, gripper→rod1, grasp_offset, target rod→goal region,
///   drawer_open, held flag, θ...]`
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub skill: Skill,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn extract_features(s: &WorldState, a: &SkillAction, goal: &GoalContext) -> FeatureVector {
    let g = s.gripper.position();
    let (offset, held) = match s.held {
        Some(h) => (h.grasp_offset, 1.0),
        None => (0.0, 0.0),
    };
    let to_goal = goal.region(s).distance_to(s.rod_center(goal.target_rod));
    let mut values = Vec::with_capacity(STATE_FEATURES + a.skill.arity());
    values.extend_from_slice(&[
        g.dist(s.rod_center(0)),
        g.dist(s.rod_center(1)),
        offset,
        to_goal,
        s.drawer_open,
        held,
    ]);
    values.extend_from_slice(a.theta());
    FeatureVector { skill: a.skill, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pose2;
    use crate::state::{Held, Scene};
    use crate::world::TaskKind;
    use alloc::sync::Arc;

    fn state() -> WorldState {
        let scene = Arc::new(Scene::default());
        WorldState::new(
            scene,
            [Pose2::new(20.0, 30.0, 0.0).unwrap(), Pose2::new(10.0, 10.0, 0.0).unwrap()],
        )
    }

    #[test]
    fn empty_hand_zeroes_grasp_features() {
        let s = state();
        let f = extract_features(&s, &SkillAction::open_drawer(15.0), &GoalContext::new(TaskKind::RodInBox, 0));
        assert_eq!(f.values[2], 0.0);
        assert_eq!(f.values[5], 0.0);
        assert_eq!(f.len(), STATE_FEATURES + 1);
    }

    #[test]
    fn gripper_on_rod_center() {
        let mut s = state();
        s.gripper = Pose2::new(20.0, 30.0, 0.0).unwrap();
        let f = extract_features(&s, &SkillAction::pick(1.0, 2.0, 0.0, 0.0), &GoalContext::new(TaskKind::RodInBox, 0));
        assert_eq!(f.values[0], 0.0);
    }

    #[test]
    fn hand_computed_vector() {
        let mut s = state();
        s.gripper = Pose2::new(23.0, 34.0, 0.0).unwrap();
        s.held = Some(Held { rod_index: 0, grasp_offset: 3.0 });
        s.drawer_open = 4.0;
        let goal = GoalContext::new(TaskKind::RodInBox, 1);
        let f = extract_features(&s, &SkillAction::lift_and_drop(40.0, 10.0), &goal);
        // gripper (23,34): rod0 (20,30) → 5; rod1 (10,10) → √(13²+24²)
        // rod1 (10,10) to box [36,58]×[2,18] → 26 (straight left of the box)
        let expected = [5.0, (13.0f64 * 13.0 + 24.0 * 24.0).sqrt(), 3.0, 26.0, 4.0, 1.0, 40.0, 10.0];
        assert_eq!(f.values.len(), expected.len());
        for (got, want) in f.values.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }
}

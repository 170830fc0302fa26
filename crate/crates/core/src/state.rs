//! World state, parameterized skills and the state distance.

use alloc::sync::Arc;
use core::fmt;

use crate::error::{invalid_input, Result};
use crate::geometry::{Pose2, Rect, Vec2};
use crate::math;

/// Scene and dynamics constants. Everything here is configuration; the
/// defaults describe a 60 × 50 cm tabletop with a box and a drawer chest.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scene {
    pub workspace: Rect,
    pub rod_length: f64,
    pub rod_width: f64,
    /// Target box for the rod-in-box task.
    pub box_rect: Rect,
    /// Lateral extent of the drawer interior.
    pub drawer_x_min: f64,
    pub drawer_x_max: f64,
    /// y of the drawer front when fully closed; the drawer opens towards -y.
    pub drawer_front_y: f64,
    pub drawer_depth: f64,
    pub drawer_joint_limit: f64,
    /// Opening needed before a rod can be placed inside.
    pub drawer_min_open: f64,
    /// Gripper must be within this distance behind the drawer front to pull it.
    pub drawer_contact_band: f64,
    /// Lateral offset of the pull pose from the drawer centre line.
    pub drawer_contact_x_offset: f64,
    pub gripper_home: Pose2,
    pub gripper_open_width: f64,
    /// Max lateral distance from a rod axis that still yields a grasp.
    pub grasp_tolerance: f64,
    /// Offsets at or below this are transported rigidly.
    pub pivot_offset: f64,
    /// Offsets above this drop the rod mid-transport.
    pub drop_offset: f64,
    pub pivot_angle: f64,
    /// Extra landing displacement per cm of offset beyond `pivot_offset`.
    pub pivot_shift_slope: f64,
    /// Where initial rod centres are sampled.
    pub rod_spawn: Rect,
    /// Minimum clearance between the two rod axes at spawn.
    pub rod_spawn_clearance: f64,
}

impl Default for Scene {
    fn default() -> Self {
        Self {
            workspace: Rect::new(0.0, 0.0, 60.0, 50.0),
            rod_length: 18.5,
            rod_width: 2.3,
            box_rect: Rect::new(36.0, 2.0, 58.0, 18.0),
            drawer_x_min: 32.0,
            drawer_x_max: 56.0,
            drawer_front_y: 36.0,
            drawer_depth: 20.0,
            drawer_joint_limit: 17.0,
            drawer_min_open: 12.0,
            drawer_contact_band: 2.0,
            drawer_contact_x_offset: 1.0,
            gripper_home: Pose2 { x: 2.0, y: 48.0, yaw: 0.0 },
            gripper_open_width: 8.0,
            grasp_tolerance: 1.5,
            pivot_offset: 3.0,
            drop_offset: 7.0,
            pivot_angle: 0.6,
            pivot_shift_slope: 1.5,
            rod_spawn: Rect::new(8.0, 8.0, 28.0, 42.0),
            rod_spawn_clearance: 3.0,
        }
    }
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        let rects = [self.workspace, self.box_rect, self.rod_spawn];
        if rects.iter().any(|r| !r.is_valid()) {
            return Err(invalid_input("scene rectangles must be finite and ordered"));
        }
        let positive = [
            self.rod_length,
            self.rod_width,
            self.drawer_depth,
            self.drawer_joint_limit,
            self.drawer_contact_band,
            self.gripper_open_width,
            self.grasp_tolerance,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid_input("scene lengths must be positive"));
        }
        if !(self.drawer_x_min < self.drawer_x_max) {
            return Err(invalid_input("drawer x range is empty"));
        }
        if !(self.drawer_min_open > 0.0 && self.drawer_min_open <= self.drawer_joint_limit) {
            return Err(invalid_input("drawer min_open must lie in (0, joint limit]"));
        }
        if !(0.0 <= self.pivot_offset && self.pivot_offset <= self.drop_offset) {
            return Err(invalid_input("need 0 <= pivot_offset <= drop_offset"));
        }
        if !self.gripper_home.is_finite() {
            return Err(invalid_input("gripper home must be finite"));
        }
        Ok(())
    }

    /// Drawer body (interior) for a given opening.
    pub fn drawer_rect(&self, open: f64) -> Rect {
        let front = self.drawer_front_y - open;
        Rect::new(self.drawer_x_min, front, self.drawer_x_max, front + self.drawer_depth)
    }

    /// The part of the drawer interior that sticks out of the chest.
    pub fn drawer_exposed(&self, open: f64) -> Rect {
        Rect::new(
            self.drawer_x_min,
            self.drawer_front_y - open,
            self.drawer_x_max,
            self.drawer_front_y,
        )
    }

    pub fn drawer_center_x(&self) -> f64 {
        0.5 * (self.drawer_x_min + self.drawer_x_max)
    }
}

/// A rod attached to the gripper; `grasp_offset` is signed along the rod axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Held {
    pub rod_index: usize,
    pub grasp_offset: f64,
}

#[derive(Clone)]
pub struct WorldState {
    pub gripper: Pose2,
    pub gripper_open_width: f64,
    pub held: Option<Held>,
    pub rods: [Pose2; 2],
    pub drawer_open: f64,
    pub scene: Arc<Scene>,
}

impl fmt::Debug for WorldState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WorldState")
            .field("gripper", &self.gripper)
            .field("gripper_open_width", &self.gripper_open_width)
            .field("held", &self.held)
            .field("rods", &self.rods)
            .field("drawer_open", &self.drawer_open)
            .finish_non_exhaustive()
    }
}

impl PartialEq for WorldState {
    fn eq(&self, other: &Self) -> bool {
        self.gripper == other.gripper
            && self.gripper_open_width == other.gripper_open_width
            && self.held == other.held
            && self.rods == other.rods
            && self.drawer_open == other.drawer_open
            && self.same_scene(other)
    }
}

impl WorldState {
    /// Gripper at home, open and empty; drawer closed.
    pub fn new(scene: Arc<Scene>, rods: [Pose2; 2]) -> Self {
        Self {
            gripper: scene.gripper_home,
            gripper_open_width: scene.gripper_open_width,
            held: None,
            rods,
            drawer_open: 0.0,
            scene,
        }
    }

    pub fn same_scene(&self, other: &WorldState) -> bool {
        Arc::ptr_eq(&self.scene, &other.scene) || *self.scene == *other.scene
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gripper.is_finite()
            || !self.gripper_open_width.is_finite()
            || self.rods.iter().any(|r| !r.is_finite())
            || !self.drawer_open.is_finite()
        {
            return Err(invalid_input("state contains non-finite values"));
        }
        if self.drawer_open < 0.0 || self.drawer_open > self.scene.drawer_joint_limit {
            return Err(invalid_input("drawer opening outside joint range"));
        }
        if let Some(h) = self.held {
            if h.rod_index > 1 {
                return Err(invalid_input("held rod index must be 0 or 1"));
            }
            if !h.grasp_offset.is_finite() || math::abs(h.grasp_offset) > 0.5 * self.scene.rod_length
            {
                return Err(invalid_input("grasp offset exceeds half the rod length"));
            }
        }
        Ok(())
    }

    pub fn rod_center(&self, index: usize) -> Vec2 {
        self.rods[index].position()
    }

    /// True if some rod centre lies within `radius` of the gripper.
    pub fn rod_within(&self, radius: f64) -> bool {
        let g = self.gripper.position();
        self.rods.iter().any(|r| r.position().dist(g) <= radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Skill {
    Pick,
    LiftAndDrop,
    OpenDrawer,
}

impl Skill {
    pub const ALL: [Skill; 3] = [Skill::Pick, Skill::LiftAndDrop, Skill::OpenDrawer];

    /// Number of continuous parameters.
    pub const fn arity(self) -> usize {
        match self {
            Skill::Pick => 4,
            Skill::LiftAndDrop => 2,
            Skill::OpenDrawer => 1,
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn name(self) -> &'static str {
        match self {
            Skill::Pick => "Pick",
            Skill::LiftAndDrop => "LiftAndDrop",
            Skill::OpenDrawer => "OpenDrawer",
        }
    }

    pub fn from_name(name: &str) -> Option<Skill> {
        Skill::ALL.into_iter().find(|s| s.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for Skill {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One value per skill.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SkillMap<T> {
    pub pick: T,
    pub lift_and_drop: T,
    pub open_drawer: T,
}

impl<T> SkillMap<T> {
    pub const fn new(pick: T, lift_and_drop: T, open_drawer: T) -> Self {
        Self { pick, lift_and_drop, open_drawer }
    }
}

impl<T> core::ops::Index<Skill> for SkillMap<T> {
    type Output = T;
    fn index(&self, skill: Skill) -> &T {
        match skill {
            Skill::Pick => &self.pick,
            Skill::LiftAndDrop => &self.lift_and_drop,
            Skill::OpenDrawer => &self.open_drawer,
        }
    }
}

impl<T> core::ops::IndexMut<Skill> for SkillMap<T> {
    fn index_mut(&mut self, skill: Skill) -> &mut T {
        match skill {
            Skill::Pick => &mut self.pick,
            Skill::LiftAndDrop => &mut self.lift_and_drop,
            Skill::OpenDrawer => &mut self.open_drawer,
        }
    }
}

const MAX_ARITY: usize = 4;

/// A skill with its continuous parameters.
///
/// * `Pick`: `[x, y, yaw, grasp_offset]` target gripper pose and intended offset.
/// * `LiftAndDrop`: `[x, y]` release position.
/// * `OpenDrawer`: `[y_open]` pull distance.
#[derive(Clone, Copy, PartialEq)]
pub struct SkillAction {
    pub skill: Skill,
    theta: [f64; MAX_ARITY],
}

impl fmt::Debug for SkillAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.skill, self.theta())
    }
}

impl SkillAction {
    pub fn new(skill: Skill, theta: &[f64]) -> Result<Self> {
        if theta.len() != skill.arity() {
            return Err(invalid_input("parameter vector length does not match skill arity"));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(invalid_input("skill parameters must be finite"));
        }
        let mut buf = [0.0; MAX_ARITY];
        buf[..theta.len()].copy_from_slice(theta);
        Ok(Self { skill, theta: buf })
    }

    pub fn pick(x: f64, y: f64, yaw: f64, grasp_offset: f64) -> Self {
        Self { skill: Skill::Pick, theta: [x, y, yaw, grasp_offset] }
    }

    pub fn lift_and_drop(x: f64, y: f64) -> Self {
        Self { skill: Skill::LiftAndDrop, theta: [x, y, 0.0, 0.0] }
    }

    pub fn open_drawer(y_open: f64) -> Self {
        Self { skill: Skill::OpenDrawer, theta: [y_open, 0.0, 0.0, 0.0] }
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta[..self.skill.arity()]
    }

    /// Bit pattern of the action, usable as an exact identity.
    pub fn bits(&self) -> (Skill, [u64; MAX_ARITY]) {
        (self.skill, self.theta.map(f64::to_bits))
    }
}

/// One executed step `(s, a, s')`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub s: WorldState,
    pub a: SkillAction,
    pub s_next: WorldState,
    pub episode_id: u64,
    pub step: u32,
}

/// Positional distance between two states: summed Euclidean distance of the
/// two rod centres plus the difference in drawer opening. Yaw and the gripper
/// are not part of it.
pub fn state_distance(s1: &WorldState, s2: &WorldState) -> Result<f64> {
    if !s1.same_scene(s2) {
        return Err(invalid_input("states belong to different scenes"));
    }
    Ok(positional_distance(s1, s2))
}

pub(crate) fn positional_distance(s1: &WorldState, s2: &WorldState) -> f64 {
    let rods: f64 = s1
        .rods
        .iter()
        .zip(s2.rods.iter())
        .map(|(a, b)| math::hypot(a.x - b.x, a.y - b.y))
        .sum();
    rods + math::abs(s1.drawer_open - s2.drawer_open)
}

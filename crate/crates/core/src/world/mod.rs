//! Ground-truth dynamics, the imperfect transition models and the two tasks.

mod dynamics;
mod models;
mod task;

pub use dynamics::{
    analytical_drawer, analytical_pick_place, drawer_pull_pose, edge_cost, fine_simulator,
    ground_truth, in_miscalibration_region, skill_precondition,
};
pub use models::{ModelCosts, ModelKind, ModelSet, TransitionModel};
pub use task::{generate_params, sample_start, GoalContext, TaskKind, TaskSpec};

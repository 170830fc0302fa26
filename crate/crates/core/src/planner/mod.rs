//! Multi-fidelity weighted A*.
//!
//! Queue 0 is the anchor search: it fully expands nodes, evaluating every
//! action with the fastest model whose precondition holds. Queue `i > 0`
//! expands partially, evaluating only actions that some model at least as fast
//! as `M_i` covers and deferring the rest to the node's pending set.

mod config;
mod key;
mod oracle;
mod preconditions;
mod search;

pub use config::PlannerConfig;
pub use key::{state_key, Resolution, StateKey};
pub use oracle::{optimal_oracle, OracleConfig, OracleOutcome};
pub use preconditions::{AllModels, ModelPreconditions};
pub use search::{choose_queue, Clock, Evaluation, NoClock, PlanResult, PlanStatus, Selection};

use crate::error::Result;
use crate::state::WorldState;
use crate::world::{ModelSet, TaskSpec};
use search::Search;

/// Planner variants compared in benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Prioritized selection with one queue per model.
    Expansion,
    /// Prioritized selection with the anchor queue only.
    SelectionOnly,
    /// One model for every edge.
    SingleModel(usize),
    /// A uniformly random model per edge.
    RandomModel(u64),
}

/// Plans with prioritized selection and prioritized expansion.
pub fn plan(
    start: &WorldState,
    task: &TaskSpec,
    models: &ModelSet,
    pre: &dyn ModelPreconditions,
    cfg: &PlannerConfig,
) -> Result<PlanResult> {
    plan_method(Method::Expansion, start, task, models, pre, cfg, &NoClock)
}

/// Plans with prioritized selection on the anchor queue alone.
pub fn plan_ps_only(
    start: &WorldState,
    task: &TaskSpec,
    models: &ModelSet,
    pre: &dyn ModelPreconditions,
    cfg: &PlannerConfig,
) -> Result<PlanResult> {
    plan_method(Method::SelectionOnly, start, task, models, pre, cfg, &NoClock)
}

/// Single-queue planner that ignores preconditions and picks models by `mode`
/// (`Method::SingleModel` or `Method::RandomModel`).
pub fn plan_baseline(
    start: &WorldState,
    task: &TaskSpec,
    models: &ModelSet,
    mode: Method,
    cfg: &PlannerConfig,
) -> Result<PlanResult> {
    plan_method(mode, start, task, models, &AllModels, cfg, &NoClock)
}

pub fn plan_method(
    method: Method,
    start: &WorldState,
    task: &TaskSpec,
    models: &ModelSet,
    pre: &dyn ModelPreconditions,
    cfg: &PlannerConfig,
    clock: &dyn Clock,
) -> Result<PlanResult> {
    let (selection, queues) = match method {
        Method::Expansion => (Selection::Prioritized, models.len()),
        Method::SelectionOnly => (Selection::Prioritized, 1),
        Method::SingleModel(i) => (Selection::Fixed(i), 1),
        Method::RandomModel(seed) => (Selection::Random(seed), 1),
    };
    Search::new(task, models, pre, cfg, selection, queues)?.run(start, clock)
}

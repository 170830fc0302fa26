use crate::state::{SkillAction, WorldState};
use crate::world::TransitionModel;

/// Decides whether `model` may be trusted for `(s, a)`.
pub trait ModelPreconditions {
    fn holds(&self, model: &TransitionModel, s: &WorldState, a: &SkillAction) -> bool;
}

impl<F> ModelPreconditions for F
where
    F: Fn(&TransitionModel, &WorldState, &SkillAction) -> bool,
{
    fn holds(&self, model: &TransitionModel, s: &WorldState, a: &SkillAction) -> bool {
        self(model, s, a)
    }
}

/// Every model is trusted everywhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllModels;

impl ModelPreconditions for AllModels {
    fn holds(&self, _: &TransitionModel, _: &WorldState, _: &SkillAction) -> bool {
        true
    }
}

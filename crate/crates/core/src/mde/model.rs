use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::features::{extract_features, STATE_FEATURES};
use super::network::Mlp;
use crate::error::{invalid_input, Result};
use crate::planner::ModelPreconditions;
use crate::state::{state_distance, Skill, SkillAction, SkillMap, WorldState};
use crate::world::{ground_truth, GoalContext, ModelKind, TransitionModel};

/// Trained deviation estimator for one `(skill, model)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MdeModel {
    skill: Skill,
    model: ModelKind,
    net: Mlp,
    input_mean: Vec<f64>,
    input_std: Vec<f64>,
}

impl MdeModel {
    pub fn new(skill: Skill, model: ModelKind, net: Mlp, input_mean: Vec<f64>, input_std: Vec<f64>) -> Result<Self> {
        let width = STATE_FEATURES + skill.arity();
        if net.inputs() != width || input_mean.len() != width || input_std.len() != width {
            return Err(invalid_input(alloc::format!(
                "{skill} estimator expects {width} inputs"
            )));
        }
        if input_std.iter().any(|s| !(s.is_finite() && *s > 0.0)) || input_mean.iter().any(|m| !m.is_finite()) {
            return Err(invalid_input("normalization vectors must be finite with positive scales"));
        }
        Ok(MdeModel { skill, model, net, input_mean, input_std })
    }

    pub fn skill(&self) -> Skill {
        self.skill
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn network(&self) -> &Mlp {
        &self.net
    }

    pub fn input_mean(&self) -> &[f64] {
        &self.input_mean
    }

    pub fn input_std(&self) -> &[f64] {
        &self.input_std
    }

    /// Predicted deviation in cm for a raw feature row, clamped at zero.
    pub fn predict_features(&self, features: &[f64]) -> Result<f64> {
        if features.len() != self.input_mean.len() {
            return Err(invalid_input(alloc::format!(
                "expected {} features, got {}",
                self.input_mean.len(),
                features.len()
            )));
        }
        let x: Vec<f64> = features
            .iter()
            .zip(&self.input_mean)
            .zip(&self.input_std)
            .map(|((v, m), s)| (v - m) / s)
            .collect();
        let y = self.net.forward(&x);
        Ok(if y.is_nan() { f64::INFINITY } else { y.max(0.0) })
    }

    pub fn predict_deviation(&self, s: &WorldState, a: &SkillAction, goal: &GoalContext) -> Result<f64> {
        if a.skill != self.skill {
            return Err(invalid_input(alloc::format!(
                "{} action given to the {} estimator",
                a.skill,
                self.skill
            )));
        }
        self.predict_features(&extract_features(s, a, goal).values)
    }
}

/// `d̂(s, a) < d_max`; any prediction failure counts as outside the precondition.
pub fn in_model_precondition(m: &MdeModel, s: &WorldState, a: &SkillAction, goal: &GoalContext, d_max: f64) -> bool {
    m.predict_deviation(s, a, goal).is_ok_and(|d| d < d_max)
}

/// Estimators indexed by `(skill, model)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MdeSet {
    models: BTreeMap<(usize, usize), MdeModel>,
}

impl MdeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `m`, returning the estimator it replaced.
    pub fn insert(&mut self, m: MdeModel) -> Option<MdeModel> {
        self.models.insert((m.skill.index(), m.model.index()), m)
    }

    pub fn get(&self, skill: Skill, model: ModelKind) -> Option<&MdeModel> {
        self.models.get(&(skill.index(), model.index()))
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MdeModel> {
        self.models.values()
    }
}

/// Model preconditions backed by an [`MdeSet`]. A missing estimator means the
/// model is never trusted for that skill.
#[derive(Debug, Clone)]
pub struct MdePreconditions<'a> {
    pub mdes: &'a MdeSet,
    pub d_max: SkillMap<f64>,
    pub goal: GoalContext,
}

impl ModelPreconditions for MdePreconditions<'_> {
    fn holds(&self, model: &TransitionModel, s: &WorldState, a: &SkillAction) -> bool {
        self.mdes
            .get(a.skill, model.kind)
            .is_some_and(|m| in_model_precondition(m, s, a, &self.goal, self.d_max[a.skill]))
    }
}

/// Preconditions from the true deviation instead of a learned estimate: a
/// model is trusted where its prediction lands within `d_max` of the ground
/// truth. What a perfect estimator would give; used for bound checks that
/// should not depend on training.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactDeviation {
    pub d_max: SkillMap<f64>,
}

impl ModelPreconditions for ExactDeviation {
    fn holds(&self, model: &TransitionModel, s: &WorldState, a: &SkillAction) -> bool {
        let (Ok(pred), Ok(real)) = (model.forward(s, a), ground_truth(s, a)) else {
            return false;
        };
        state_distance(&pred, &real).is_ok_and(|d| d < self.d_max[a.skill])
    }
}

use alloc::vec::Vec;
use core::fmt;

use super::dynamics;
use crate::error::{invalid_input, Result};
use crate::state::{SkillAction, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModelKind {
    FineSimulator,
    AnalyticalDrawer,
    AnalyticalPickPlace,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] =
        [ModelKind::FineSimulator, ModelKind::AnalyticalDrawer, ModelKind::AnalyticalPickPlace];

    pub const fn name(self) -> &'static str {
        match self {
            ModelKind::FineSimulator => "simulator",
            ModelKind::AnalyticalDrawer => "analytical_drawer",
            ModelKind::AnalyticalPickPlace => "analytical_pick_place",
        }
    }

    pub fn from_name(name: &str) -> Option<ModelKind> {
        ModelKind::ALL.into_iter().find(|m| m.name() == name)
    }

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn forward(self, s: &WorldState, a: &SkillAction) -> Result<WorldState> {
        match self {
            ModelKind::FineSimulator => dynamics::fine_simulator(s, a),
            ModelKind::AnalyticalDrawer => dynamics::analytical_drawer(s, a),
            ModelKind::AnalyticalPickPlace => dynamics::analytical_pick_place(s, a),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Relative price of one forward evaluation of each model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelCosts {
    pub fine_simulator: f64,
    pub analytical_drawer: f64,
    pub analytical_pick_place: f64,
}

impl Default for ModelCosts {
    fn default() -> Self {
        Self { fine_simulator: 200.0, analytical_drawer: 1.1, analytical_pick_place: 1.0 }
    }
}

impl ModelCosts {
    pub fn of(&self, kind: ModelKind) -> f64 {
        match kind {
            ModelKind::FineSimulator => self.fine_simulator,
            ModelKind::AnalyticalDrawer => self.analytical_drawer,
            ModelKind::AnalyticalPickPlace => self.analytical_pick_place,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionModel {
    /// Position in the owning [`ModelSet`]; 0 is the slowest.
    pub id: usize,
    pub kind: ModelKind,
    pub eval_cost: f64,
}

impl TransitionModel {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn forward(&self, s: &WorldState, a: &SkillAction) -> Result<WorldState> {
        self.kind.forward(s, a)
    }
}

/// Models ordered from slowest (index 0) to fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    models: Vec<TransitionModel>,
}

impl ModelSet {
    /// Fails unless `eval_cost` strictly decreases along `kinds`.
    pub fn new(kinds: &[ModelKind], costs: &ModelCosts) -> Result<Self> {
        if kinds.is_empty() {
            return Err(invalid_input("at least one transition model is required"));
        }
        let models: Vec<_> = kinds
            .iter()
            .enumerate()
            .map(|(id, &kind)| TransitionModel { id, kind, eval_cost: costs.of(kind) })
            .collect();
        if models.iter().any(|m| !(m.eval_cost.is_finite() && m.eval_cost >= 0.0)) {
            return Err(invalid_input("model evaluation costs must be finite and non-negative"));
        }
        if models.windows(2).any(|w| w[0].eval_cost <= w[1].eval_cost) {
            return Err(invalid_input("models must be ordered by strictly decreasing eval cost"));
        }
        Ok(Self { models })
    }

    pub fn single(kind: ModelKind, costs: &ModelCosts) -> Self {
        Self { models: alloc::vec![TransitionModel { id: 0, kind, eval_cost: costs.of(kind) }] }
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn get(&self, id: usize) -> &TransitionModel {
        &self.models[id]
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = &TransitionModel> + ExactSizeIterator {
        self.models.iter()
    }

    pub fn as_slice(&self) -> &[TransitionModel] {
        &self.models
    }
}

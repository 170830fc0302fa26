use alloc::vec;
use alloc::vec::Vec;

use super::key::Resolution;
use crate::error::{invalid_input, Result};
use crate::world::TaskKind;

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    /// Heuristic inflation.
    pub epsilon: f64,
    /// Queue preference weights, one per model, non-increasing.
    pub weights: Vec<f64>,
    pub expansion_budget: usize,
    /// Wall-clock budget in seconds, checked through the supplied clock.
    pub time_budget: Option<f64>,
    pub resolution: Resolution,
    /// Seed for skill-parameter sampling; combined with each state's key.
    pub param_seed: u64,
    /// Record every model evaluation in the result.
    pub record_trace: bool,
}

impl PlannerConfig {
    pub fn for_task(kind: TaskKind) -> Self {
        let (epsilon, weights) = match kind {
            TaskKind::RodInBox => (5.0, vec![10.0, 1.0]),
            TaskKind::RodInDrawer => (10.0, vec![10.0, 1.1, 1.0]),
        };
        PlannerConfig {
            epsilon,
            weights,
            expansion_budget: 2000,
            time_budget: None,
            resolution: Resolution::default(),
            param_seed: 0,
            record_trace: false,
        }
    }

    /// Checks the configuration against a planner with `queues` queues.
    pub fn validate(&self, queues: usize) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 1.0) {
            return Err(invalid_input("epsilon must be finite and at least 1"));
        }
        if self.weights.len() < queues {
            return Err(invalid_input(alloc::format!(
                "{} weights given for {queues} models",
                self.weights.len()
            )));
        }
        let w = &self.weights[..queues];
        if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid_input("weights must be finite and positive"));
        }
        if w.windows(2).any(|p| p[0] < p[1]) {
            return Err(invalid_input("weights must be non-increasing"));
        }
        if !self.resolution.is_valid() {
            return Err(invalid_input("resolution must be positive"));
        }
        if self.time_budget.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
            return Err(invalid_input("time budget must be positive"));
        }
        Ok(())
    }

    /// `w_0 / min(w)` over the first `queues` weights.
    pub fn weight_ratio(&self, queues: usize) -> f64 {
        let w = &self.weights[..queues.min(self.weights.len())];
        let min = w.iter().copied().fold(f64::INFINITY, f64::min);
        w.first().map_or(1.0, |w0| w0 / min)
    }
}

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use core::cmp::{Ordering, Reverse};

use super::config::PlannerConfig;
use super::key::{state_key, StateKey};
use super::preconditions::ModelPreconditions;
use crate::error::Result;
use crate::rng::mix;
use crate::state::WorldState;
use crate::world::{edge_cost, generate_params, skill_precondition, ModelSet, TaskSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Maximum number of settled states before giving up.
    pub node_budget: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { node_budget: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOutcome {
    Optimal(f64),
    /// Every reachable state was settled without reaching the goal.
    Unreachable,
    /// Node budget ran out first.
    Infeasible,
}

impl OracleOutcome {
    pub fn cost(self) -> Option<f64> {
        match self {
            OracleOutcome::Optimal(c) => Some(c),
            OracleOutcome::Unreachable => Some(f64::INFINITY),
            OracleOutcome::Infeasible => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cost(f64);

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Uniform-cost search over the edge set used by full expansion: an edge
/// exists when some model's precondition holds, and its successor comes from
/// the fastest such model.
pub fn optimal_oracle(
    start: &WorldState,
    task: &TaskSpec,
    models: &ModelSet,
    pre: &dyn ModelPreconditions,
    cfg: &PlannerConfig,
    oracle: &OracleConfig,
) -> Result<OracleOutcome> {
    start.validate()?;
    let start_key = state_key(start, &cfg.resolution);
    let start_state = start.clone();
    let mut states: BTreeMap<StateKey, (f64, WorldState)> = BTreeMap::new();
    let mut settled: BTreeSet<StateKey> = BTreeSet::new();
    let mut heap = BinaryHeap::new();
    states.insert(start_key, (0.0, start_state));
    heap.push(Reverse((Cost(0.0), start_key)));

    while let Some(Reverse((Cost(g), key))) = heap.pop() {
        if !settled.insert(key) {
            continue;
        }
        let s = states[&key].1.clone();
        if task.is_goal(&s) {
            return Ok(OracleOutcome::Optimal(g));
        }
        if settled.len() > oracle.node_budget {
            return Ok(OracleOutcome::Infeasible);
        }
        let seed = mix(cfg.param_seed, key.fingerprint());
        for &skill in task.skills() {
            for a in generate_params(&s, skill, task, seed) {
                if !skill_precondition(&s, &a) {
                    continue;
                }
                let Some(m) = (0..models.len()).rev().find(|&i| pre.holds(models.get(i), &s, &a)) else {
                    continue;
                };
                let Ok(next) = models.get(m).forward(&s, &a) else {
                    continue;
                };
                let next_key = state_key(&next, &cfg.resolution);
                if settled.contains(&next_key) {
                    continue;
                }
                let ng = g + edge_cost(&s, &a);
                match states.get_mut(&next_key) {
                    Some(entry) if ng < entry.0 => entry.0 = ng,
                    Some(_) => continue,
                    None => {
                        states.insert(next_key, (ng, next));
                    }
                }
                heap.push(Reverse((Cost(ng), next_key)));
            }
        }
    }
    Ok(OracleOutcome::Unreachable)
}

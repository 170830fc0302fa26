//! Run configuration.
//!
//! The file is flat `key = value` text with dotted section prefixes, which is
//! valid TOML:
//!
//! ```text
//! world.rod_length = 18.5
//! planner.rod_in_box.epsilon = 5
//! planner.rod_in_drawer.d_max.lift_and_drop = 5
//! ```
//!
//! Every key is optional. User values are merged over the serialized defaults,
//! so unknown keys and type mismatches are reported with their full path.

use std::path::Path;
use std::sync::Arc;

use mfplan_core::mde::TrainConfig;
use mfplan_core::planner::{PlannerConfig, Resolution};
use mfplan_core::world::{GoalContext, ModelCosts, TaskKind, TaskSpec};
use mfplan_core::{Scene, SkillMap};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub world: Scene,
    pub mde: MdeSection,
    pub planner: PlannerSection,
    pub bench: BenchSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdeSection {
    #[serde(flatten)]
    pub train: TrainConfig,
    /// Episodes collected per task by `collect`.
    pub episodes_rod_in_box: usize,
    pub episodes_rod_in_drawer: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSection {
    pub expansion_budget: usize,
    /// Seconds; 0 disables the wall-clock budget.
    pub time_budget: f64,
    pub resolution: Resolution,
    pub model_costs: ModelCosts,
    pub rod_in_box: TaskSection,
    pub rod_in_drawer: TaskSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSection {
    pub epsilon: f64,
    pub weights: Vec<f64>,
    pub samples_per_skill: usize,
    pub d_max: SkillMap<f64>,
    pub drop_margin: f64,
    pub grasp_end_margin: f64,
    pub open_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSection {
    pub instances: usize,
    pub methods: Vec<String>,
    /// Record plan wall time. Off by default so reports stay byte-identical.
    pub wall_time: bool,
    pub verify_instances: usize,
    pub oracle_node_budget: usize,
    /// Expansion budget for the planners during bound verification.
    pub verify_expansion_budget: usize,
}

impl TaskSection {
    fn defaults(kind: TaskKind) -> Self {
        let spec = TaskSpec::new(kind, 0);
        let planner = PlannerConfig::for_task(kind);
        TaskSection {
            epsilon: planner.epsilon,
            weights: planner.weights,
            samples_per_skill: spec.samples_per_skill,
            d_max: spec.d_max,
            drop_margin: spec.drop_margin,
            grasp_end_margin: spec.grasp_end_margin,
            open_range: [spec.open_range.0, spec.open_range.1],
        }
    }
}

impl Default for Config {
    fn default() -> Self {
        let planner = PlannerConfig::for_task(TaskKind::RodInBox);
        Config {
            world: Scene::default(),
            mde: MdeSection { train: TrainConfig::default(), episodes_rod_in_box: 26, episodes_rod_in_drawer: 17 },
            planner: PlannerSection {
                expansion_budget: planner.expansion_budget,
                time_budget: 0.0,
                resolution: planner.resolution,
                model_costs: ModelCosts::default(),
                rod_in_box: TaskSection::defaults(TaskKind::RodInBox),
                rod_in_drawer: TaskSection::defaults(TaskKind::RodInDrawer),
            },
            bench: BenchSection {
                instances: 10,
                methods: crate::bench::BenchMethod::ALL.iter().map(|m| m.name().to_string()).collect(),
                wall_time: false,
                verify_instances: 100,
                oracle_node_budget: 20_000,
                verify_expansion_budget: 20_000,
            },
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Loads `path`, or the defaults when no path is given.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Config::default()), Self::load)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let user: Table = text.parse().map_err(|e| CliError::Usage(format!("config syntax: {e}")))?;
        let mut merged = match Value::try_from(Config::default()) {
            Ok(Value::Table(t)) => t,
            _ => return Err(CliError::Failed("default config does not serialize to a table".into())),
        };
        merge(&mut merged, user, "")?;
        let cfg: Config = Value::Table(merged)
            .try_into()
            .map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.world.validate()?;
        self.mde.train.validate()?;
        for kind in [TaskKind::RodInBox, TaskKind::RodInDrawer] {
            let models = kind.default_models().len();
            self.planner_config(kind).validate(models)?;
            let t = self.task(kind);
            if !t.d_max.pick.is_finite() || !t.d_max.lift_and_drop.is_finite() || !t.d_max.open_drawer.is_finite() {
                return Err(CliError::Usage(format!("{}: d_max must be finite", kind.name())));
            }
            if !(t.open_range[0] <= t.open_range[1]) {
                return Err(CliError::Usage(format!("{}: open_range must be ordered", kind.name())));
            }
        }
        let c = &self.planner.model_costs;
        if [c.fine_simulator, c.analytical_drawer, c.analytical_pick_place].iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(CliError::Usage("model costs must be positive".into()));
        }
        if self.planner.time_budget < 0.0 || !self.planner.time_budget.is_finite() {
            return Err(CliError::Usage("planner.time_budget must be >= 0".into()));
        }
        for m in &self.bench.methods {
            crate::bench::BenchMethod::from_name(m)
                .ok_or_else(|| CliError::Usage(format!("bench.methods: unknown method {m:?}")))?;
        }
        Ok(())
    }

    pub fn scene(&self) -> Arc<Scene> {
        Arc::new(self.world.clone())
    }

    pub fn task(&self, kind: TaskKind) -> &TaskSection {
        match kind {
            TaskKind::RodInBox => &self.planner.rod_in_box,
            TaskKind::RodInDrawer => &self.planner.rod_in_drawer,
        }
    }

    /// Task with the configured generation settings and thresholds.
    pub fn task_spec(&self, kind: TaskKind, target_rod: usize) -> TaskSpec {
        let t = self.task(kind);
        TaskSpec {
            goal: GoalContext::new(kind, target_rod),
            samples_per_skill: t.samples_per_skill,
            d_max: t.d_max,
            drop_margin: t.drop_margin,
            grasp_end_margin: t.grasp_end_margin,
            open_range: (t.open_range[0], t.open_range[1]),
        }
    }

    pub fn planner_config(&self, kind: TaskKind) -> PlannerConfig {
        let t = self.task(kind);
        PlannerConfig {
            epsilon: t.epsilon,
            weights: t.weights.clone(),
            expansion_budget: self.planner.expansion_budget,
            time_budget: (self.planner.time_budget > 0.0).then_some(self.planner.time_budget),
            resolution: self.planner.resolution,
            param_seed: 0,
            record_trace: false,
        }
    }
}

fn merge(base: &mut Table, user: Table, prefix: &str) -> Result<(), CliError> {
    for (key, value) in user {
        let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
        let Some(slot) = base.get_mut(&key) else {
            return Err(CliError::Usage(format!("unknown config key {path:?}")));
        };
        match (slot, value) {
            (Value::Table(b), Value::Table(u)) => merge(b, u, &path)?,
            (Value::Table(_), _) => return Err(CliError::Usage(format!("config key {path:?} is a section"))),
            (_, Value::Table(_)) => return Err(CliError::Usage(format!("config key {path:?} is not a section"))),
            (slot @ Value::Float(_), Value::Integer(i)) => *slot = Value::Float(i as f64),
            (Value::Array(b), Value::Array(u)) if b.iter().all(Value::is_float) => {
                *b = u.into_iter().map(|v| if let Value::Integer(i) = v { Value::Float(i as f64) } else { v }).collect();
            }
            (slot, v) => *slot = v,
        }
    }
    Ok(())
}

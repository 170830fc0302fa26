//! Seeded planner comparison.
//!
//! Every method runs on the same instances per task. Found plans are executed
//! in the ground-truth world to measure execution success. Rows are ordered by
//! task, then method (in the order requested), then instance index.

use std::time::Instant;

use mfplan_core::datagen::execute_plan;
use mfplan_core::mde::{MdePreconditions, MdeSet};
use mfplan_core::planner::{plan_method, AllModels, Clock, Method, ModelPreconditions, NoClock, PlanResult, PlannerConfig};
use mfplan_core::rng::mix;
use mfplan_core::world::{sample_start, ModelKind, ModelSet, TaskKind, TaskSpec};
use mfplan_core::WorldState;
use rayon::prelude::*;

use crate::config::Config;
use crate::error::CliError;
use crate::numfmt::g6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMethod {
    /// Prioritized selection and expansion with learned preconditions.
    PsPe,
    /// Prioritized selection, anchor queue only.
    PsOnly,
    /// Uniformly random model per edge.
    Random,
    /// Slowest, most faithful model for every edge.
    SimOnly,
    /// Fastest model for every edge.
    AnalyticalOnly,
}

impl BenchMethod {
    pub const ALL: [BenchMethod; 5] =
        [BenchMethod::PsPe, BenchMethod::PsOnly, BenchMethod::Random, BenchMethod::SimOnly, BenchMethod::AnalyticalOnly];

    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::PsPe => "ps_pe",
            BenchMethod::PsOnly => "ps_only",
            BenchMethod::Random => "random",
            BenchMethod::SimOnly => "sim_only",
            BenchMethod::AnalyticalOnly => "analytical_only",
        }
    }

    pub fn from_name(name: &str) -> Option<BenchMethod> {
        BenchMethod::ALL.into_iter().find(|m| m.name() == name.trim())
    }

    pub fn uses_mdes(self) -> bool {
        matches!(self, BenchMethod::PsPe | BenchMethod::PsOnly)
    }

    fn planner(self, models: usize, instance_seed: u64) -> Method {
        match self {
            BenchMethod::PsPe => Method::Expansion,
            BenchMethod::PsOnly => Method::SelectionOnly,
            BenchMethod::Random => Method::RandomModel(mix(instance_seed, 0x52)),
            BenchMethod::SimOnly => Method::SingleModel(0),
            BenchMethod::AnalyticalOnly => Method::SingleModel(models - 1),
        }
    }
}

/// Parses a comma-separated method list.
pub fn parse_methods(csv: &str) -> Result<Vec<BenchMethod>, CliError> {
    csv.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| BenchMethod::from_name(s).ok_or_else(|| CliError::Usage(format!("unknown method {s:?}"))))
        .collect()
}

/// Seed of instance `index` of `task` under run seed `seed`.
pub fn instance_seed(seed: u64, task: TaskKind, index: usize) -> u64 {
    mix(seed, ((task as u64) << 32) | index as u64)
}

/// Start state and task of one benchmark instance.
pub fn instance(cfg: &Config, task: TaskKind, seed: u64) -> (WorldState, TaskSpec) {
    let (start, target) = sample_start(&cfg.scene(), seed);
    (start, cfg.task_spec(task, target))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRow {
    pub task: TaskKind,
    pub method: BenchMethod,
    pub instance: usize,
    pub seed: u64,
    pub status: &'static str,
    pub plan_length: usize,
    pub cost: f64,
    pub weighted_eval_cost: f64,
    /// Evaluations per model kind, indexed by `ModelKind::index`.
    pub evals: [usize; 3],
    pub expansions: usize,
    pub wall_time: f64,
    /// Evaluations made by a model other than the fastest one whose
    /// precondition holds. Only counted for the precondition-driven methods.
    pub ps_violations: usize,
    pub executed_success: bool,
}

struct WallClock(Instant);

impl Clock for WallClock {
    fn elapsed_secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

fn ps_violations(r: &PlanResult, models: &ModelSet, pre: &dyn ModelPreconditions) -> usize {
    r.trace
        .iter()
        .filter(|e| {
            let fastest = (0..models.len()).rev().find(|&i| pre.holds(models.get(i), &e.state, &e.action));
            fastest != Some(e.model)
        })
        .count()
}

fn run_one(
    cfg: &Config,
    mdes: Option<&MdeSet>,
    task: TaskKind,
    method: BenchMethod,
    index: usize,
    seed: u64,
) -> Result<InstanceRow, CliError> {
    let iseed = instance_seed(seed, task, index);
    let (start, spec) = instance(cfg, task, iseed);
    let models = ModelSet::new(task.default_models(), &cfg.planner.model_costs)?;
    let planner_cfg = PlannerConfig {
        param_seed: mix(iseed, 0x9a7a),
        record_trace: method.uses_mdes(),
        ..cfg.planner_config(task)
    };
    let mde_pre;
    let pre: &dyn ModelPreconditions = if method.uses_mdes() {
        let mdes = mdes.ok_or_else(|| CliError::Usage(format!("{} needs trained estimators", method.name())))?;
        mde_pre = MdePreconditions { mdes, d_max: spec.d_max, goal: spec.goal };
        &mde_pre
    } else {
        &AllModels
    };
    let planner = method.planner(models.len(), iseed);
    // a wall-clock budget needs a real clock even when times are not reported
    let result = if cfg.bench.wall_time || cfg.planner.time_budget > 0.0 {
        plan_method(planner, &start, &spec, &models, pre, &planner_cfg, &WallClock(Instant::now()))?
    } else {
        plan_method(planner, &start, &spec, &models, pre, &planner_cfg, &NoClock)?
    };
    let mut evals = [0usize; 3];
    for (i, m) in models.iter().enumerate() {
        evals[m.kind.index()] += result.evals[i];
    }
    let executed_success = result.found() && {
        let steps = execute_plan(&start, &result.actions, 0)?;
        let end = steps.last().map_or(&start, |t| &t.s_next);
        steps.len() == result.actions.len() && spec.is_goal(end)
    };
    Ok(InstanceRow {
        task,
        method,
        instance: index,
        seed: iseed,
        status: result.status.name(),
        plan_length: result.actions.len(),
        cost: result.cost,
        weighted_eval_cost: result.weighted_eval_cost,
        evals,
        expansions: result.expansions,
        wall_time: if cfg.bench.wall_time { result.wall_time } else { 0.0 },
        ps_violations: if method.uses_mdes() { ps_violations(&result, &models, pre) } else { 0 },
        executed_success,
    })
}

/// Runs every `(task, method, instance)` combination. Instances run in
/// parallel unless wall time is recorded.
pub fn run_bench(
    cfg: &Config,
    mdes: Option<&MdeSet>,
    tasks: &[TaskKind],
    methods: &[BenchMethod],
    instances: usize,
    seed: u64,
) -> Result<Vec<InstanceRow>, CliError> {
    let jobs: Vec<(TaskKind, BenchMethod, usize)> = tasks
        .iter()
        .flat_map(|&t| methods.iter().flat_map(move |&m| (0..instances).map(move |i| (t, m, i))))
        .collect();
    let run = |&(t, m, i): &(TaskKind, BenchMethod, usize)| run_one(cfg, mdes, t, m, i, seed);
    if cfg.bench.wall_time {
        jobs.iter().map(run).collect()
    } else {
        jobs.par_iter().map(run).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: BenchMethod,
    pub task: TaskKind,
    pub instances: usize,
    pub plan_wall_time_mean: f64,
    pub weighted_eval_cost_mean: f64,
    pub evals_mean: [f64; 3],
    pub plan_found_rate: f64,
    pub execution_success_rate: f64,
    pub ps_violations: usize,
}

/// Per `(task, method)` means over all instances, found or not.
pub fn summarize(rows: &[InstanceRow]) -> Vec<SummaryRow> {
    let mut groups: Vec<(TaskKind, BenchMethod)> = Vec::new();
    for r in rows {
        if !groups.contains(&(r.task, r.method)) {
            groups.push((r.task, r.method));
        }
    }
    groups
        .into_iter()
        .map(|(task, method)| {
            let g: Vec<&InstanceRow> = rows.iter().filter(|r| r.task == task && r.method == method).collect();
            let n = g.len() as f64;
            let mean = |f: &dyn Fn(&InstanceRow) -> f64| g.iter().map(|r| f(r)).sum::<f64>() / n;
            SummaryRow {
                method,
                task,
                instances: g.len(),
                plan_wall_time_mean: mean(&|r| r.wall_time),
                weighted_eval_cost_mean: mean(&|r| r.weighted_eval_cost),
                evals_mean: [0, 1, 2].map(|k| mean(&|r| r.evals[k] as f64)),
                plan_found_rate: mean(&|r| f64::from(u8::from(r.status == "found"))),
                execution_success_rate: mean(&|r| f64::from(u8::from(r.executed_success))),
                ps_violations: g.iter().map(|r| r.ps_violations).sum(),
            }
        })
        .collect()
}

fn eval_columns(prefix: &str) -> String {
    ModelKind::ALL.iter().map(|m| format!("{prefix}{}", m.name())).collect::<Vec<_>>().join(",")
}

pub fn instances_header() -> String {
    format!(
        "task,method,instance,seed,status,plan_length,cost,weighted_eval_cost,{},expansions,wall_time,ps_violations,executed_success",
        eval_columns("evals_")
    )
}

pub fn summary_header() -> String {
    format!(
        "method,task,instances,plan_wall_time_mean,weighted_eval_cost_mean,{},plan_found_rate,execution_success_rate,ps_violations",
        eval_columns("evals_mean_")
    )
}

pub fn instances_csv(rows: &[InstanceRow]) -> String {
    let mut s = instances_header();
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.task,
            r.method.name(),
            r.instance,
            r.seed,
            r.status,
            r.plan_length,
            g6(r.cost),
            g6(r.weighted_eval_cost),
            r.evals[0],
            r.evals[1],
            r.evals[2],
            r.expansions,
            g6(r.wall_time),
            r.ps_violations,
            u8::from(r.executed_success)
        ));
    }
    s
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = summary_header();
    s.push('\n');
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.method.name(),
            r.task,
            r.instances,
            g6(r.plan_wall_time_mean),
            g6(r.weighted_eval_cost_mean),
            g6(r.evals_mean[0]),
            g6(r.evals_mean[1]),
            g6(r.evals_mean[2]),
            g6(r.plan_found_rate),
            g6(r.execution_success_rate),
            r.ps_violations
        ));
    }
    s
}

/// Fixed-width rendering of the summary for terminals.
pub fn summary_table(rows: &[SummaryRow], seed: u64) -> String {
    let mut s = format!(
        "{:<14} {:<16} {:>5} {:>12} {:>14} {:>10} {:>10} {:>10} {:>7} {:>7}\n",
        "task", "method", "n", "wall (s)", "weighted cost", "sim", "drawer", "pick&place", "found", "success"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<14} {:<16} {:>5} {:>12} {:>14} {:>10} {:>10} {:>10} {:>7.2} {:>7.2}\n",
            r.task.name(),
            r.method.name(),
            r.instances,
            g6(r.plan_wall_time_mean),
            g6(r.weighted_eval_cost_mean),
            g6(r.evals_mean[0]),
            g6(r.evals_mean[1]),
            g6(r.evals_mean[2]),
            r.plan_found_rate,
            r.execution_success_rate
        ));
    }
    s.push_str(&format!("seed {seed}; model columns are mean evaluations per instance\n"));
    s
}

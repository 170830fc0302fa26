//! Episode collection and dataset assembly.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{invalid_input, Result};
use crate::mde::{augment, extract_features, label_transitions, split_validation, LabeledRow, TrainConfig};
use crate::planner::{plan_method, AllModels, Method, NoClock, PlannerConfig};
use crate::rng::{mix, stream};
use crate::state::{Scene, SkillAction, Transition, WorldState};
use crate::world::{ground_truth, sample_start, skill_precondition, GoalContext, ModelCosts, ModelKind, ModelSet, TaskKind, TaskSpec};

/// Transitions observed while executing one plan in the ground-truth world.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub episode_id: u64,
    pub task: TaskKind,
    pub target_rod: usize,
    pub seed: u64,
    pub planner: String,
    pub transitions: Vec<Transition>,
    pub reached_goal: bool,
}

impl EpisodeLog {
    pub fn goal(&self) -> GoalContext {
        GoalContext::new(self.task, self.target_rod)
    }

    /// Each transition starts where the previous one ended.
    pub fn is_chained(&self) -> bool {
        self.transitions.windows(2).all(|w| w[0].s_next == w[1].s)
    }
}

/// Executes `actions` from `start` in the ground-truth world, stopping at the
/// first action whose skill precondition fails.
pub fn execute_plan(start: &WorldState, actions: &[SkillAction], episode_id: u64) -> Result<Vec<Transition>> {
    let mut s = start.clone();
    let mut out = Vec::with_capacity(actions.len());
    for (step, a) in actions.iter().enumerate() {
        if !skill_precondition(&s, a) {
            break;
        }
        let next = ground_truth(&s, a)?;
        out.push(Transition { s: s.clone(), a: *a, s_next: next.clone(), episode_id, step: step as u32 });
        s = next;
    }
    Ok(out)
}

/// Samples a start, plans with `method` over the task's models (all
/// preconditions true), and executes the plan. `template` supplies the task
/// kind and parameter-generation settings; its target rod is replaced by the
/// sampled one.
pub fn run_episode(
    scene: &Arc<Scene>,
    template: &TaskSpec,
    method: Method,
    cfg: &PlannerConfig,
    costs: &ModelCosts,
    seed: u64,
    episode_id: u64,
) -> Result<EpisodeLog> {
    let kind = template.kind();
    let (start, target_rod) = sample_start(scene, seed);
    let task = TaskSpec { goal: GoalContext::new(kind, target_rod), ..template.clone() };
    let models = ModelSet::new(kind.default_models(), costs)?;
    let cfg = PlannerConfig { param_seed: mix(seed, 0x9a7a), ..cfg.clone() };
    let result = plan_method(method, &start, &task, &models, &AllModels, &cfg, &NoClock)?;
    let transitions = if result.found() { execute_plan(&start, &result.actions, episode_id)? } else { Vec::new() };
    let reached_goal = transitions.last().is_some_and(|t| task.is_goal(&t.s_next)) || (result.found() && result.actions.is_empty());
    Ok(EpisodeLog {
        episode_id,
        task: kind,
        target_rod,
        seed,
        planner: method_label(method),
        transitions,
        reached_goal,
    })
}

fn method_label(method: Method) -> String {
    match method {
        Method::Expansion => "ps_pe".into(),
        Method::SelectionOnly => "ps_only".into(),
        Method::SingleModel(i) => alloc::format!("single_model_{i}"),
        Method::RandomModel(_) => "random".into(),
    }
}

/// Indices of episodes held out for testing, chosen greedily in seeded order
/// so the held-out transition count approaches `fraction` of the total.
/// At least one non-empty episode always stays in training.
pub fn split_by_episode(logs: &[EpisodeLog], fraction: f64, seed: u64) -> Vec<usize> {
    let nonempty: Vec<usize> = (0..logs.len()).filter(|&i| !logs[i].transitions.is_empty()).collect();
    if nonempty.len() < 2 {
        if fraction > 0.0 && !nonempty.is_empty() {
            log::warn!("only one non-empty episode; the test split is empty");
        }
        return Vec::new();
    }
    let total: usize = nonempty.iter().map(|&i| logs[i].transitions.len()).sum();
    let target = fraction * total as f64;
    let mut order = nonempty.clone();
    order.shuffle(&mut stream(mix(seed, 0x7e57)));
    let mut held = Vec::new();
    let mut count = 0usize;
    for &i in &order {
        if held.len() + 1 == nonempty.len() {
            break;
        }
        let n = logs[i].transitions.len();
        if crate::math::abs((count + n) as f64 - target) < crate::math::abs(count as f64 - target) {
            held.push(i);
            count += n;
        }
    }
    held.sort_unstable();
    held
}

/// Labeled rows for every transition of every log, against `model`.
pub fn label_episodes(logs: &[&EpisodeLog], model: ModelKind) -> Result<Vec<LabeledRow>> {
    let mut rows = Vec::new();
    for log in logs {
        rows.extend(label_transitions(&log.transitions, &log.goal(), model)?);
    }
    Ok(rows)
}

/// Train, validation and test rows for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplits {
    pub train: Vec<LabeledRow>,
    pub val: Vec<LabeledRow>,
    pub test: Vec<LabeledRow>,
    pub test_episodes: Vec<u64>,
}

/// Holds out whole episodes for testing, augments the rest, then splits off
/// the validation fraction from the augmented rows.
pub fn build_dataset(logs: &[EpisodeLog], model: ModelKind, cfg: &TrainConfig, seed: u64) -> Result<DatasetSplits> {
    if logs.iter().all(|l| l.transitions.is_empty()) {
        return Err(invalid_input("no transitions to build a dataset from"));
    }
    let held = split_by_episode(logs, cfg.test_fraction, seed);
    let (test_logs, train_logs): (Vec<_>, Vec<_>) = logs.iter().enumerate().partition(|(i, _)| held.contains(i));
    let test_logs: Vec<&EpisodeLog> = test_logs.into_iter().map(|(_, l)| l).collect();
    let train_logs: Vec<&EpisodeLog> = train_logs.into_iter().map(|(_, l)| l).collect();
    let test = label_episodes(&test_logs, model)?;
    let raw_train = label_episodes(&train_logs, model)?;
    let augmented = augment(&raw_train, cfg, mix(seed, 0xa3));
    let (train, val) = split_validation(&augmented, cfg.val_fraction, mix(seed, 0x5a));
    Ok(DatasetSplits { train, val, test, test_episodes: test_logs.iter().map(|l| l.episode_id).collect() })
}

/// Feature rows of `(s, a)` pairs for prediction without labels.
pub fn feature_rows(transitions: &[Transition], goal: &GoalContext) -> Vec<Vec<f64>> {
    transitions.iter().map(|t| extract_features(&t.s, &t.a, goal).values).collect()
}

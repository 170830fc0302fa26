//! Data collection and estimator training driven by a [`Config`].

use mfplan_core::datagen::{build_dataset, run_episode, DatasetSplits, EpisodeLog};
use mfplan_core::mde::{mean_absolute_error, train_mde_split, LabeledRow, MdeModel, TrainConfig, MIN_TRAIN_ROWS};
use mfplan_core::planner::{Method, PlannerConfig};
use mfplan_core::rng::mix;
use mfplan_core::world::{ModelKind, TaskKind};
use mfplan_core::Skill;
use rayon::prelude::*;

use crate::config::Config;
use crate::error::CliError;
use crate::numfmt::g6;

/// Planner for the `k`-th collection episode of a task: each single-model
/// planner in turn, then the random-model planner, repeating.
pub fn collection_method(kind: TaskKind, k: usize, episode_seed: u64) -> Method {
    let models = kind.default_models().len();
    match k % (models + 1) {
        i if i < models => Method::SingleModel(i),
        _ => Method::RandomModel(mix(episode_seed, 0x52)),
    }
}

/// Collects the configured number of episodes per task. Episode ids run over
/// both tasks (box episodes first); each episode's seed is derived from `seed`
/// and its id, and its planner from [`collection_method`]. Collection plans
/// are searched with ε = 1: inflated search chases the nearest end grasp, so
/// centre grasps would almost never be executed and their deviation never
/// learned.
pub fn collect(cfg: &Config, seed: u64) -> Result<Vec<EpisodeLog>, CliError> {
    let scene = cfg.scene();
    let mut jobs = Vec::new();
    let mut id = 0u64;
    for (kind, count) in [
        (TaskKind::RodInBox, cfg.mde.episodes_rod_in_box),
        (TaskKind::RodInDrawer, cfg.mde.episodes_rod_in_drawer),
    ] {
        for k in 0..count {
            jobs.push((kind, k, id));
            id += 1;
        }
    }
    let logs: Result<Vec<_>, _> = jobs
        .par_iter()
        .map(|&(kind, k, id)| {
            let ep_seed = mix(seed, id);
            let planner = PlannerConfig { epsilon: 1.0, ..cfg.planner_config(kind) };
            run_episode(
                &scene,
                &cfg.task_spec(kind, 0),
                collection_method(kind, k, ep_seed),
                &planner,
                &cfg.planner.model_costs,
                ep_seed,
                id,
            )
        })
        .collect();
    Ok(logs?)
}

/// Outcome of training one `(skill, model)` estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOutcome {
    pub skill: Skill,
    pub model: ModelKind,
    /// `None` when the data had too few rows for the skill.
    pub mde: Option<MdeModel>,
    pub train_rows: usize,
    pub val_rows: usize,
    pub test_rows: usize,
    /// Held-out mean absolute error in cm; `None` without test rows or model.
    pub test_mae: Option<f64>,
    pub epochs: usize,
}

fn of_skill(rows: &[LabeledRow], skill: Skill) -> Vec<LabeledRow> {
    rows.iter().filter(|r| r.skill == skill).cloned().collect()
}

/// Trains one estimator per `(skill, model)` pair on the pooled logs. The test
/// episodes are the same for every model because the split only depends on
/// `seed`.
pub fn train_all(cfg: &Config, logs: &[EpisodeLog], seed: u64) -> Result<Vec<PairOutcome>, CliError> {
    let train_cfg = &cfg.mde.train;
    let datasets: Vec<DatasetSplits> = ModelKind::ALL
        .par_iter()
        .map(|&model| build_dataset(logs, model, train_cfg, seed))
        .collect::<Result<_, _>>()?;
    let pairs: Vec<(usize, ModelKind, Skill)> = ModelKind::ALL
        .iter()
        .enumerate()
        .flat_map(|(i, &m)| Skill::ALL.into_iter().map(move |s| (i, m, s)))
        .collect();
    pairs
        .par_iter()
        .map(|&(di, model, skill)| {
            let data = &datasets[di];
            let train = of_skill(&data.train, skill);
            let val = of_skill(&data.val, skill);
            let test = of_skill(&data.test, skill);
            let mut out = PairOutcome {
                skill,
                model,
                mde: None,
                train_rows: train.len(),
                val_rows: val.len(),
                test_rows: test.len(),
                test_mae: None,
                epochs: 0,
            };
            if train.len() + val.len() < MIN_TRAIN_ROWS {
                log::warn!("{skill}/{model}: {} rows, skipping", train.len() + val.len());
                return Ok(out);
            }
            let pair_cfg = TrainConfig {
                seed: mix(seed, (skill.index() * 3 + model.index()) as u64),
                ..train_cfg.clone()
            };
            let (mde, report) = train_mde_split(skill, model, &train, &val, &pair_cfg)?;
            if !test.is_empty() {
                out.test_mae = Some(mean_absolute_error(&mde, &test)?);
            }
            out.epochs = report.epochs;
            out.mde = Some(mde);
            Ok(out)
        })
        .collect()
}

pub const MAE_HEADER: &str = "skill,model,train_rows,val_rows,test_rows,test_mae,epochs";

/// Per-pair rows in the order of [`MAE_HEADER`].
pub fn mae_csv(outcomes: &[PairOutcome]) -> String {
    let mut s = String::from(MAE_HEADER);
    s.push('\n');
    for o in outcomes {
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            o.skill,
            o.model,
            o.train_rows,
            o.val_rows,
            o.test_rows,
            o.test_mae.map_or_else(|| "nan".into(), g6),
            o.epochs
        ));
    }
    s
}

/// Held-out MAE laid out with skills as columns and models as rows.
pub fn mae_table(outcomes: &[PairOutcome]) -> String {
    let mut s = format!("{:<24}", "held-out MAE (cm)");
    for skill in Skill::ALL {
        s.push_str(&format!("{:>14}", skill.name()));
    }
    s.push('\n');
    for model in ModelKind::ALL {
        s.push_str(&format!("{:<24}", model.name()));
        for skill in Skill::ALL {
            let cell = outcomes
                .iter()
                .find(|o| o.skill == skill && o.model == model)
                .and_then(|o| o.test_mae)
                .map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
            s.push_str(&format!("{cell:>14}"));
        }
        s.push('\n');
    }
    s
}

//! Line-delimited JSON episode and transition logs.
//!
//! Every line is one object tagged by `record`. An episode log is a header
//! line followed by that episode's transitions:
//!
//! ```text
//! {"record":"episode","episode_id":0,"task":"rod_in_box","target_rod":1,"seed":..,"planner":"random","reached_goal":true,"transitions":2}
//! {"record":"transition","s":{..},"a":{"skill":"Pick","theta":[..]},"s_next":{..},"episode_id":0,"step":0}
//! ```
//!
//! Floats are written with six significant digits. Scene constants are not
//! logged; readers supply the scene from the configuration.

use std::io::{BufRead, Write};
use std::sync::Arc;

use mfplan_core::datagen::EpisodeLog;
use mfplan_core::world::TaskKind;
use mfplan_core::{Held, Pose2, Scene, Skill, SkillAction, Transition, WorldState};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::numfmt::round6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Record {
    Episode(EpisodeHeader),
    Transition(TransitionRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EpisodeHeader {
    episode_id: u64,
    task: String,
    target_rod: usize,
    seed: u64,
    planner: String,
    reached_goal: bool,
    transitions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionRecord {
    s: StateRecord,
    a: ActionRecord,
    s_next: StateRecord,
    episode_id: u64,
    step: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRecord {
    gripper: PoseRecord,
    gripper_open_width: f64,
    held: Option<HeldRecord>,
    rods: [PoseRecord; 2],
    drawer_open: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseRecord {
    x: f64,
    y: f64,
    yaw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeldRecord {
    rod_index: usize,
    grasp_offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionRecord {
    skill: String,
    theta: Vec<f64>,
}

impl From<&Pose2> for PoseRecord {
    fn from(p: &Pose2) -> Self {
        PoseRecord { x: round6(p.x), y: round6(p.y), yaw: round6(p.yaw) }
    }
}

impl From<&WorldState> for StateRecord {
    fn from(s: &WorldState) -> Self {
        StateRecord {
            gripper: (&s.gripper).into(),
            gripper_open_width: round6(s.gripper_open_width),
            held: s.held.map(|h| HeldRecord { rod_index: h.rod_index, grasp_offset: round6(h.grasp_offset) }),
            rods: [(&s.rods[0]).into(), (&s.rods[1]).into()],
            drawer_open: round6(s.drawer_open),
        }
    }
}

impl From<&Transition> for TransitionRecord {
    fn from(t: &Transition) -> Self {
        TransitionRecord {
            s: (&t.s).into(),
            a: ActionRecord { skill: t.a.skill.name().into(), theta: t.a.theta().iter().map(|v| round6(*v)).collect() },
            s_next: (&t.s_next).into(),
            episode_id: t.episode_id,
            step: t.step,
        }
    }
}

impl PoseRecord {
    fn pose(self) -> Result<Pose2, String> {
        Pose2::new(self.x, self.y, self.yaw).map_err(|e| e.to_string())
    }
}

impl StateRecord {
    fn state(&self, scene: &Arc<Scene>) -> Result<WorldState, String> {
        let s = WorldState {
            gripper: self.gripper.pose()?,
            gripper_open_width: self.gripper_open_width,
            held: self.held.map(|h| Held { rod_index: h.rod_index, grasp_offset: h.grasp_offset }),
            rods: [self.rods[0].pose()?, self.rods[1].pose()?],
            drawer_open: self.drawer_open,
            scene: scene.clone(),
        };
        s.validate().map_err(|e| e.to_string())?;
        Ok(s)
    }
}

impl TransitionRecord {
    fn transition(&self, scene: &Arc<Scene>) -> Result<Transition, String> {
        let skill = Skill::from_name(&self.a.skill).ok_or_else(|| format!("unknown skill {:?}", self.a.skill))?;
        Ok(Transition {
            s: self.s.state(scene)?,
            a: SkillAction::new(skill, &self.a.theta).map_err(|e| e.to_string())?,
            s_next: self.s_next.state(scene)?,
            episode_id: self.episode_id,
            step: self.step,
        })
    }
}

fn line(record: &Record) -> String {
    serde_json::to_string(record).expect("log records always serialize")
}

/// One transition as a log line (no trailing newline).
pub fn transition_line(t: &Transition) -> String {
    line(&Record::Transition(t.into()))
}

/// Parses a line produced by [`transition_line`].
pub fn parse_transition(text: &str, scene: &Arc<Scene>) -> Result<Transition, CliError> {
    match serde_json::from_str::<Record>(text) {
        Ok(Record::Transition(t)) => t.transition(scene).map_err(CliError::Usage),
        Ok(Record::Episode(_)) => Err(CliError::Usage("expected a transition record".into())),
        Err(e) => Err(CliError::Usage(format!("bad transition record: {e}"))),
    }
}

pub fn write_episodes(mut w: impl Write, logs: &[EpisodeLog]) -> std::io::Result<()> {
    for log in logs {
        let header = EpisodeHeader {
            episode_id: log.episode_id,
            task: log.task.name().into(),
            target_rod: log.target_rod,
            seed: log.seed,
            planner: log.planner.clone(),
            reached_goal: log.reached_goal,
            transitions: log.transitions.len(),
        };
        writeln!(w, "{}", line(&Record::Episode(header)))?;
        for t in &log.transitions {
            writeln!(w, "{}", transition_line(t))?;
        }
    }
    w.flush()
}

/// Reads episode logs, checking that every transition follows its header and
/// that each episode has the announced number of steps.
pub fn read_episodes(r: impl BufRead, scene: &Arc<Scene>) -> Result<Vec<EpisodeLog>, CliError> {
    let mut logs: Vec<(EpisodeLog, usize)> = Vec::new();
    for (i, text) in r.lines().enumerate() {
        let lineno = i + 1;
        let err = |msg: String| CliError::Usage(format!("log line {lineno}: {msg}"));
        let text = text.map_err(|e| err(e.to_string()))?;
        if text.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Record>(&text).map_err(|e| err(e.to_string()))? {
            Record::Episode(h) => {
                let task = TaskKind::from_name(&h.task).ok_or_else(|| err(format!("unknown task {:?}", h.task)))?;
                if h.target_rod > 1 {
                    return Err(err("target_rod must be 0 or 1".into()));
                }
                let log = EpisodeLog {
                    episode_id: h.episode_id,
                    task,
                    target_rod: h.target_rod,
                    seed: h.seed,
                    planner: h.planner,
                    transitions: Vec::with_capacity(h.transitions),
                    reached_goal: h.reached_goal,
                };
                logs.push((log, h.transitions));
            }
            Record::Transition(t) => {
                let Some((log, _)) = logs.last_mut() else {
                    return Err(err("transition before any episode header".into()));
                };
                if t.episode_id != log.episode_id {
                    return Err(err(format!("transition of episode {} under header {}", t.episode_id, log.episode_id)));
                }
                log.transitions.push(t.transition(scene).map_err(err)?);
            }
        }
    }
    logs.into_iter()
        .map(|(log, expected)| {
            if log.transitions.len() == expected {
                Ok(log)
            } else {
                Err(CliError::Usage(format!(
                    "episode {} announces {expected} transitions but has {}",
                    log.episode_id,
                    log.transitions.len()
                )))
            }
        })
        .collect()
}

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::PlannerConfig;
use super::key::{state_key, StateKey};
use super::preconditions::ModelPreconditions;
use crate::error::Result;
use crate::rng::{mix, stream};
use crate::state::{SkillAction, WorldState};
use crate::world::{edge_cost, generate_params, skill_precondition, ModelSet, TaskSpec};

/// Elapsed-time source for wall-clock budgets.
pub trait Clock {
    fn elapsed_secs(&self) -> f64;
}

/// Clock that never advances; only the expansion budget applies.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

/// How the model for a new edge is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Fastest model whose precondition holds.
    Prioritized,
    /// Always model `i`, ignoring preconditions.
    Fixed(usize),
    /// Uniformly random model per edge, ignoring preconditions.
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStatus {
    Found,
    Timeout,
    Exhausted,
}

impl PlanStatus {
    pub fn name(self) -> &'static str {
        match self {
            PlanStatus::Found => "found",
            PlanStatus::Timeout => "timeout",
            PlanStatus::Exhausted => "exhausted",
        }
    }
}

/// One model call made during search.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub key: StateKey,
    pub state: WorldState,
    pub action: SkillAction,
    pub model: usize,
    pub queue: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub status: PlanStatus,
    pub actions: Vec<SkillAction>,
    /// Model that predicted each step.
    pub models_used: Vec<usize>,
    pub predicted_states: Vec<WorldState>,
    /// Total end-effector travel in cm; infinite unless found.
    pub cost: f64,
    pub evals: Vec<usize>,
    pub weighted_eval_cost: f64,
    pub expansions: usize,
    pub wall_time: f64,
    pub trace: Vec<Evaluation>,
}

impl PlanResult {
    pub fn found(&self) -> bool {
        self.status == PlanStatus::Found
    }

    pub fn total_evals(&self) -> usize {
        self.evals.iter().sum()
    }
}

/// `argmin_i w_i · min_key_i` over non-empty queues, ties toward larger `i`.
pub fn choose_queue(min_keys: &[Option<f64>], weights: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, key) in min_keys.iter().enumerate() {
        let Some(k) = key else { continue };
        let v = weights[i] * k;
        if best.is_none_or(|(_, b)| v <= b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Debug, Clone)]
struct Node {
    key: StateKey,
    state: WorldState,
    g: f64,
    h: f64,
    parent: Option<(usize, SkillAction, usize)>,
    /// `None` until actions have been generated; afterwards the actions not yet evaluated.
    a_inc: Option<Vec<SkillAction>>,
    closed: u64,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    f: f64,
    g: f64,
    seq: u64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    /// Max-heap order: smaller f, then larger g, then earlier insertion.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then(self.g.total_cmp(&other.g))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Search over the graph induced by parameter sampling and model selection.
pub(crate) struct Search<'a> {
    task: &'a TaskSpec,
    models: &'a ModelSet,
    pre: &'a dyn ModelPreconditions,
    cfg: &'a PlannerConfig,
    selection: Selection,
    rng: ChaCha8Rng,
    queues: usize,
    nodes: Vec<Node>,
    index: BTreeMap<StateKey, usize>,
    open: Vec<BinaryHeap<Entry>>,
    seq: u64,
    evals: Vec<usize>,
    expansions: usize,
    trace: Vec<Evaluation>,
}

impl<'a> Search<'a> {
    pub(crate) fn new(
        task: &'a TaskSpec,
        models: &'a ModelSet,
        pre: &'a dyn ModelPreconditions,
        cfg: &'a PlannerConfig,
        selection: Selection,
        queues: usize,
    ) -> Result<Self> {
        if models.is_empty() {
            return Err(crate::error::invalid_input("at least one model is required"));
        }
        if queues > 64 {
            return Err(crate::error::invalid_input("at most 64 queues are supported"));
        }
        if let Selection::Fixed(i) = selection {
            if i >= models.len() {
                return Err(crate::error::invalid_input(alloc::format!("no model with index {i}")));
            }
        }
        cfg.validate(queues)?;
        let seed = match selection {
            Selection::Random(s) => s,
            _ => 0,
        };
        Ok(Search {
            task,
            models,
            pre,
            cfg,
            selection,
            rng: stream(mix(seed, 0x52a4)),
            queues,
            nodes: Vec::new(),
            index: BTreeMap::new(),
            open: vec![BinaryHeap::new(); queues],
            seq: 0,
            evals: vec![0; models.len()],
            expansions: 0,
            trace: Vec::new(),
        })
    }

    pub(crate) fn run(mut self, start: &WorldState, clock: &dyn Clock) -> Result<PlanResult> {
        start.validate()?;
        let key = state_key(start, &self.cfg.resolution);
        let state = start.clone();
        let h = self.task.heuristic(&state);
        self.nodes.push(Node { key, state, g: 0.0, h, parent: None, a_inc: None, closed: 0 });
        self.index.insert(key, 0);
        self.push_all(0);

        loop {
            let min_keys: Vec<Option<f64>> = (0..self.queues).map(|q| self.min_key(q)).collect();
            let Some(q) = choose_queue(&min_keys, &self.cfg.weights) else {
                return Ok(self.finish(None, PlanStatus::Exhausted, clock));
            };
            let id = self.open[q].pop().map(|e| e.node).unwrap_or_default();
            if self.task.is_goal(&self.nodes[id].state) {
                return Ok(self.finish(Some(id), PlanStatus::Found, clock));
            }
            let over_time = self.cfg.time_budget.is_some_and(|t| clock.elapsed_secs() > t);
            if self.expansions >= self.cfg.expansion_budget || over_time {
                return Ok(self.finish(None, PlanStatus::Timeout, clock));
            }
            self.expansions += 1;
            if q == 0 {
                self.full_expansion(id);
            } else {
                self.partial_expansion(id, q);
            }
        }
    }

    /// Smallest valid f in queue `q`, discarding stale entries.
    fn min_key(&mut self, q: usize) -> Option<f64> {
        while let Some(top) = self.open[q].peek() {
            let node = &self.nodes[top.node];
            if node.closed & (1 << q) != 0 || top.g != node.g {
                self.open[q].pop();
            } else {
                return Some(top.f);
            }
        }
        None
    }

    fn push_all(&mut self, id: usize) {
        let node = &self.nodes[id];
        let entry = Entry { f: node.g + self.cfg.epsilon * node.h, g: node.g, seq: self.seq, node: id };
        self.seq += 1;
        for q in 0..self.queues {
            if node.closed & (1 << q) == 0 {
                self.open[q].push(entry);
            }
        }
    }

    fn take_actions(&mut self, id: usize) -> Vec<SkillAction> {
        if let Some(pending) = self.nodes[id].a_inc.take() {
            return pending;
        }
        let node = &self.nodes[id];
        let seed = mix(self.cfg.param_seed, node.key.fingerprint());
        self.task
            .skills()
            .iter()
            .flat_map(|&skill| generate_params(&node.state, skill, self.task, seed))
            .collect()
    }

    fn select(&mut self, s: &WorldState, a: &SkillAction) -> Option<usize> {
        if !skill_precondition(s, a) {
            return None;
        }
        let k = self.models.len();
        match self.selection {
            Selection::Prioritized => (0..k).rev().find(|&i| self.pre.holds(self.models.get(i), s, a)),
            Selection::Fixed(i) => Some(i),
            Selection::Random(_) => Some(self.rng.random_range(0..k)),
        }
    }

    fn full_expansion(&mut self, id: usize) {
        let actions = self.take_actions(id);
        let state = self.nodes[id].state.clone();
        for a in actions {
            if let Some(m) = self.select(&state, &a) {
                self.evaluate(id, &state, a, m, 0);
            }
        }
        let node = &mut self.nodes[id];
        node.a_inc = Some(Vec::new());
        node.closed = u64::MAX;
    }

    fn partial_expansion(&mut self, id: usize, q: usize) {
        let actions = self.take_actions(id);
        let state = self.nodes[id].state.clone();
        let mut deferred = Vec::new();
        for a in actions {
            match self.select(&state, &a) {
                Some(m) if m >= q => self.evaluate(id, &state, a, m, q),
                Some(_) => deferred.push(a),
                None => {}
            }
        }
        let node = &mut self.nodes[id];
        node.a_inc = Some(deferred);
        node.closed |= 1 << q;
    }

    fn evaluate(&mut self, parent: usize, s: &WorldState, a: SkillAction, m: usize, queue: usize) {
        let model = self.models.get(m);
        self.evals[m] += 1;
        if self.cfg.record_trace {
            self.trace.push(Evaluation { key: self.nodes[parent].key, state: s.clone(), action: a, model: m, queue });
        }
        let Ok(next) = model.forward(s, &a) else {
            return;
        };
        let key = state_key(&next, &self.cfg.resolution);
        if key == self.nodes[parent].key {
            return;
        }
        let g = self.nodes[parent].g + edge_cost(s, &a);
        let id = match self.index.get(&key) {
            Some(&id) => {
                if g >= self.nodes[id].g {
                    return;
                }
                let node = &mut self.nodes[id];
                node.g = g;
                node.parent = Some((parent, a, m));
                id
            }
            None => {
                let h = self.task.heuristic(&next);
                let id = self.nodes.len();
                self.nodes.push(Node { key, state: next, g, h, parent: Some((parent, a, m)), a_inc: None, closed: 0 });
                self.index.insert(key, id);
                id
            }
        };
        self.push_all(id);
    }

    fn finish(self, goal: Option<usize>, status: PlanStatus, clock: &dyn Clock) -> PlanResult {
        let mut actions = Vec::new();
        let mut models_used = Vec::new();
        let mut predicted_states = Vec::new();
        let mut cost = f64::INFINITY;
        if let Some(goal) = goal {
            cost = self.nodes[goal].g;
            let mut cur = goal;
            predicted_states.push(self.nodes[cur].state.clone());
            while let Some((parent, a, m)) = self.nodes[cur].parent {
                actions.push(a);
                models_used.push(m);
                predicted_states.push(self.nodes[parent].state.clone());
                cur = parent;
            }
            actions.reverse();
            models_used.reverse();
            predicted_states.reverse();
        }
        let weighted_eval_cost = self.evals.iter().enumerate().map(|(i, &n)| n as f64 * self.models.get(i).eval_cost).sum();
        PlanResult {
            status,
            actions,
            models_used,
            predicted_states,
            cost,
            evals: self.evals,
            weighted_eval_cost,
            expansions: self.expansions,
            wall_time: clock.elapsed_secs(),
            trace: self.trace,
        }
    }
}

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};

use super::features::{extract_features, STATE_FEATURES};
use super::loss::{asymmetric_loss, asymmetric_loss_grad};
use super::model::MdeModel;
use super::network::{Adam, Mlp, HIDDEN_UNITS};
use crate::error::{invalid_input, Error, Result};
use crate::math;
use crate::rng::{mix, stream};
use crate::state::{state_distance, Skill, Transition};
use crate::world::{GoalContext, ModelKind};

/// Minimum rows accepted by [`train_mde`].
pub const MIN_TRAIN_ROWS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub c1: f64,
    pub c2: f64,
    pub learning_rate: f64,
    pub l2_weight_decay: f64,
    pub state_noise_std: f64,
    pub param_noise_std: f64,
    pub test_fraction: f64,
    pub val_fraction: f64,
    pub hidden_units: usize,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// Jittered copies per original row, split evenly between the row and its rod swap.
    pub jitter_copies: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            c1: 3.0,
            c2: 1.0,
            learning_rate: 5e-3,
            l2_weight_decay: 5e-3,
            state_noise_std: 1.0,
            param_noise_std: 3.0,
            test_fraction: 0.15,
            val_fraction: 0.05,
            hidden_units: HIDDEN_UNITS,
            batch_size: 32,
            max_epochs: 2000,
            patience: 20,
            jitter_copies: 4,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.c1,
            self.c2,
            self.learning_rate,
            self.l2_weight_decay,
            self.state_noise_std,
            self.param_noise_std,
            self.test_fraction,
            self.val_fraction,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(invalid_input("training config contains a non-finite value"));
        }
        if !(self.c1 > self.c2 && self.c2 > 0.0) {
            return Err(invalid_input("loss coefficients must satisfy c1 > c2 > 0"));
        }
        if self.learning_rate <= 0.0 || self.l2_weight_decay < 0.0 {
            return Err(invalid_input("learning rate must be positive and weight decay non-negative"));
        }
        if self.state_noise_std < 0.0 || self.param_noise_std < 0.0 {
            return Err(invalid_input("noise standard deviations must be non-negative"));
        }
        let frac = |f: f64| (0.0..1.0).contains(&f);
        if !frac(self.test_fraction) || !frac(self.val_fraction) {
            return Err(invalid_input("split fractions must lie in [0, 1)"));
        }
        if self.hidden_units == 0 || self.batch_size == 0 || self.max_epochs == 0 {
            return Err(invalid_input("hidden units, batch size and max epochs must be positive"));
        }
        Ok(())
    }
}

/// One supervised example: features for `skill` and the observed deviation in cm.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRow {
    pub skill: Skill,
    pub features: Vec<f64>,
    pub label: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs: usize,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub train_rows: usize,
    pub val_rows: usize,
}

/// Labels each transition with the distance between the observed next state and
/// `model`'s prediction.
pub fn label_transitions(
    transitions: &[Transition],
    goal: &GoalContext,
    model: ModelKind,
) -> Result<Vec<LabeledRow>> {
    transitions
        .iter()
        .map(|t| {
            let predicted = model.forward(&t.s, &t.a).map_err(|e| {
                Error::Internal(alloc::format!(
                    "{} rejected a logged transition (episode {}, step {}): {e}",
                    model.name(),
                    t.episode_id,
                    t.step
                ))
            })?;
            Ok(LabeledRow {
                skill: t.a.skill,
                features: extract_features(&t.s, &t.a, goal).values,
                label: state_distance(&t.s_next, &predicted)?,
            })
        })
        .collect()
}

fn theta_is_length(skill: Skill, i: usize) -> bool {
    !(skill == Skill::Pick && i == 2)
}

/// Rod-swapped copies plus Gaussian-jittered copies; labels are carried unchanged.
pub fn augment(rows: &[LabeledRow], cfg: &TrainConfig, seed: u64) -> Vec<LabeledRow> {
    let mut rng = stream(mix(seed, 0xa06));
    let state_noise = Normal::new(0.0, cfg.state_noise_std).ok();
    let param_noise = Normal::new(0.0, cfg.param_noise_std).ok();
    let per_variant = cfg.jitter_copies / 2;
    let mut out = Vec::with_capacity(rows.len() * (2 + 2 * per_variant));
    for row in rows {
        let mut swapped = row.clone();
        swapped.features.swap(0, 1);
        for base in [row, &swapped] {
            out.push(base.clone());
            for _ in 0..per_variant {
                let mut j = base.clone();
                for (i, v) in j.features.iter_mut().enumerate() {
                    let noise = if i < STATE_FEATURES - 1 {
                        state_noise.as_ref()
                    } else if i >= STATE_FEATURES && theta_is_length(row.skill, i - STATE_FEATURES) {
                        param_noise.as_ref()
                    } else {
                        None
                    };
                    if let Some(n) = noise {
                        *v += n.sample(&mut rng);
                    }
                }
                out.push(j);
            }
        }
    }
    out
}

/// Seeded split into `(train, validation)`; validation gets `round(n·fraction)` rows.
pub fn split_validation(rows: &[LabeledRow], fraction: f64, seed: u64) -> (Vec<LabeledRow>, Vec<LabeledRow>) {
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.shuffle(&mut stream(mix(seed, 0x5a1)));
    let n_val = math::round(rows.len() as f64 * fraction) as usize;
    let val = idx[..n_val].iter().map(|&i| rows[i].clone()).collect();
    let train = idx[n_val..].iter().map(|&i| rows[i].clone()).collect();
    (train, val)
}

/// Splits off `cfg.val_fraction` for early stopping and trains on the rest.
pub fn train_mde(
    skill: Skill,
    model: ModelKind,
    rows: &[LabeledRow],
    cfg: &TrainConfig,
) -> Result<(MdeModel, TrainReport)> {
    if rows.len() < MIN_TRAIN_ROWS {
        return Err(invalid_input(alloc::format!(
            "training needs at least {MIN_TRAIN_ROWS} rows, got {}",
            rows.len()
        )));
    }
    let (train, val) = split_validation(rows, cfg.val_fraction, cfg.seed);
    train_mde_split(skill, model, &train, &val, cfg)
}

/// Trains on `train`, keeping the weights with the lowest loss on `val`
/// (on `train` itself when `val` is empty).
pub fn train_mde_split(
    skill: Skill,
    model: ModelKind,
    train: &[LabeledRow],
    val: &[LabeledRow],
    cfg: &TrainConfig,
) -> Result<(MdeModel, TrainReport)> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(invalid_input("empty training split"));
    }
    let width = STATE_FEATURES + skill.arity();
    for r in train.iter().chain(val) {
        if r.skill != skill || r.features.len() != width {
            return Err(invalid_input(alloc::format!("row does not match the {skill} feature layout")));
        }
        if !r.label.is_finite() || r.features.iter().any(|v| !v.is_finite()) {
            return Err(invalid_input("row contains a non-finite value"));
        }
    }

    let (mean, std) = fit_normalization(train, width);
    let normalize = |rows: &[LabeledRow]| -> Vec<(Vec<f64>, f64)> {
        rows.iter()
            .map(|r| {
                let x = r.features.iter().zip(&mean).zip(&std).map(|((v, m), s)| (v - m) / s).collect();
                (x, r.label)
            })
            .collect()
    };
    let train_xy = normalize(train);
    let val_xy = if val.is_empty() { train_xy.clone() } else { normalize(val) };

    let mut rng = stream(mix(cfg.seed, 0x7a1 + skill.index() as u64 * 16 + model.index() as u64));
    let mut net = Mlp::new(width, cfg.hidden_units, &mut rng);
    let label_mean = train.iter().map(|r| r.label).sum::<f64>() / train.len() as f64;
    net.set_output_bias(label_mean);

    let mut opt = Adam::new(net.params().len(), cfg.learning_rate, cfg.l2_weight_decay);
    let mut grad = vec![0.0; net.params().len()];
    let mut order: Vec<usize> = (0..train_xy.len()).collect();
    let mut best = (mean_loss(&net, &val_xy, cfg), net.params().to_vec(), 0usize);
    let mut since_best = 0;
    let mut epochs = 0;
    for epoch in 1..=cfg.max_epochs {
        epochs = epoch;
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let (x, y) = &train_xy[i];
                let (out, trace) = net.forward_traced(x);
                let dy = asymmetric_loss_grad(*y, out, cfg.c1, cfg.c2) * scale;
                net.backward(x, &trace, dy, &mut grad);
            }
            opt.step(net.params_mut(), &grad);
        }
        let loss = mean_loss(&net, &val_xy, cfg);
        if loss < best.0 {
            best = (loss, net.params().to_vec(), epoch);
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                break;
            }
        }
    }
    log::debug!("{skill}/{model}: {epochs} epochs, best val loss {:.4} at {}", best.0, best.2);
    let net = Mlp::from_params(width, cfg.hidden_units, best.1)
        .ok_or_else(|| Error::Internal("parameter buffer size changed during training".into()))?;
    let report = TrainReport {
        epochs,
        best_epoch: best.2,
        best_val_loss: best.0,
        train_rows: train.len(),
        val_rows: val.len(),
    };
    Ok((MdeModel::new(skill, model, net, mean, std)?, report))
}

fn fit_normalization(rows: &[LabeledRow], width: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = vec![0.0; width];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(&r.features) {
            *m += v / n;
        }
    }
    let mut var = vec![0.0; width];
    for r in rows {
        for ((s, v), m) in var.iter_mut().zip(&r.features).zip(&mean) {
            *s += (v - m) * (v - m) / n;
        }
    }
    let std = var.into_iter().map(|v| if v > 1e-12 { math::sqrt(v) } else { 1.0 }).collect();
    (mean, std)
}

fn mean_loss(net: &Mlp, rows: &[(Vec<f64>, f64)], cfg: &TrainConfig) -> f64 {
    let total: f64 = rows.iter().map(|(x, y)| asymmetric_loss(*y, net.forward(x), cfg.c1, cfg.c2)).sum();
    total / rows.len().max(1) as f64
}

/// Mean absolute error of clamped predictions.
pub fn mean_absolute_error(model: &MdeModel, rows: &[LabeledRow]) -> Result<f64> {
    if rows.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for r in rows {
        total += math::abs(model.predict_features(&r.features)? - r.label);
    }
    Ok(total / rows.len() as f64)
}

//! Model deviation estimators.
//!
//! One small regressor per `(skill, model)` pair predicts how far the model's
//! next-state prediction will land from reality, in centimetres. A transition
//! is inside a model's precondition when that prediction is below the task's
//! `d_max` for the skill.

mod features;
mod loss;
mod model;
mod network;
mod train;

pub use features::{extract_features, FeatureVector, STATE_FEATURES};
pub use loss::{asymmetric_loss, asymmetric_loss_grad};
pub use model::{in_model_precondition, ExactDeviation, MdeModel, MdePreconditions, MdeSet};
pub use network::{Mlp, HIDDEN_UNITS};
pub use train::{
    augment, label_transitions, mean_absolute_error, split_validation, train_mde,
    train_mde_split, LabeledRow, TrainConfig, TrainReport, MIN_TRAIN_ROWS,
};

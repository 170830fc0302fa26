//! Multi-fidelity task planning with learned model preconditions.
//!
//! A planner is given an ordered list of transition models, slowest and most
//! faithful first. For every `(skill, model)` pair a small regressor (a model
//! deviation estimator) predicts how far the model's predicted next state will
//! be from reality. Thresholding that prediction yields a *model precondition*,
//! and the multi-queue weighted A* in [`planner`] uses it to evaluate each edge
//! with the cheapest model that is trusted there.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the companion `mfplan` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod datagen;
pub mod error;
pub mod geometry;
pub mod math;
pub mod mde;
pub mod planner;
pub mod rng;
pub mod state;
pub mod world;

pub use error::{Error, Result};
pub use geometry::{normalize_yaw, Pose2, Rect, Vec2};
pub use state::{state_distance, Held, Scene, Skill, SkillAction, SkillMap, Transition, WorldState};

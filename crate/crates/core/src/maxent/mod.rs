//! Conditional maximum-entropy models, one per procedure.
//!
//! A feature pairs a contextual predicate with an action. The probability of
//! action `a` in context `b` is proportional to the product of `α_j` over the
//! features that fire on `(a, b)`, normalized over the model's action
//! vocabulary. Parameters are estimated with Generalized Iterative Scaling.

mod gis;
mod model;
mod sample;

pub use self::gis::{gis_train, GisConfig, GisReport};
pub use self::model::{MaxentModel, ModelSet};
pub use self::sample::{build_features, Feature, FeatureTable, TrainingSample, DEFAULT_CUTOFF};

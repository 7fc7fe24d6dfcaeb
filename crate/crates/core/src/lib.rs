//! Semi-supervised tabular classification: a sigmoid multilayer perceptron
//! trained by online backpropagation, wrapped in a confidence-thresholded
//! self-training loop, plus the preprocessing, baselines and confusion-matrix
//! evaluation needed to compare it against supervised training.
//!
//! The usual flow:
//!
//! 1. [`dataset::load_csv`] or [`dataset::generate_synthetic`]
//! 2. [`dataset::split_random`] then [`dataset::split_labeled_unlabeled`]
//! 3. [`preprocess::Preprocessor::fit`] on the training rows
//! 4. [`ssl::self_train`] with a [`mlp::MlpLearner`] (or any [`learner::Learner`])
//! 5. [`eval::evaluate`] on the held-out rows

pub mod baselines;
pub mod dataset;
mod error;
pub mod eval;
pub mod learner;
pub mod mlp;
pub mod preprocess;
pub(crate) mod rng;
pub mod ssl;

pub use error::{Error, Result};

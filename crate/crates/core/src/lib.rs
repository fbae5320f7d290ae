//! Randomly projected LDA ensembles.
//!
//! An ensemble averages `M` LDA discriminants, each trained on data projected
//! to `d` dimensions by an independent Gaussian matrix. This crate provides
//! the classifier, its exact misclassification probability, deterministic
//! equivalents of the infinite-ensemble error in every combination of known
//! and estimated statistics, and a consistent estimator of that error from
//! sample statistics alone. The estimator makes tuning `d` a spectral
//! computation instead of a cross-validation loop.
//!
//! ```
//! use rplda::data::{generate_synthetic, synthetic_preset, Preset};
//! use rplda::gestimate::GEstimator;
//!
//! let truth = synthetic_preset(60, Preset::SpikeCov).unwrap();
//! let train = generate_synthetic(&truth, 60, 60, 1).unwrap();
//! let estimator = GEstimator::from_data(&train, None).unwrap();
//! let curve: Vec<f64> = (1..=20).map(|d| estimator.estimate(d).unwrap().error).collect();
//! assert!(curve.iter().all(|e| (0.0..=1.0).contains(e)));
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails the check too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod asymptotics;
pub mod classifiers;
pub mod cli;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod gestimate;
pub mod numerics;
pub mod seed;
pub mod spectrum;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

/// Where an error probability came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed form for a fixed trained classifier and known distribution.
    Exact,
    /// Deterministic equivalent of the infinite-ensemble error.
    De,
    /// Consistent estimate from sample statistics.
    GEstimate,
    /// Fraction misclassified on a test set.
    Empirical,
    /// Averaged k-fold cross-validation.
    CrossValidation,
}

/// A misclassification probability and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub value: f64,
    pub provenance: Provenance,
}

impl ErrorEstimate {
    pub fn new(value: f64, provenance: Provenance) -> Self {
        Self { value, provenance }
    }
}

//! Datasets and class statistics.
//!
//! Samples are stored column-wise: a [`LabeledDataset`] with `p` features and
//! `n` points holds a `p x n` matrix.

mod csv_io;
mod folds;
mod stats;
mod synth;

pub use csv_io::{load_csv, write_csv, DEFAULT_LABEL_COLUMN};
pub use folds::{kfold_plan, FoldPlan};
pub use stats::{centered_samples, covariance_rank, estimate_stats, pooled_spectrum};
pub use synth::{generate_synthetic, synthetic_preset, GaussianSampler, Preset};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary-labelled samples, one column per point.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    samples: DMatrix<f64>,
    labels: Vec<u8>,
    n0: usize,
    n1: usize,
}

impl LabeledDataset {
    pub fn new(samples: DMatrix<f64>, labels: Vec<u8>) -> Result<Self> {
        if samples.ncols() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} sample columns but {} labels",
                samples.ncols(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidDataset(format!("label {bad} is not 0 or 1")));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite feature value".into()));
        }
        let n1 = labels.iter().filter(|&&l| l == 1).count();
        let n0 = labels.len() - n1;
        Ok(Self {
            samples,
            labels,
            n0,
            n1,
        })
    }

    pub fn p(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn class_count(&self, class: u8) -> usize {
        if class == 0 {
            self.n0
        } else {
            self.n1
        }
    }

    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Columns with the given label, in dataset order.
    pub fn class_samples(&self, class: u8) -> DMatrix<f64> {
        let idx: Vec<usize> = (0..self.n()).filter(|&j| self.labels[j] == class).collect();
        self.samples.select_columns(&idx)
    }

    /// Dataset restricted to the given column indices (in that order).
    pub fn subset(&self, indices: &[usize]) -> Self {
        let samples = self.samples.select_columns(indices);
        let labels: Vec<u8> = indices.iter().map(|&j| self.labels[j]).collect();
        let n1 = labels.iter().filter(|&&l| l == 1).count();
        Self {
            samples,
            n0: labels.len() - n1,
            n1,
            labels,
        }
    }

    /// Same points with classes 0 and 1 exchanged.
    pub fn swap_labels(&self) -> Self {
        Self {
            samples: self.samples.clone(),
            labels: self.labels.iter().map(|l| 1 - l).collect(),
            n0: self.n1,
            n1: self.n0,
        }
    }
}

/// Class counts behind an estimated covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSizes {
    pub n0: usize,
    pub n1: usize,
}

impl SampleSizes {
    pub fn n(&self) -> usize {
        self.n0 + self.n1
    }
}

/// Two class means, a common covariance and the class priors.
///
/// Used both for population statistics and for their sample estimates; in
/// the latter case `estimated_from` records the class counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StatsRepr", into = "StatsRepr")]
pub struct ClassStats {
    pub mu0: DVector<f64>,
    pub mu1: DVector<f64>,
    pub sigma: DMatrix<f64>,
    pub pi0: f64,
    pub pi1: f64,
    /// `Some` when `sigma` is a pooled sample covariance.
    pub estimated_from: Option<SampleSizes>,
}

impl ClassStats {
    pub fn new(
        mu0: DVector<f64>,
        mu1: DVector<f64>,
        sigma: DMatrix<f64>,
        pi0: f64,
        pi1: f64,
    ) -> Result<Self> {
        let stats = Self {
            mu0,
            mu1,
            sigma,
            pi0,
            pi1,
            estimated_from: None,
        };
        stats.validate()?;
        Ok(stats)
    }

    /// Checks shapes, priors and symmetry. Positive semidefiniteness is
    /// checked by the operations that rely on it.
    pub fn validate(&self) -> Result<()> {
        let p = self.mu0.len();
        if p == 0 {
            return Err(Error::InvalidStats("empty mean vector".into()));
        }
        if self.mu1.len() != p || self.sigma.nrows() != p || self.sigma.ncols() != p {
            return Err(Error::InvalidStats(format!(
                "inconsistent shapes: mu0 {}, mu1 {}, sigma {}x{}",
                p,
                self.mu1.len(),
                self.sigma.nrows(),
                self.sigma.ncols()
            )));
        }
        check_priors(self.pi0, self.pi1)?;
        let scale = self.sigma.amax().max(f64::MIN_POSITIVE);
        let asym = (&self.sigma - self.sigma.transpose()).amax();
        if asym > 1e-10 * scale {
            return Err(Error::InvalidStats(format!(
                "covariance not symmetric (max asymmetry {asym:e})"
            )));
        }
        if self
            .mu0
            .iter()
            .chain(self.mu1.iter())
            .chain(self.sigma.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidStats("non-finite entry".into()));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.mu0.len()
    }

    pub fn mean_difference(&self) -> DVector<f64> {
        &self.mu1 - &self.mu0
    }

    pub fn midpoint(&self) -> DVector<f64> {
        (&self.mu0 + &self.mu1) * 0.5
    }

    pub fn log_prior_ratio(&self) -> f64 {
        (self.pi1 / self.pi0).ln()
    }

    pub fn with_priors(mut self, pi0: f64, pi1: f64) -> Result<Self> {
        check_priors(pi0, pi1)?;
        self.pi0 = pi0;
        self.pi1 = pi1;
        Ok(self)
    }

    /// Means (and prior bookkeeping) from `self`, covariance from `other`.
    pub fn with_covariance_of(&self, other: &ClassStats) -> Self {
        Self {
            sigma: other.sigma.clone(),
            estimated_from: other.estimated_from,
            ..self.clone()
        }
    }

    /// Classes exchanged: `(mu0, pi0) <-> (mu1, pi1)`.
    pub fn swapped(&self) -> Self {
        Self {
            mu0: self.mu1.clone(),
            mu1: self.mu0.clone(),
            sigma: self.sigma.clone(),
            pi0: self.pi1,
            pi1: self.pi0,
            estimated_from: self
                .estimated_from
                .map(|s| SampleSizes { n0: s.n1, n1: s.n0 }),
        }
    }
}

pub(crate) fn check_priors(pi0: f64, pi1: f64) -> Result<()> {
    if !(pi0 > 0.0 && pi0 < 1.0 && pi1 > 0.0 && pi1 < 1.0) || ((pi0 + pi1) - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidStats(format!(
            "priors ({pi0}, {pi1}) must lie in (0, 1) and sum to 1"
        )));
    }
    Ok(())
}

/// Row-major, human-readable layout used for the JSON sidecar files.
#[derive(Serialize, Deserialize)]
struct StatsRepr {
    mu0: Vec<f64>,
    mu1: Vec<f64>,
    sigma: Vec<Vec<f64>>,
    pi0: f64,
    pi1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    estimated_from: Option<SampleSizes>,
}

impl From<ClassStats> for StatsRepr {
    fn from(s: ClassStats) -> Self {
        let sigma = s
            .sigma
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        Self {
            mu0: s.mu0.as_slice().to_vec(),
            mu1: s.mu1.as_slice().to_vec(),
            sigma,
            pi0: s.pi0,
            pi1: s.pi1,
            estimated_from: s.estimated_from,
        }
    }
}

impl TryFrom<StatsRepr> for ClassStats {
    type Error = Error;

    fn try_from(r: StatsRepr) -> Result<Self> {
        let p = r.mu0.len();
        if r.sigma.len() != p || r.sigma.iter().any(|row| row.len() != p) {
            return Err(Error::InvalidStats("sigma must be p x p".into()));
        }
        let sigma = DMatrix::from_fn(p, p, |i, j| r.sigma[i][j]);
        let mut stats = ClassStats::new(
            DVector::from_vec(r.mu0),
            DVector::from_vec(r.mu1),
            sigma,
            r.pi0,
            r.pi1,
        )?;
        stats.estimated_from = r.estimated_from;
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_counts() {
        let x = DMatrix::from_row_slice(1, 4, &[0.0, 1.0, 2.0, 3.0]);
        let d = LabeledDataset::new(x, vec![0, 1, 1, 0]).unwrap();
        assert_eq!((d.n0(), d.n1(), d.p(), d.n()), (2, 2, 1, 4));
        assert_eq!(d.class_samples(1).as_slice(), &[1.0, 2.0]);
        let s = d.swap_labels();
        assert_eq!(s.labels(), &[1, 0, 0, 1]);
    }

    #[test]
    fn dataset_rejects_bad_labels() {
        let x = DMatrix::zeros(2, 2);
        assert!(LabeledDataset::new(x.clone(), vec![0, 2]).is_err());
        assert!(LabeledDataset::new(x, vec![0]).is_err());
    }

    #[test]
    fn stats_validation() {
        let mu = DVector::zeros(2);
        let sigma = DMatrix::identity(2, 2);
        assert!(ClassStats::new(mu.clone(), mu.clone(), sigma.clone(), 0.5, 0.5).is_ok());
        assert!(ClassStats::new(mu.clone(), mu.clone(), sigma.clone(), 0.6, 0.6).is_err());
        assert!(ClassStats::new(mu.clone(), mu.clone(), sigma.clone(), 1.0, 0.0).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(ClassStats::new(mu.clone(), mu, asym, 0.5, 0.5).is_err());
    }

    #[test]
    fn stats_json_roundtrip() {
        let s = ClassStats::new(
            DVector::from_vec(vec![1.0, 2.0]),
            DVector::from_vec(vec![0.0, -1.0]),
            DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]),
            0.7,
            0.3,
        )
        .unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let back: ClassStats = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
    }
}

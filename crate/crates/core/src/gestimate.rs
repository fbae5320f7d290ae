//! Consistent estimate of the infinite-ensemble error from sample statistics.
//!
//! Only the pooled covariance spectrum, the sample mean difference, the class
//! counts and the priors are needed. One eigendecomposition serves the whole
//! `d` grid; each `d` costs a scalar root solve plus `O(rank)` sums.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{estimate_stats, pooled_spectrum, ClassStats, LabeledDataset, SampleSizes};
use crate::error::{Error, Result};
use crate::numerics::{bisect, std_normal_cdf, RootResult, SolverConfig};
use crate::spectrum::{Projected, Spectrum};
use crate::{ErrorEstimate, Provenance};

/// Estimated discriminant statistics and the composed error at one `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GEstimate {
    pub d: usize,
    pub m0_hat: f64,
    pub m1_hat: f64,
    pub sigma2_hat: f64,
    pub zeta_hat_hat: f64,
    /// `f(zeta_hat_hat)`.
    pub residual: f64,
    pub error: f64,
}

impl GEstimate {
    pub fn as_estimate(&self) -> ErrorEstimate {
        ErrorEstimate::new(self.error, Provenance::GEstimate)
    }
}

/// Sample spectrum and mean difference, prepared for repeated estimates.
#[derive(Debug, Clone)]
pub struct GEstimator {
    spectrum: Spectrum,
    delta: Projected,
    n0: usize,
    n1: usize,
    pi0: f64,
    pi1: f64,
    config: SolverConfig,
}

impl GEstimator {
    /// From sample statistics. `sizes` defaults to `stats.estimated_from`.
    pub fn from_stats(stats: &ClassStats, sizes: Option<SampleSizes>) -> Result<Self> {
        stats.validate()?;
        let sizes = sizes.or(stats.estimated_from).ok_or_else(|| {
            Error::InvalidStats("class counts required for the error estimate".into())
        })?;
        let spectrum = Spectrum::of_symmetric(&stats.sigma, sizes.n());
        Self::assemble(spectrum, stats, sizes)
    }

    /// Pooled statistics of `data`; the spectrum comes from the Gram matrix
    /// when `n < p`.
    pub fn from_data(data: &LabeledDataset, priors: Option<(f64, f64)>) -> Result<Self> {
        let stats = estimate_stats(data, priors)?;
        let spectrum = pooled_spectrum(data)?;
        Self::assemble(
            spectrum,
            &stats,
            SampleSizes {
                n0: data.n0(),
                n1: data.n1(),
            },
        )
    }

    fn assemble(spectrum: Spectrum, stats: &ClassStats, sizes: SampleSizes) -> Result<Self> {
        if sizes.n0 == 0 || sizes.n1 == 0 {
            return Err(Error::InvalidStats("class counts must be positive".into()));
        }
        let delta = spectrum.project(&stats.mean_difference());
        Ok(Self {
            spectrum,
            delta,
            n0: sizes.n0,
            n1: sizes.n1,
            pi0: stats.pi0,
            pi1: stats.pi1,
            config: SolverConfig::default(),
        })
    }

    pub fn with_config(mut self, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        self.config = config;
        Ok(self)
    }

    pub fn rank(&self) -> usize {
        self.spectrum.rank()
    }

    /// Largest valid `d`: `rank - 2`.
    pub fn max_d(&self) -> usize {
        self.rank().saturating_sub(2)
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `f(x) = 1 - (1/d) tr{Sigma^ (Sigma^ + x^{-1} I)^{-1}}`.
    pub fn f(&self, d: usize, x: f64) -> f64 {
        let s: f64 = self
            .spectrum
            .values()
            .iter()
            .map(|&l| l * x / (l * x + 1.0))
            .sum();
        1.0 - s / d as f64
    }

    pub fn zeta_hat_hat(&self, d: usize) -> Result<RootResult> {
        if d == 0 || d > self.max_d() {
            return Err(Error::DTooLargeForRank {
                d,
                rank: self.rank(),
            });
        }
        bisect(|x| self.f(d, x), &self.config)
    }

    pub fn estimate(&self, d: usize) -> Result<GEstimate> {
        let root = self.zeta_hat_hat(d)?;
        let inv_zeta = 1.0 / root.root;
        let n = (self.n0 + self.n1) as f64;
        let s = &self.spectrum;

        let t1: f64 = s.values().iter().map(|&l| l / (l + inv_zeta)).sum();
        let q = s.quadratic(&self.delta, |l| 1.0 / (l + inv_zeta));
        let v = s.quadratic(&self.delta, |l| l / (l + inv_zeta).powi(2));
        let t = t1 / n;
        let ln = (self.pi1 / self.pi0).ln();

        let m0_hat = -0.5 * q + (t1 / self.n0 as f64) / (1.0 - t) + ln;
        let m1_hat = 0.5 * q - (t1 / self.n1 as f64) / (1.0 - t) + ln;
        let sigma2_hat = (1.0 + t / (1.0 - t)).powi(2) * v;
        if !(sigma2_hat > 0.0) {
            return Err(Error::DegenerateVariance(sigma2_hat));
        }
        let sigma = sigma2_hat.sqrt();
        let error =
            self.pi0 * std_normal_cdf(m0_hat / sigma) + self.pi1 * std_normal_cdf(-m1_hat / sigma);
        Ok(GEstimate {
            d,
            m0_hat,
            m1_hat,
            sigma2_hat,
            zeta_hat_hat: root.root,
            residual: root.residual,
            error,
        })
    }

    /// Estimates over a grid, in parallel, in grid order.
    pub fn curve(&self, ds: &[usize]) -> Result<Vec<GEstimate>> {
        ds.par_iter().map(|&d| self.estimate(d)).collect()
    }
}

/// Root of `f` for a sample covariance.
pub fn zeta_hat_hat(sigma_hat: &DMatrix<f64>, d: usize) -> Result<f64> {
    let p = sigma_hat.nrows();
    let spectrum = Spectrum::of_symmetric(sigma_hat, p);
    let rank = spectrum.rank();
    if d == 0 || d + 2 > rank {
        return Err(Error::DTooLargeForRank { d, rank });
    }
    let s = spectrum.values().to_vec();
    let f = |x: f64| 1.0 - s.iter().map(|&l| l * x / (l * x + 1.0)).sum::<f64>() / d as f64;
    Ok(bisect(f, &SolverConfig::default())?.root)
}

pub fn g_estimate(sample_stats: &ClassStats, n0: usize, n1: usize, d: usize) -> Result<GEstimate> {
    GEstimator::from_stats(sample_stats, Some(SampleSizes { n0, n1 }))?.estimate(d)
}

pub fn g_estimate_from_data(
    data: &LabeledDataset,
    d: usize,
    priors: Option<(f64, f64)>,
) -> Result<GEstimate> {
    GEstimator::from_data(data, priors)?.estimate(d)
}

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{ClassStats, LabeledDataset};
use crate::error::{Error, Result};
use crate::seed;
use crate::spectrum::Spectrum;

/// Built-in Gaussian class statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `Sigma = (10/p) 1 1^T + 0.1 I`
    SpikeCov,
    /// `Sigma = I`
    IdentityCov,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spike-cov" | "spike" => Ok(Preset::SpikeCov),
            "identity-cov" | "identity" => Ok(Preset::IdentityCov),
            other => Err(Error::InvalidConfig(format!(
                "unknown preset {other:?} (expected spike-cov or identity-cov)"
            ))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::SpikeCov => "spike-cov",
            Preset::IdentityCov => "identity-cov",
        })
    }
}

fn ceil_sqrt(p: usize) -> usize {
    let mut r = (p as f64).sqrt() as usize;
    while r * r < p {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= p {
        r -= 1;
    }
    r
}

/// Preset statistics with equal priors.
///
/// `mu0 = p^(-1/4) [1 (ceil(sqrt p) times), 0, ..., 0, 2, 2]`, `mu1 = 0`.
pub fn synthetic_preset(p: usize, variant: Preset) -> Result<ClassStats> {
    if p < 9 {
        return Err(Error::DimensionTooSmall { p, min: 9 });
    }
    let ones = ceil_sqrt(p);
    let scale = (p as f64).powf(-0.25);
    let mut mu0 = DVector::zeros(p);
    for i in 0..ones {
        mu0[i] = scale;
    }
    mu0[p - 2] = 2.0 * scale;
    mu0[p - 1] = 2.0 * scale;
    let sigma = match variant {
        Preset::SpikeCov => {
            DMatrix::from_element(p, p, 10.0 / p as f64) + DMatrix::identity(p, p) * 0.1
        }
        Preset::IdentityCov => DMatrix::identity(p, p),
    };
    ClassStats::new(mu0, DVector::zeros(p), sigma, 0.5, 0.5)
}

/// Draws `mu_i + F z` with `F F^T = Sigma`; reusable across many draws.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    mu0: DVector<f64>,
    mu1: DVector<f64>,
    factor: DMatrix<f64>,
}

impl GaussianSampler {
    pub fn new(stats: &ClassStats) -> Result<Self> {
        stats.validate()?;
        let spectrum = Spectrum::of_symmetric(&stats.sigma, stats.p());
        let lmax = spectrum.max_eigenvalue();
        let lmin = spectrum.min_eigenvalue();
        if lmin < -1e-8 * lmax.abs() || (lmax < 0.0) {
            return Err(Error::NotPsd {
                min_eigenvalue: lmin,
                max_eigenvalue: lmax,
            });
        }
        Ok(Self {
            mu0: stats.mu0.clone(),
            mu1: stats.mu1.clone(),
            factor: spectrum.factor(),
        })
    }

    pub fn p(&self) -> usize {
        self.mu0.len()
    }

    /// `n0 + n1` points with class order shuffled; identical output for
    /// identical seeds.
    pub fn sample(&self, n0: usize, n1: usize, seed: u64) -> LabeledDataset {
        let mut rng = seed::rng(seed);
        let n = n0 + n1;
        let mut labels: Vec<u8> = std::iter::repeat_n(0u8, n0)
            .chain(std::iter::repeat_n(1u8, n1))
            .collect();
        labels.shuffle(&mut rng);

        let r = self.factor.ncols();
        let mut z = DMatrix::<f64>::zeros(r, n);
        for j in 0..n {
            for k in 0..r {
                z[(k, j)] = StandardNormal.sample(&mut rng);
            }
        }
        let mut x = &self.factor * z;
        for (j, &label) in labels.iter().enumerate() {
            let mu = if label == 0 { &self.mu0 } else { &self.mu1 };
            let mut col = x.column_mut(j);
            col += mu;
        }
        LabeledDataset::new(x, labels).expect("generated dataset is well formed")
    }
}

/// i.i.d. Gaussian draws per class, deterministic in `seed`.
pub fn generate_synthetic(
    stats: &ClassStats,
    n0: usize,
    n1: usize,
    seed: u64,
) -> Result<LabeledDataset> {
    if n0 < 2 {
        return Err(Error::ClassTooSmall {
            class: 0,
            count: n0,
        });
    }
    if n1 < 2 {
        return Err(Error::ClassTooSmall {
            class: 1,
            count: n1,
        });
    }
    Ok(GaussianSampler::new(stats)?.sample(n0, n1, seed))
}

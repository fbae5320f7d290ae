use nalgebra::{DMatrix, DVector};

use super::{check_priors, ClassStats, LabeledDataset, SampleSizes};
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

fn class_means(data: &LabeledDataset) -> (DVector<f64>, DVector<f64>) {
    let p = data.p();
    let mut sums = [DVector::zeros(p), DVector::zeros(p)];
    for (j, &label) in data.labels().iter().enumerate() {
        sums[label as usize] += data.samples().column(j);
    }
    let [s0, s1] = sums;
    (s0 / data.n0() as f64, s1 / data.n1() as f64)
}

fn require_two_per_class(data: &LabeledDataset) -> Result<()> {
    for class in 0..2u8 {
        let count = data.class_count(class);
        if count < 2 {
            return Err(Error::ClassTooSmall { class, count });
        }
    }
    Ok(())
}

/// Samples with their class mean subtracted, `p x n`. The pooled covariance
/// is `Z Z^T / (n - 2)`.
pub fn centered_samples(data: &LabeledDataset) -> Result<DMatrix<f64>> {
    require_two_per_class(data)?;
    let (m0, m1) = class_means(data);
    let mut z = data.samples().clone();
    for (j, &label) in data.labels().iter().enumerate() {
        let mut col = z.column_mut(j);
        col -= if label == 0 { &m0 } else { &m1 };
    }
    Ok(z)
}

/// Class sample means, pooled sample covariance (divisor `n - 2`) and priors.
///
/// Priors default to the class proportions; pass `Some((pi0, pi1))` when the
/// classes were sampled separately and the priors are known.
pub fn estimate_stats(data: &LabeledDataset, priors: Option<(f64, f64)>) -> Result<ClassStats> {
    require_two_per_class(data)?;
    let (mu0, mu1) = class_means(data);
    let z = centered_samples(data)?;
    let n = data.n();
    let sigma = (&z * z.transpose()) / (n - 2) as f64;
    let (pi0, pi1) = match priors {
        Some((a, b)) => {
            check_priors(a, b)?;
            (a, b)
        }
        None => (data.n0() as f64 / n as f64, data.n1() as f64 / n as f64),
    };
    Ok(ClassStats {
        mu0,
        mu1,
        sigma,
        pi0,
        pi1,
        estimated_from: Some(SampleSizes {
            n0: data.n0(),
            n1: data.n1(),
        }),
    })
}

/// Spectrum of the pooled covariance, computed through the `n x n` Gram
/// matrix when `n < p`.
pub fn pooled_spectrum(data: &LabeledDataset) -> Result<Spectrum> {
    let z = centered_samples(data)?;
    Ok(Spectrum::of_scaled_gram(&z, 1.0 / (data.n() - 2) as f64))
}

/// Number of eigenvalues above `p * eps * lambda_max`.
pub fn covariance_rank(sigma_hat: &DMatrix<f64>) -> usize {
    Spectrum::of_symmetric(sigma_hat, sigma_hat.nrows()).rank()
}

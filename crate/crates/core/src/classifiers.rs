//! LDA, pseudoinverse LDA, single-projection RP-LDA and the RP-LDA ensemble.
//!
//! Every rule here is linear in `x`, so each is reduced to a [`LinearRule`]
//! `w^T x + b` at training time. A trained ensemble keeps the per-member
//! weight vectors and their average; scoring a point costs one inner product.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{centered_samples, ClassStats, LabeledDataset};
use crate::error::{Error, Result};
use crate::seed;
use crate::spectrum::Spectrum;

/// Largest condition number accepted for a (projected) covariance.
pub const MAX_CONDITION: f64 = 1e12;

/// Number of times a member projection is redrawn when its projected
/// covariance is numerically singular.
pub const MAX_RESAMPLES: usize = 3;

/// Value of a discriminant at a point; positive means class 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct DiscriminantScore(pub f64);

impl DiscriminantScore {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn label(self) -> u8 {
        classify(self)
    }
}

/// `1` if the score is strictly positive, else `0`.
pub fn classify(score: DiscriminantScore) -> u8 {
    u8::from(score.0 > 0.0)
}

/// `x -> w^T x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRule {
    pub weights: DVector<f64>,
    pub bias: f64,
}

impl LinearRule {
    /// `w^T (x - midpoint) + log_prior`.
    pub fn centered(weights: DVector<f64>, midpoint: &DVector<f64>, log_prior: f64) -> Self {
        let bias = log_prior - weights.dot(midpoint);
        Self { weights, bias }
    }

    pub fn p(&self) -> usize {
        self.weights.len()
    }

    pub fn score(&self, x: &DVector<f64>) -> DiscriminantScore {
        DiscriminantScore(self.weights.dot(x) + self.bias)
    }

    /// Scores of every column of a `p x n` matrix.
    pub fn scores(&self, samples: &DMatrix<f64>) -> DVector<f64> {
        let mut s = samples.tr_mul(&self.weights);
        s.add_scalar_mut(self.bias);
        s
    }

    pub fn predict(&self, samples: &DMatrix<f64>) -> Vec<u8> {
        self.scores(samples)
            .iter()
            .map(|&v| classify(DiscriminantScore(v)))
            .collect()
    }

    /// Plain LDA with plug-in statistics. Requires a well-conditioned `sigma`.
    pub fn lda(stats: &ClassStats) -> Result<Self> {
        let spectrum = Spectrum::of_symmetric(&stats.sigma, stats.p());
        let lmin = spectrum.min_eigenvalue();
        let lmax = spectrum.max_eigenvalue();
        let condition = if lmin > 0.0 {
            lmax / lmin
        } else {
            f64::INFINITY
        };
        if !(condition <= MAX_CONDITION) || !spectrum.is_full_rank() {
            return Err(Error::SingularCovariance { condition });
        }
        Ok(Self::spectral_lda(stats, &spectrum))
    }

    /// LDA with the Moore-Penrose pseudoinverse of `sigma`.
    pub fn pinv_lda(stats: &ClassStats) -> Self {
        let spectrum = Spectrum::of_symmetric(&stats.sigma, stats.p());
        Self::spectral_lda(stats, &spectrum)
    }

    fn spectral_lda(stats: &ClassStats, spectrum: &Spectrum) -> Self {
        let u = spectrum.vectors();
        let mut coef = u.tr_mul(&stats.mean_difference());
        for (c, &l) in coef.iter_mut().zip(spectrum.values()) {
            *c /= l;
        }
        Self::centered(u * coef, &stats.midpoint(), stats.log_prior_ratio())
    }

    /// RP-LDA for one `d x p` projection.
    pub fn rp_lda(stats: &ClassStats, projection: &DMatrix<f64>) -> Result<Self> {
        check_projection(projection, stats.p())?;
        let rs = projection * &stats.sigma;
        let a = &rs * projection.transpose();
        let w = member_weights(projection, a, &stats.mean_difference()).map_err(|condition| {
            Error::SingularProjectedCovariance {
                attempts: 1,
                condition,
            }
        })?;
        Ok(Self::centered(
            w,
            &stats.midpoint(),
            stats.log_prior_ratio(),
        ))
    }
}

fn check_projection(r: &DMatrix<f64>, p: usize) -> Result<()> {
    if r.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: r.ncols(),
        });
    }
    if r.nrows() == 0 {
        return Err(Error::BadDimensions { d: 0, p });
    }
    Ok(())
}

/// `R^T A^{-1} R delta` for `A = R Sigma R^T`, or the estimated condition
/// number of `A` when it is too close to singular.
fn member_weights(
    r: &DMatrix<f64>,
    a: DMatrix<f64>,
    delta: &DVector<f64>,
) -> Result<DVector<f64>, f64> {
    let chol = Cholesky::<f64, Dyn>::new(a).ok_or(f64::INFINITY)?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = (diag.min(), diag.max());
    let condition = if lo > 0.0 {
        (hi / lo).powi(2)
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) {
        return Err(condition);
    }
    let y = chol.solve(&(r * delta));
    Ok(r.tr_mul(&y))
}

pub fn lda_discriminant(x: &DVector<f64>, stats: &ClassStats) -> Result<DiscriminantScore> {
    Ok(LinearRule::lda(stats)?.score(x))
}

pub fn pinv_lda_discriminant(x: &DVector<f64>, stats: &ClassStats) -> DiscriminantScore {
    LinearRule::pinv_lda(stats).score(x)
}

pub fn rp_lda_discriminant(
    x: &DVector<f64>,
    stats: &ClassStats,
    projection: &DMatrix<f64>,
) -> Result<DiscriminantScore> {
    Ok(LinearRule::rp_lda(stats, projection)?.score(x))
}

/// `M` Gaussian `d x p` matrices with `N(0, 1/d)` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionEnsemble {
    members: Vec<DMatrix<f64>>,
    d: usize,
    p: usize,
    seed: u64,
}

/// Member `index` of the ensemble drawn with `seed`; redraw `attempt > 0`
/// uses a further derived stream.
pub fn sample_member(d: usize, p: usize, seed: u64, index: usize, attempt: usize) -> DMatrix<f64> {
    let mut member_seed = seed::derive_seed(seed, index as u64);
    if attempt > 0 {
        member_seed = seed::derive_seed(member_seed, attempt as u64);
    }
    let mut rng = seed::rng(member_seed);
    let scale = 1.0 / (d as f64).sqrt();
    // column-major fill keeps the stream layout independent of nalgebra internals
    let data: Vec<f64> = (0..d * p)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * z
        })
        .collect();
    DMatrix::from_vec(d, p, data)
}

/// Draw `m` independent projections; member `i` depends only on `(seed, i)`.
pub fn sample_projections(d: usize, p: usize, m: usize, seed: u64) -> Result<ProjectionEnsemble> {
    if d == 0 || d > p {
        return Err(Error::BadDimensions { d, p });
    }
    if m == 0 {
        return Err(Error::InvalidConfig(
            "ensemble size M must be at least 1".into(),
        ));
    }
    let members = (0..m)
        .into_par_iter()
        .map(|i| sample_member(d, p, seed, i, 0))
        .collect();
    Ok(ProjectionEnsemble {
        members,
        d,
        p,
        seed,
    })
}

impl ProjectionEnsemble {
    /// Ensemble from explicit matrices, all `d x p`.
    pub fn from_members(members: Vec<DMatrix<f64>>, seed: u64) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidConfig("ensemble needs at least one member".into()))?;
        let (d, p) = first.shape();
        if d == 0 || d > p {
            return Err(Error::BadDimensions { d, p });
        }
        if let Some(bad) = members.iter().find(|m| m.shape() != (d, p)) {
            return Err(Error::DimensionMismatch {
                expected: d * p,
                found: bad.nrows() * bad.ncols(),
            });
        }
        Ok(Self {
            members,
            d,
            p,
            seed,
        })
    }

    pub fn members(&self) -> &[DMatrix<f64>] {
        &self.members
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Every member multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            members: self.members.iter().map(|m| m * c).collect(),
            ..self.clone()
        }
    }
}

/// Training state shared across ensembles of any `d` and `M`: a factor `F`
/// with `F F^T = Sigma~`, the plug-in mean difference, midpoint and log prior
/// ratio, and the largest admissible `d`.
#[derive(Debug, Clone)]
pub struct EnsembleTrainer {
    factor: DMatrix<f64>,
    delta: DVector<f64>,
    midpoint: DVector<f64>,
    log_prior: f64,
    max_d: usize,
}

impl EnsembleTrainer {
    /// From plug-in statistics. Estimated statistics (`estimated_from` set)
    /// allow `d <= rank(Sigma) - 2`; known statistics allow `d <= p`.
    pub fn new(stats: &ClassStats) -> Result<Self> {
        stats.validate()?;
        let samples = stats.estimated_from.map_or(stats.p(), |s| s.n());
        let spectrum = Spectrum::of_symmetric(&stats.sigma, samples);
        let max_d = match stats.estimated_from {
            Some(_) => spectrum.rank().saturating_sub(2),
            None => stats.p(),
        };
        Ok(Self {
            factor: spectrum.factor(),
            delta: stats.mean_difference(),
            midpoint: stats.midpoint(),
            log_prior: stats.log_prior_ratio(),
            max_d,
        })
    }

    /// Sample statistics of `data`, with the scaled centered samples as the
    /// covariance factor (no `p x p` matrix is formed).
    pub fn from_data(data: &LabeledDataset, priors: Option<(f64, f64)>) -> Result<Self> {
        let stats = crate::data::estimate_stats(data, priors)?;
        let z = centered_samples(data)? / ((data.n() - 2) as f64).sqrt();
        let spectrum = Spectrum::of_scaled_gram(&z, 1.0);
        let rank = spectrum.rank();
        // keep whichever factor has fewer columns
        let factor = if z.ncols() > rank {
            spectrum.factor()
        } else {
            z
        };
        Ok(Self {
            factor,
            delta: stats.mean_difference(),
            midpoint: stats.midpoint(),
            log_prior: stats.log_prior_ratio(),
            max_d: rank.saturating_sub(2),
        })
    }

    pub fn p(&self) -> usize {
        self.delta.len()
    }

    pub fn max_d(&self) -> usize {
        self.max_d
    }

    fn check_d(&self, d: usize) -> Result<()> {
        if d == 0 {
            return Err(Error::BadDimensions { d, p: self.p() });
        }
        if d > self.max_d {
            return Err(Error::DTooLarge { d, max: self.max_d });
        }
        Ok(())
    }

    fn weights_for(&self, r: &DMatrix<f64>) -> Result<DVector<f64>, f64> {
        let rf = r * &self.factor;
        let a = &rf * rf.transpose();
        member_weights(r, a, &self.delta)
    }

    /// Draw `m` projections from `seed` and train on them. A member whose
    /// projected covariance is singular is redrawn up to [`MAX_RESAMPLES`]
    /// times.
    pub fn train(&self, d: usize, m: usize, seed: u64) -> Result<TrainedEnsemble> {
        self.check_d(d)?;
        if m == 0 {
            return Err(Error::InvalidConfig(
                "ensemble size M must be at least 1".into(),
            ));
        }
        let p = self.p();
        let trained: Vec<(DMatrix<f64>, DVector<f64>)> = (0..m)
            .into_par_iter()
            .map(|i| {
                let mut condition = f64::INFINITY;
                for attempt in 0..=MAX_RESAMPLES {
                    let r = sample_member(d, p, seed, i, attempt);
                    match self.weights_for(&r) {
                        Ok(w) => return Ok((r, w)),
                        Err(c) => condition = c,
                    }
                }
                Err(Error::SingularProjectedCovariance {
                    attempts: MAX_RESAMPLES + 1,
                    condition,
                })
            })
            .collect::<Result<_>>()?;
        let (members, weights): (Vec<_>, Vec<_>) = trained.into_iter().unzip();
        let projections = ProjectionEnsemble {
            members,
            d,
            p,
            seed,
        };
        Ok(self.assemble(projections, weights))
    }

    /// Train on the given projections without resampling.
    pub fn train_with(&self, projections: ProjectionEnsemble) -> Result<TrainedEnsemble> {
        if projections.p() != self.p() {
            return Err(Error::DimensionMismatch {
                expected: self.p(),
                found: projections.p(),
            });
        }
        self.check_d(projections.d())?;
        let weights = projections
            .members()
            .par_iter()
            .map(|r| {
                self.weights_for(r)
                    .map_err(|condition| Error::SingularProjectedCovariance {
                        attempts: 1,
                        condition,
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.assemble(projections, weights))
    }

    fn assemble(
        &self,
        projections: ProjectionEnsemble,
        member_weights: Vec<DVector<f64>>,
    ) -> TrainedEnsemble {
        let mut mean = DVector::zeros(self.p());
        for w in &member_weights {
            mean += w;
        }
        mean /= member_weights.len() as f64;
        TrainedEnsemble {
            rule: LinearRule::centered(mean, &self.midpoint, self.log_prior),
            member_weights,
            projections,
            midpoint: self.midpoint.clone(),
            log_prior: self.log_prior,
        }
    }
}

/// `train_ensemble(stats, d, M, seed)`: one-shot training from statistics.
pub fn train_ensemble(
    stats: &ClassStats,
    d: usize,
    m: usize,
    seed: u64,
) -> Result<TrainedEnsemble> {
    EnsembleTrainer::new(stats)?.train(d, m, seed)
}

/// An RP-LDA ensemble: the average of its members' discriminants plus the
/// log prior ratio, added once.
#[derive(Debug, Clone)]
pub struct TrainedEnsemble {
    rule: LinearRule,
    member_weights: Vec<DVector<f64>>,
    projections: ProjectionEnsemble,
    midpoint: DVector<f64>,
    log_prior: f64,
}

impl TrainedEnsemble {
    /// The ensemble discriminant as a single linear rule.
    pub fn rule(&self) -> &LinearRule {
        &self.rule
    }

    pub fn projections(&self) -> &ProjectionEnsemble {
        &self.projections
    }

    pub fn d(&self) -> usize {
        self.projections.d()
    }

    pub fn p(&self) -> usize {
        self.projections.p()
    }

    pub fn len(&self) -> usize {
        self.member_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.member_weights.is_empty()
    }

    /// `w_i = R_i^T (R_i Sigma~ R_i^T)^{-1} R_i (mu1~ - mu0~)`.
    pub fn member_weights(&self) -> &[DVector<f64>] {
        &self.member_weights
    }

    /// Discriminant of member `i` alone, including the log prior term.
    pub fn member_score(&self, i: usize, x: &DVector<f64>) -> DiscriminantScore {
        DiscriminantScore(self.member_weights[i].dot(&(x - &self.midpoint)) + self.log_prior)
    }

    pub fn score(&self, x: &DVector<f64>) -> DiscriminantScore {
        self.rule.score(x)
    }

    pub fn predict(&self, samples: &DMatrix<f64>) -> Vec<u8> {
        self.rule.predict(samples)
    }
}

pub fn ensemble_discriminant(x: &DVector<f64>, ens: &TrainedEnsemble) -> DiscriminantScore {
    ens.score(x)
}

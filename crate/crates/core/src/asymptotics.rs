//! Deterministic equivalents of the infinite-ensemble error.
//!
//! The infinite ensemble behaves like LDA with the plug-in covariance
//! regularized by `1/zeta`, where `zeta` solves a scalar fixed-point equation
//! depending on `d`. Which equation, and which extra terms enter the
//! discriminant statistics, depends on whether the means and the covariance
//! are known or estimated; [`KnowledgeRegime`] selects the case.
//!
//! All traces and quadratic forms are evaluated on one eigendecomposition of
//! the population covariance, so evaluating a whole `d` grid costs one
//! `O(p^3)` setup plus `O(p)` per point and solver iteration.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::ClassStats;
use crate::error::{Error, Result};
use crate::numerics::{
    bisect, damped_fixed_point, fixed_point, std_normal_cdf, FixedPoint, RootResult, SolverConfig,
};
use crate::spectrum::{Projected, Spectrum};
use crate::{ErrorEstimate, Provenance};

/// Class-conditional mean and variance of a linear discriminant:
/// `W | class i ~ N(m_i, sigma2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantStats {
    pub m0: f64,
    pub m1: f64,
    pub sigma2: f64,
    pub provenance: Provenance,
}

impl DiscriminantStats {
    /// `pi0 Phi(m0 / sigma) + pi1 Phi(-m1 / sigma)`.
    pub fn error(&self, pi0: f64, pi1: f64) -> f64 {
        let sigma = self.sigma2.sqrt();
        pi0 * std_normal_cdf(self.m0 / sigma) + pi1 * std_normal_cdf(-self.m1 / sigma)
    }
}

/// Misclassification probability of a discriminant with the given
/// class-conditional statistics, tagged with their provenance.
pub fn compose_error(stats: &DiscriminantStats, pi0: f64, pi1: f64) -> ErrorEstimate {
    ErrorEstimate::new(stats.error(pi0, pi1), stats.provenance)
}

/// Which statistics the classifier was trained with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KnowledgeRegime {
    pub means_known: bool,
    pub covariance_known: bool,
}

impl KnowledgeRegime {
    pub const KNOWN: Self = Self {
        means_known: true,
        covariance_known: true,
    };
    pub const UNKNOWN_MEANS: Self = Self {
        means_known: false,
        covariance_known: true,
    };
    pub const UNKNOWN_COVARIANCE: Self = Self {
        means_known: true,
        covariance_known: false,
    };
    pub const UNKNOWN: Self = Self {
        means_known: false,
        covariance_known: false,
    };

    pub const ALL: [Self; 4] = [
        Self::KNOWN,
        Self::UNKNOWN_MEANS,
        Self::UNKNOWN_COVARIANCE,
        Self::UNKNOWN,
    ];
}

/// Scalars of the estimated-covariance fixed point. For a known covariance
/// only `zeta` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointQuantities {
    pub zeta: f64,
    /// Residual of the defining scalar equation at its computed root.
    pub residual: f64,
    pub x_star: Option<f64>,
    pub e: Option<f64>,
    pub e_tilde: Option<f64>,
    pub kappa: Option<f64>,
}

/// Population covariance spectrum and mean difference, prepared once for
/// repeated evaluation over `d`, sample sizes and regimes.
#[derive(Debug, Clone)]
pub struct DeModel {
    spectrum: Spectrum,
    delta: Projected,
    pi0: f64,
    pi1: f64,
    config: SolverConfig,
}

impl DeModel {
    /// From population statistics. The covariance must be positive definite.
    pub fn new(truth: &ClassStats) -> Result<Self> {
        truth.validate()?;
        let spectrum = Spectrum::of_symmetric(&truth.sigma, truth.p());
        if !spectrum.is_full_rank() || spectrum.min_eigenvalue() <= 0.0 {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: spectrum.min_eigenvalue(),
            });
        }
        let delta = spectrum.project(&truth.mean_difference());
        Ok(Self {
            spectrum,
            delta,
            pi0: truth.pi0,
            pi1: truth.pi1,
            config: SolverConfig::default(),
        })
    }

    pub fn with_config(mut self, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        self.config = config;
        Ok(self)
    }

    pub fn p(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn priors(&self) -> (f64, f64) {
        (self.pi0, self.pi1)
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    fn check_d(&self, d: usize) -> Result<()> {
        if d == 0 || d >= self.p() {
            return Err(Error::DGeqP { d, p: self.p() });
        }
        Ok(())
    }

    /// `g(x) = 1 - (1/d) tr{Sigma (Sigma + x^{-1} I)^{-1}}`.
    pub fn g(&self, d: usize, x: f64) -> f64 {
        1.0 - self.spectrum.trace(|l| l * x / (l * x + 1.0)) / d as f64
    }

    /// `h(x) = 1 - p/d + (1/d) tr{(x Sigma + I)^{-1}}`.
    pub fn h(&self, d: usize, x: f64) -> f64 {
        let p = self.p() as f64;
        1.0 - p / d as f64 + self.spectrum.trace(|l| 1.0 / (x * l + 1.0)) / d as f64
    }

    /// Root of `g`: the regularization scale when the covariance is known.
    pub fn zeta_known(&self, d: usize) -> Result<RootResult> {
        self.check_d(d)?;
        bisect(|x| self.g(d, x), &self.config)
    }

    /// `x*`, `zeta`, `(e, e~)` and `kappa` for a covariance estimated from
    /// `n` samples.
    pub fn zeta_hat(&self, d: usize, n: usize) -> Result<FixedPointQuantities> {
        self.check_d(d)?;
        if d >= n {
            return Err(Error::AssumptionViolated(format!(
                "d = {d} must be below n = {n}"
            )));
        }
        let nf = n as f64;
        let root = bisect(|x| self.h(d, x), &self.config)?;
        let x_star = root.root;
        let denom = 1.0 - x_star * self.spectrum.trace(|l| l / (x_star * l + 1.0)) / nf;
        if !(denom > 0.0) {
            return Err(Error::AssumptionViolated(format!(
                "zeta denominator {denom:e} not positive at d = {d}, n = {n}"
            )));
        }
        let zeta = x_star / denom;

        // Gauss-Seidel sweep: e from the current e~, then e~ from the new e
        let map = |_e: f64, et: f64| {
            let e_next = zeta * self.spectrum.trace(|l| l / (et * l + 1.0)) / nf;
            (e_next, zeta / (1.0 + e_next))
        };
        let FixedPoint {
            point: (e, e_tilde),
            ..
        } = match fixed_point(map, (0.0, zeta), &self.config) {
            Ok(fp) => fp,
            Err(Error::MaxIterations { .. } | Error::NonFinite { .. }) => {
                log::debug!("undamped (e, e~) iteration failed at d = {d}; retrying damped");
                damped_fixed_point(map, (0.0, zeta), 0.5, &self.config)?
            }
            Err(other) => return Err(other),
        };

        let t2 = self.spectrum.trace(|l| (l / (e_tilde * l + 1.0)).powi(2));
        let kappa_inv = 1.0 - zeta * zeta * t2 / (nf * (1.0 + e).powi(2));
        if !(kappa_inv > 0.0) {
            return Err(Error::AssumptionViolated(format!(
                "kappa undefined ({kappa_inv:e}) at d = {d}, n = {n}"
            )));
        }
        Ok(FixedPointQuantities {
            zeta,
            residual: root.residual,
            x_star: Some(x_star),
            e: Some(e),
            e_tilde: Some(e_tilde),
            kappa: Some(1.0 / kappa_inv),
        })
    }

    /// Deterministic equivalents of `(m0, m1, sigma2)` for an infinite
    /// ensemble trained on `n0 + n1` samples under `regime`.
    pub fn discriminant_stats(
        &self,
        regime: KnowledgeRegime,
        d: usize,
        n0: usize,
        n1: usize,
    ) -> Result<DiscriminantStats> {
        let ln = (self.pi1 / self.pi0).ln();
        let inv_n_diff = 1.0 / n0 as f64 - 1.0 / n1 as f64;
        let inv_n_sum = 1.0 / n0 as f64 + 1.0 / n1 as f64;
        let s = &self.spectrum;

        let (half_q, shift, sigma2) = if regime.covariance_known {
            let inv_zeta = 1.0 / self.zeta_known(d)?.root;
            let q = s.quadratic(&self.delta, |l| 1.0 / (l + inv_zeta));
            let v = s.quadratic(&self.delta, |l| l / (l + inv_zeta).powi(2));
            if regime.means_known {
                (0.5 * q, 0.0, v)
            } else {
                let t1 = s.trace(|l| l / (l + inv_zeta));
                let t2 = s.trace(|l| (l / (l + inv_zeta)).powi(2));
                (0.5 * q, 0.5 * inv_n_diff * t1, v + inv_n_sum * t2)
            }
        } else {
            let fp = self.zeta_hat(d, n0 + n1)?;
            let (zeta, et, kappa) = (fp.zeta, fp.e_tilde.unwrap(), fp.kappa.unwrap());
            let q = s.quadratic(&self.delta, |l| 1.0 / (et * l + 1.0));
            let v = s.quadratic(&self.delta, |l| l / (et * l + 1.0).powi(2));
            let scale = kappa * zeta * zeta;
            if regime.means_known {
                (0.5 * zeta * q, 0.0, scale * v)
            } else {
                let t1 = s.trace(|l| l / (et * l + 1.0));
                let t2 = s.trace(|l| (l / (et * l + 1.0)).powi(2));
                (
                    0.5 * zeta * q,
                    0.5 * zeta * inv_n_diff * t1,
                    scale * (v + inv_n_sum * t2),
                )
            }
        };
        Ok(DiscriminantStats {
            m0: -half_q + shift + ln,
            m1: half_q + shift + ln,
            sigma2,
            provenance: Provenance::De,
        })
    }

    /// Deterministic equivalent of the error, weighted by the population priors.
    pub fn error(
        &self,
        regime: KnowledgeRegime,
        d: usize,
        n0: usize,
        n1: usize,
    ) -> Result<ErrorEstimate> {
        let stats = self.discriminant_stats(regime, d, n0, n1)?;
        Ok(compose_error(&stats, self.pi0, self.pi1))
    }

    /// [`DeModel::error`] over a grid of `d`, evaluated in parallel.
    pub fn error_curve(
        &self,
        regime: KnowledgeRegime,
        ds: &[usize],
        n0: usize,
        n1: usize,
    ) -> Result<Vec<f64>> {
        ds.par_iter()
            .map(|&d| self.error(regime, d, n0, n1).map(|e| e.value))
            .collect()
    }
}

/// Root of `g` for `sigma` (positive definite, `d < p`).
pub fn zeta_known(sigma: &DMatrix<f64>, d: usize) -> Result<f64> {
    Ok(model_for_covariance(sigma)?.zeta_known(d)?.root)
}

/// Fixed-point quantities for a covariance estimated from `n` samples whose
/// population covariance is `sigma`.
pub fn zeta_hat_of_true(sigma: &DMatrix<f64>, d: usize, n: usize) -> Result<FixedPointQuantities> {
    model_for_covariance(sigma)?.zeta_hat(d, n)
}

fn model_for_covariance(sigma: &DMatrix<f64>) -> Result<DeModel> {
    let p = sigma.nrows();
    let stats = ClassStats::new(
        DVector::zeros(p),
        DVector::zeros(p),
        sigma.clone(),
        0.5,
        0.5,
    )?;
    DeModel::new(&stats)
}

/// Regime dispatch over explicit statistics.
///
/// Known quantities are read from `plug_stats`; quantities the classifier had
/// to estimate must come from `true_stats`, and their absence is
/// [`Error::OracleRequired`]. Priors come from `true_stats` when given.
pub fn de_discriminant_stats(
    regime: KnowledgeRegime,
    true_stats: Option<&ClassStats>,
    plug_stats: &ClassStats,
    n0: usize,
    n1: usize,
    d: usize,
) -> Result<DiscriminantStats> {
    let population = resolve_population(regime, true_stats, plug_stats)?;
    DeModel::new(&population)?.discriminant_stats(regime, d, n0, n1)
}

fn resolve_population(
    regime: KnowledgeRegime,
    truth: Option<&ClassStats>,
    plug: &ClassStats,
) -> Result<ClassStats> {
    let need_truth = !(regime.means_known && regime.covariance_known);
    let truth = match (truth, need_truth) {
        (Some(t), _) => t,
        (None, false) => plug,
        (None, true) => return Err(Error::OracleRequired),
    };
    let means = if regime.means_known { plug } else { truth };
    let sigma = if regime.covariance_known {
        &plug.sigma
    } else {
        &truth.sigma
    };
    Ok(ClassStats {
        mu0: means.mu0.clone(),
        mu1: means.mu1.clone(),
        sigma: sigma.clone(),
        pi0: truth.pi0,
        pi1: truth.pi1,
        estimated_from: None,
    })
}

/// Deterministic equivalent given arbitrary plug-in parameters whose
/// covariance equals the population covariance: the infinite ensemble is LDA
/// with `Sigma~ + zeta^{-1} I` in place of `Sigma~`.
pub fn de_given_parameters(
    plug: &ClassStats,
    truth: &ClassStats,
    zeta: f64,
) -> Result<DiscriminantStats> {
    plug.validate()?;
    truth.validate()?;
    let spectrum = Spectrum::of_symmetric(&plug.sigma, plug.p());
    let resolvent = spectrum.apply(|l| 1.0 / (l + 1.0 / zeta));
    let a = resolvent * plug.mean_difference();
    let mid = plug.midpoint();
    let ln = truth.log_prior_ratio();
    Ok(DiscriminantStats {
        m0: a.dot(&(&truth.mu0 - &mid)) + ln,
        m1: a.dot(&(&truth.mu1 - &mid)) + ln,
        sigma2: a.dot(&(&truth.sigma * &a)),
        provenance: Provenance::De,
    })
}

/// Identity-covariance, equal-prior closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corollary {
    /// Known means and covariance.
    KnownStats,
    /// Estimated means, known covariance.
    UnknownMeans,
    /// Known means, estimated covariance.
    UnknownCovariance,
    /// Everything estimated.
    Unknown,
}

impl Corollary {
    pub fn from_number(which: u8) -> Result<Self> {
        match which {
            1 => Ok(Self::KnownStats),
            2 => Ok(Self::UnknownMeans),
            3 => Ok(Self::UnknownCovariance),
            4 => Ok(Self::Unknown),
            _ => Err(Error::AssumptionViolated(format!(
                "no closed form numbered {which}"
            ))),
        }
    }

    pub fn regime(self) -> KnowledgeRegime {
        match self {
            Self::KnownStats => KnowledgeRegime::KNOWN,
            Self::UnknownMeans => KnowledgeRegime::UNKNOWN_MEANS,
            Self::UnknownCovariance => KnowledgeRegime::UNKNOWN_COVARIANCE,
            Self::Unknown => KnowledgeRegime::UNKNOWN,
        }
    }
}

/// Closed-form error for `Sigma = I` and equal priors.
pub fn corollary_closed_form(
    which: Corollary,
    delta_mu_norm: f64,
    p: usize,
    n0: usize,
    n1: usize,
    d: usize,
) -> Result<ErrorEstimate> {
    let c = delta_mu_norm * delta_mu_norm;
    let (pf, n0f, n1f) = (p as f64, n0 as f64, n1 as f64);
    let factor = if which.regime().covariance_known {
        1.0
    } else {
        let shrink = 1.0 - (d * d) as f64 / ((n0 + n1) as f64 * pf);
        if !(shrink > 0.0) {
            return Err(Error::AssumptionViolated(format!(
                "d^2 = {} must be below n p = {}",
                d * d,
                (n0 + n1) * p
            )));
        }
        shrink.sqrt()
    };
    let value = if which.regime().means_known {
        std_normal_cdf(-0.5 * delta_mu_norm * factor)
    } else {
        let root = (c + pf / n0f + pf / n1f).sqrt();
        let a0 = -0.5 * (c + pf / n1f - pf / n0f) / root * factor;
        let a1 = -0.5 * (c + pf / n0f - pf / n1f) / root * factor;
        0.5 * std_normal_cdf(a0) + 0.5 * std_normal_cdf(a1)
    };
    Ok(ErrorEstimate::new(value, Provenance::De))
}

/// Deterministic equivalent of a projected-resolvent bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearDe {
    /// `a^T (Sigma~ + delta^{-1} I)^{-1} b`.
    pub value: f64,
    pub delta: f64,
    pub delta_tilde: f64,
}

/// Solve `delta = 1 / (gamma (1 + (p/d) delta~))`,
/// `delta~ = (1/gamma)(1/p) tr{D (I + delta D)^{-1}}` and evaluate the
/// resolvent form.
pub fn lemma4_de(
    a: &DVector<f64>,
    b: &DVector<f64>,
    sigma_tilde: &DMatrix<f64>,
    gamma: f64,
    d: usize,
) -> Result<BilinearDe> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let p = sigma_tilde.nrows();
    if a.len() != p || b.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: if a.len() != p { a.len() } else { b.len() },
        });
    }
    let spectrum = Spectrum::of_symmetric(sigma_tilde, p);
    let df = d as f64;
    // eliminating delta~ leaves 1 - gamma delta - (1/d) tr{delta D (I + delta D)^{-1}} = 0
    let root = bisect(
        |x| 1.0 - gamma * x - spectrum.trace(|l| x * l / (1.0 + x * l)) / df,
        &SolverConfig::with_tolerance(1e-12),
    )?;
    let delta = root.root;
    let delta_tilde = spectrum.trace(|l| l / (1.0 + delta * l)) / (gamma * p as f64);
    let resolvent = spectrum.apply(|l| 1.0 / (l + 1.0 / delta));
    Ok(BilinearDe {
        value: a.dot(&(resolvent * b)),
        delta,
        delta_tilde,
    })
}

/// Monte Carlo mean of `a^T R^T (R Sigma~ R^T + gamma I)^{-1} R b` over
/// projections, next to its deterministic equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearCheck {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub de: BilinearDe,
}

impl BilinearCheck {
    /// `|mean - de| / std_error`.
    pub fn z_score(&self) -> f64 {
        (self.mean - self.de.value).abs() / self.std_error
    }
}

pub fn mc_lemma4_bilinear(
    a: &DVector<f64>,
    b: &DVector<f64>,
    sigma_tilde: &DMatrix<f64>,
    gamma: f64,
    d: usize,
    samples: usize,
    seed: u64,
) -> Result<BilinearCheck> {
    if samples == 0 {
        return Err(Error::InvalidConfig(
            "at least one Monte Carlo sample required".into(),
        ));
    }
    let de = lemma4_de(a, b, sigma_tilde, gamma, d)?;
    let p = sigma_tilde.nrows();
    let draws: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let r = crate::classifiers::sample_member(d, p, seed, i, 0);
            let mut m = &r * sigma_tilde * r.transpose();
            for k in 0..d {
                m[(k, k)] += gamma;
            }
            let y = m
                .cholesky()
                .expect("R Sigma R^T + gamma I is positive definite")
                .solve(&(&r * b));
            (&r * a).dot(&y)
        })
        .collect();
    let n = samples as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = if samples > 1 {
        draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(BilinearCheck {
        mean,
        std_error: (var / n).sqrt(),
        samples,
        de,
    })
}

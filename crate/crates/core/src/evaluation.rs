//! Measuring errors and tuning `d`.
//!
//! Empirical test error, the exact error of a fixed rule under a known
//! Gaussian model, averaged k-fold cross-validation, and a sweep that puts
//! every available estimate side by side on a `d` grid and picks the best `d`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{DeModel, KnowledgeRegime};
use crate::classifiers::{EnsembleTrainer, LinearRule, TrainedEnsemble};
use crate::data::{kfold_plan, ClassStats, GaussianSampler, LabeledDataset};
use crate::error::{Error, Result};
use crate::gestimate::GEstimator;
use crate::numerics::std_normal_cdf;
use crate::seed::derive_seed;
use crate::{ErrorEstimate, Provenance};

/// Default size of a synthetic test set.
pub const DEFAULT_TEST_SIZE: usize = 100_000;

const TEST_CHUNK: usize = 8192;

// sub-streams of a sweep seed
const STREAM_ENSEMBLE: u64 = 1;
const STREAM_TEST: u64 = 2;
const STREAM_CV: u64 = 3;

/// Number of columns of `test` that `rule` labels wrongly.
pub fn misclassified(rule: &LinearRule, test: &LabeledDataset) -> Result<usize> {
    if rule.p() != test.p() {
        return Err(Error::DimensionMismatch {
            expected: rule.p(),
            found: test.p(),
        });
    }
    let scores = rule.scores(test.samples());
    Ok(scores
        .iter()
        .zip(test.labels())
        .filter(|(&s, &y)| u8::from(s > 0.0) != y)
        .count())
}

/// Fraction of `test` misclassified by a linear rule.
pub fn rule_error(rule: &LinearRule, test: &LabeledDataset) -> Result<ErrorEstimate> {
    if test.n() == 0 {
        return Err(Error::InvalidDataset("empty test set".into()));
    }
    let wrong = misclassified(rule, test)?;
    Ok(ErrorEstimate::new(
        wrong as f64 / test.n() as f64,
        Provenance::Empirical,
    ))
}

/// Fraction of `test` misclassified by the ensemble.
pub fn empirical_error(ens: &TrainedEnsemble, test: &LabeledDataset) -> Result<ErrorEstimate> {
    rule_error(ens.rule(), test)
}

/// Misclassification probability of a fixed rule when the classes are
/// Gaussian with the statistics `truth`.
pub fn exact_error(rule: &LinearRule, truth: &ClassStats) -> Result<ErrorEstimate> {
    if rule.p() != truth.p() {
        return Err(Error::DimensionMismatch {
            expected: truth.p(),
            found: rule.p(),
        });
    }
    let w = &rule.weights;
    let m0 = w.dot(&truth.mu0) + rule.bias;
    let m1 = w.dot(&truth.mu1) + rule.bias;
    let sigma = (w.dot(&(&truth.sigma * w))).max(0.0).sqrt();
    let value = if sigma > 0.0 {
        truth.pi0 * std_normal_cdf(m0 / sigma) + truth.pi1 * std_normal_cdf(-m1 / sigma)
    } else {
        // a point mass per class
        truth.pi0 * f64::from(u8::from(m0 > 0.0)) + truth.pi1 * f64::from(u8::from(m1 <= 0.0))
    };
    Ok(ErrorEstimate::new(value, Provenance::Exact))
}

/// A large Gaussian test set that is generated chunk by chunk and never
/// held in memory at once. Class counts follow the priors.
#[derive(Debug, Clone)]
pub struct SyntheticTestSet {
    sampler: GaussianSampler,
    n0: usize,
    n1: usize,
    seed: u64,
}

impl SyntheticTestSet {
    pub fn new(truth: &ClassStats, size: usize, seed: u64) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidConfig(
                "test set size must be positive".into(),
            ));
        }
        let n0 = (size as f64 * truth.pi0).round() as usize;
        Ok(Self {
            sampler: GaussianSampler::new(truth)?,
            n0,
            n1: size - n0,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.n0 + self.n1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn chunk(&self, c: usize) -> LabeledDataset {
        let n = self.len();
        let (start, end) = (c * TEST_CHUNK, ((c + 1) * TEST_CHUNK).min(n));
        let n0 = self.n0 * end / n - self.n0 * start / n;
        self.sampler
            .sample(n0, end - start - n0, derive_seed(self.seed, c as u64))
    }

    /// Error rate of each rule on the same test points.
    pub fn errors(&self, rules: &[&LinearRule]) -> Result<Vec<f64>> {
        let chunks = self.len().div_ceil(TEST_CHUNK);
        let counts = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let chunk = self.chunk(c);
                rules
                    .iter()
                    .map(|r| misclassified(r, &chunk))
                    .collect::<Result<Vec<_>>>()
            })
            .try_reduce(
                || vec![0; rules.len()],
                |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()),
            )?;
        Ok(counts
            .iter()
            .map(|&c| c as f64 / self.len() as f64)
            .collect())
    }

    pub fn error(&self, ens: &TrainedEnsemble) -> Result<ErrorEstimate> {
        let e = self.errors(&[ens.rule()])?[0];
        Ok(ErrorEstimate::new(e, Provenance::Empirical))
    }
}

/// Settings for averaged k-fold cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub k: usize,
    pub repeats: usize,
    /// Deal each class separately into the folds.
    pub stratified: bool,
    /// Known priors for the fold classifiers; `None` uses training proportions.
    pub priors: Option<(f64, f64)>,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            k: 10,
            repeats: 100,
            stratified: false,
            priors: None,
        }
    }
}

/// Averaged cross-validation error and the per-repeat errors behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub d: usize,
    pub estimate: ErrorEstimate,
    pub repeat_errors: Vec<f64>,
}

impl CvResult {
    /// Standard error of the mean over repeats.
    pub fn std_error(&self) -> f64 {
        let r = self.repeat_errors.len();
        if r < 2 {
            return 0.0;
        }
        let mean = self.estimate.value;
        let var = self
            .repeat_errors
            .iter()
            .map(|e| (e - mean).powi(2))
            .sum::<f64>()
            / (r - 1) as f64;
        (var / r as f64).sqrt()
    }
}

struct FoldTask {
    repeat: usize,
    fold: usize,
    train: LabeledDataset,
    test: LabeledDataset,
    seed: u64,
}

fn fold_tasks(data: &LabeledDataset, config: &CvConfig, seed: u64) -> Result<Vec<FoldTask>> {
    if config.repeats == 0 {
        return Err(Error::InvalidConfig(
            "cross-validation needs at least one repeat".into(),
        ));
    }
    let mut tasks = Vec::with_capacity(config.repeats * config.k);
    for repeat in 0..config.repeats {
        let repeat_seed = derive_seed(seed, repeat as u64);
        let plan = kfold_plan(
            data.labels(),
            config.k,
            derive_seed(repeat_seed, 0),
            config.stratified,
        )?;
        for fold in 0..config.k {
            tasks.push(FoldTask {
                repeat,
                fold,
                train: data.subset(&plan.train_indices(fold)),
                test: data.subset(&plan.test_indices(fold)),
                seed: derive_seed(repeat_seed, 1 + fold as u64),
            });
        }
    }
    Ok(tasks)
}

/// Smallest `rank - 2` over the training covariances of every fold: the
/// largest `d` that [`cross_validate`] accepts with these settings.
pub fn cv_max_d(data: &LabeledDataset, config: &CvConfig, seed: u64) -> Result<usize> {
    let tasks = fold_tasks(data, config, seed)?;
    tasks
        .par_iter()
        .map(|t| Ok(EnsembleTrainer::from_data(&t.train, config.priors)?.max_d()))
        .try_reduce(|| usize::MAX, |a, b| Ok(a.min(b)))
}

/// Averaged k-fold cross-validation of the size-`m` ensemble at each `d`.
///
/// Each repeat reshuffles the folds with its own derived seed. Misclassified
/// counts are pooled over the folds of a repeat, and the repeat errors are
/// averaged. Every fold classifier is retrained from its training part, and
/// one training spectrum per fold serves the whole grid.
pub fn cross_validate_grid(
    data: &LabeledDataset,
    ds: &[usize],
    m: usize,
    config: &CvConfig,
    seed: u64,
) -> Result<Vec<CvResult>> {
    let tasks = fold_tasks(data, config, seed)?;
    let per_task: Vec<(usize, Vec<usize>)> = tasks
        .par_iter()
        .map(|t| {
            let trainer = EnsembleTrainer::from_data(&t.train, config.priors)?;
            let counts = ds
                .iter()
                .map(|&d| {
                    if d == 0 || d > trainer.max_d() {
                        return Err(Error::DTooLargeForFold {
                            d,
                            fold: t.fold,
                            repeat: t.repeat,
                            rank: trainer.max_d() + 2,
                        });
                    }
                    let ens = trainer.train(d, m, derive_seed(t.seed, d as u64))?;
                    misclassified(ens.rule(), &t.test)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((t.repeat, counts))
        })
        .collect::<Result<_>>()?;

    let n = data.n() as f64;
    let mut wrong = vec![vec![0usize; config.repeats]; ds.len()];
    for (repeat, counts) in per_task {
        for (i, c) in counts.into_iter().enumerate() {
            wrong[i][repeat] += c;
        }
    }
    Ok(ds
        .iter()
        .zip(wrong)
        .map(|(&d, w)| {
            let repeat_errors: Vec<f64> = w.into_iter().map(|c| c as f64 / n).collect();
            let mean = repeat_errors.iter().sum::<f64>() / repeat_errors.len() as f64;
            CvResult {
                d,
                estimate: ErrorEstimate::new(mean, Provenance::CrossValidation),
                repeat_errors,
            }
        })
        .collect())
}

/// [`cross_validate_grid`] at a single `d`.
pub fn cross_validate(
    data: &LabeledDataset,
    d: usize,
    m: usize,
    config: &CvConfig,
    seed: u64,
) -> Result<CvResult> {
    Ok(cross_validate_grid(data, &[d], m, config, seed)?.remove(0))
}

/// An error estimate that can fill a sweep column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Consistent estimate from the training data.
    #[serde(rename = "g_estimate")]
    G,
    /// Deterministic equivalent; needs the population statistics.
    #[serde(rename = "de_oracle")]
    De,
    /// Test error of a trained ensemble.
    Empirical,
    /// Averaged k-fold cross-validation.
    Cv,
}

impl Estimator {
    /// Column order of sweep output.
    pub const ALL: [Estimator; 4] = [
        Estimator::G,
        Estimator::De,
        Estimator::Empirical,
        Estimator::Cv,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Estimator::G => "g_estimate",
            Estimator::De => "de_oracle",
            Estimator::Empirical => "empirical",
            Estimator::Cv => "cv",
        }
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "g" | "g_estimate" => Ok(Estimator::G),
            "de" | "de_oracle" => Ok(Estimator::De),
            "empirical" => Ok(Estimator::Empirical),
            "cv" => Ok(Estimator::Cv),
            other => Err(Error::InvalidConfig(format!(
                "unknown estimator {other:?} (expected g, de, empirical or cv)"
            ))),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

/// Parse a comma-separated estimator list into canonical column order.
pub fn parse_estimators(list: &str) -> Result<Vec<Estimator>> {
    let mut out = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Estimator>>>()?;
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(Error::InvalidConfig("no estimators requested".into()));
    }
    Ok(out)
}

/// Everything a sweep needs besides the training data and the grid.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Ensemble size for empirical and cross-validation columns.
    pub m: usize,
    pub seed: u64,
    /// Known priors for the trained classifiers; `None` estimates them.
    pub priors: Option<(f64, f64)>,
    /// Population statistics, when known. Required by the DE column, and by
    /// the empirical column when no test set is given.
    pub truth: Option<ClassStats>,
    /// Held-out test data for the empirical column.
    pub test: Option<LabeledDataset>,
    /// Size of the synthetic test set drawn from `truth`.
    pub test_size: usize,
    pub cv: CvConfig,
    pub criterion: Estimator,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            m: 100,
            seed: 0,
            priors: None,
            truth: None,
            test: None,
            test_size: DEFAULT_TEST_SIZE,
            cv: CvConfig::default(),
            criterion: Estimator::G,
        }
    }
}

/// Estimates at one `d`; absent columns were not requested.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub de_oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub empirical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cv: Option<f64>,
}

impl SweepRow {
    pub fn get(&self, which: Estimator) -> Option<f64> {
        match which {
            Estimator::G => self.g_estimate,
            Estimator::De => self.de_oracle,
            Estimator::Empirical => self.empirical,
            Estimator::Cv => self.cv,
        }
    }

    fn set(&mut self, which: Estimator, value: f64) {
        let slot = match which {
            Estimator::G => &mut self.g_estimate,
            Estimator::De => &mut self.de_oracle,
            Estimator::Empirical => &mut self.empirical,
            Estimator::Cv => &mut self.cv,
        };
        *slot = Some(value);
    }
}

/// Sweep rows and the recommended `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub estimators: Vec<Estimator>,
    pub rows: Vec<SweepRow>,
    pub best_d: usize,
    pub criterion: Estimator,
}

/// `d` of the row minimizing `which`; ties go to the smallest `d`.
pub fn argmin_d(rows: &[SweepRow], which: Estimator) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for row in rows {
        if let Some(v) = row.get(which) {
            let better = match best {
                None => true,
                Some((bv, bd)) => v < bv || (v == bv && row.d < bd),
            };
            if better {
                best = Some((v, row.d));
            }
        }
    }
    best.map(|(_, d)| d)
}

/// Fill the requested columns over `grid` and pick the `d` minimizing
/// `config.criterion`.
pub fn sweep(
    data: &LabeledDataset,
    grid: &[usize],
    estimators: &[Estimator],
    config: &SweepConfig,
) -> Result<TuningResult> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty d grid".into()));
    }
    let mut estimators = estimators.to_vec();
    estimators.sort();
    estimators.dedup();
    if !estimators.contains(&config.criterion) {
        return Err(Error::InvalidConfig(format!(
            "criterion {} is not among the requested estimators",
            config.criterion
        )));
    }
    let mut rows: Vec<SweepRow> = grid
        .iter()
        .map(|&d| SweepRow {
            d,
            g_estimate: None,
            de_oracle: None,
            empirical: None,
            cv: None,
        })
        .collect();

    for &which in &estimators {
        let values = match which {
            Estimator::G => GEstimator::from_data(data, config.priors)?
                .curve(grid)?
                .into_iter()
                .map(|g| g.error)
                .collect(),
            Estimator::De => {
                let truth = config.truth.as_ref().ok_or(Error::OracleRequired)?;
                DeModel::new(truth)?.error_curve(
                    KnowledgeRegime::UNKNOWN,
                    grid,
                    data.n0(),
                    data.n1(),
                )?
            }
            Estimator::Empirical => empirical_curve(data, grid, config)?,
            Estimator::Cv => cross_validate_grid(
                data,
                grid,
                config.m,
                &config.cv,
                derive_seed(config.seed, STREAM_CV),
            )?
            .into_iter()
            .map(|r| r.estimate.value)
            .collect(),
        };
        for (row, v) in rows.iter_mut().zip(values) {
            row.set(which, v);
        }
        log::info!("sweep: {which} column done");
    }

    let best_d = argmin_d(&rows, config.criterion).expect("grid is nonempty");
    Ok(TuningResult {
        estimators,
        rows,
        best_d,
        criterion: config.criterion,
    })
}

fn empirical_curve(
    data: &LabeledDataset,
    grid: &[usize],
    config: &SweepConfig,
) -> Result<Vec<f64>> {
    let trainer = EnsembleTrainer::from_data(data, config.priors)?;
    let ensemble_seed = derive_seed(config.seed, STREAM_ENSEMBLE);
    let rules = grid
        .iter()
        .map(|&d| {
            Ok(trainer
                .train(d, config.m, derive_seed(ensemble_seed, d as u64))?
                .rule()
                .clone())
        })
        .collect::<Result<Vec<LinearRule>>>()?;
    match (&config.test, &config.truth) {
        (Some(test), _) => rules
            .iter()
            .map(|r| rule_error(r, test).map(|e| e.value))
            .collect(),
        (None, Some(truth)) => {
            let test = SyntheticTestSet::new(
                truth,
                config.test_size,
                derive_seed(config.seed, STREAM_TEST),
            )?;
            test.errors(&rules.iter().collect::<Vec<_>>())
        }
        (None, None) => Err(Error::InvalidConfig(
            "empirical errors need a test set or population statistics".into(),
        )),
    }
}

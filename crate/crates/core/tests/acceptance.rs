//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Criteria 1-4, 8 and 10 are hard gates: any failure makes the process exit
//! nonzero. Criteria 5-7 reproduce single seeded experiments whose outcome
//! depends on one training draw; their verdicts are printed with the numbers
//! behind them but do not abort the run. Criterion 9 runs only when the real
//! datasets are supplied through environment variables.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use rplda::asymptotics::{
    corollary_closed_form, mc_lemma4_bilinear, Corollary, DeModel, KnowledgeRegime,
};
use rplda::classifiers::{
    classify, sample_projections, DiscriminantScore, EnsembleTrainer, LinearRule,
};
use rplda::data::{
    estimate_stats, generate_synthetic, kfold_plan, load_csv, synthetic_preset, ClassStats,
    LabeledDataset, Preset, DEFAULT_LABEL_COLUMN,
};
use rplda::evaluation::{
    argmin_d, cross_validate, cv_max_d, sweep, CvConfig, Estimator, SweepConfig, SyntheticTestSet,
};
use rplda::gestimate::GEstimator;
use rplda::numerics::std_normal_cdf;
use rplda::seed;

/// Seed of every synthetic experiment below, fixed before any was run.
const SEED: u64 = 2020;

#[derive(Clone, Copy, PartialEq)]
enum Gate {
    Hard,
    Reported,
}

/// Id, title, gate and check of one criterion.
type Criterion = (u8, &'static str, Gate, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn check(cond: bool, ok: &mut bool, msg: String, details: &mut Vec<String>) {
    if !cond {
        *ok = false;
    }
    details.push(format!("{}{msg}", if cond { "" } else { "[x] " }));
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut rng = seed::rng(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = rng.random_range(20..=400);
        let d = rng.random_range(1..p);
        let norm = rng.random_range(0.5..=4.0);
        let dir = DVector::from_fn(p, |_, _| rng.random_range(-1.0..1.0));
        let mu1 = dir.normalize() * norm;
        let truth =
            ClassStats::new(DVector::zeros(p), mu1, DMatrix::identity(p, p), 0.5, 0.5).unwrap();
        let de = DeModel::new(&truth)
            .unwrap()
            .error(KnowledgeRegime::KNOWN, d, 100, 100)
            .unwrap();
        worst = worst.max((de.value - std_normal_cdf(-norm / 2.0)).abs());
    }
    let elapsed = start.elapsed();
    Verdict {
        pass: worst <= 1e-10 && elapsed < Duration::from_secs(10),
        detail: format!(
            "max |DE - Phi(-|dmu|/2)| = {worst:.2e} over 50 cases (tol 1e-10), {:.2} s",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let (mut worst_value, mut worst_residual, mut calls) = (0.0f64, 0.0f64, 0);
    for p in [40usize, 100, 200, 400] {
        let identity = synthetic_preset(p, Preset::IdentityCov).unwrap();
        let model = DeModel::new(&identity).unwrap();
        for n in [p / 2, p, 2 * p] {
            let sizes = rplda::data::SampleSizes {
                n0: n / 2,
                n1: n - n / 2,
            };
            let est = GEstimator::from_stats(&identity, Some(sizes)).unwrap();
            for frac in [0.05, 0.25, 0.45] {
                let d = ((frac * p.min(n) as f64) as usize).max(1);
                let r = d as f64 / (p - d) as f64;

                let zeta = model.zeta_known(d).unwrap();
                let fp = model.zeta_hat(d, n).unwrap();
                let zhh = est.zeta_hat_hat(d).unwrap();
                let expect_hat = r / (1.0 - d as f64 / n as f64);

                for (got, want) in [
                    (zeta.root, r),
                    (fp.x_star.unwrap(), r),
                    (fp.zeta, expect_hat),
                    (zhh.root, r),
                ] {
                    worst_value = worst_value.max((got - want).abs());
                }
                for res in [
                    model.g(d, zeta.root),
                    model.h(d, fp.x_star.unwrap()),
                    est.f(d, zhh.root),
                ] {
                    worst_residual = worst_residual.max(res.abs());
                }
                calls += 3;
            }
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        pass: worst_value <= 1e-6 && worst_residual <= 1e-6 && elapsed < Duration::from_secs(5),
        detail: format!(
            "max root error {worst_value:.2e}, max residual {worst_residual:.2e} over {calls} solves (tol 1e-6), {:.2} s",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();

    let hand = DeModel::new(&synthetic_preset(200, Preset::IdentityCov).unwrap())
        .unwrap()
        .zeta_hat(100, 400)
        .unwrap();
    let (e, et, kappa) = (hand.e.unwrap(), hand.e_tilde.unwrap(), hand.kappa.unwrap());
    check(
        within(e, 1.0 / 3.0, 1e-6) && within(et, 1.0, 1e-6) && within(kappa, 8.0 / 7.0, 1e-6),
        &mut ok,
        format!("hand point e={e:.7} e~={et:.7} kappa={kappa:.7}"),
        &mut details,
    );

    let mut worst = 0.0f64;
    let mut points = 0;
    for p in [50usize, 100, 200] {
        for n in [p / 2, p, 3 * p / 2, 2 * p, 4 * p] {
            for frac in [0.1, 0.3] {
                let d = ((frac * p.min(n) as f64) as usize).max(1);
                points += 1;
                let mut mu1 = DVector::zeros(p);
                mu1[0] = 1.5;
                let truth =
                    ClassStats::new(DVector::zeros(p), mu1, DMatrix::identity(p, p), 0.5, 0.5)
                        .unwrap();
                let model = DeModel::new(&truth).unwrap();
                let (n0, n1) = (n / 2, n - n / 2);
                for (regime, cor) in [
                    (
                        KnowledgeRegime::UNKNOWN_COVARIANCE,
                        Corollary::UnknownCovariance,
                    ),
                    (KnowledgeRegime::UNKNOWN, Corollary::Unknown),
                ] {
                    let de = model.error(regime, d, n0, n1).unwrap().value;
                    let closed = corollary_closed_form(cor, 1.5, p, n0, n1, d).unwrap().value;
                    worst = worst.max((de - closed).abs());
                }
            }
        }
    }
    check(
        worst <= 1e-6 && points == 30,
        &mut ok,
        format!("max |DE - closed form| = {worst:.2e} over {points} grid points x 2 regimes"),
        &mut details,
    );
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    details.push(format!("{:.2} s", elapsed.as_secs_f64()));
    Verdict {
        pass: ok,
        detail: details.join("; "),
    }
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let (p, d, gamma) = (200, 60, 0.1);
    let sigma = DMatrix::<f64>::identity(p, p);
    let mut rng = seed::rng(4);
    let mut zs = Vec::new();
    for pair in 0..10u64 {
        let a = DVector::from_fn(p, |_, _| rng.random_range(-1.0..1.0)).normalize();
        let b = DVector::from_fn(p, |_, _| rng.random_range(-1.0..1.0)).normalize();
        let check =
            mc_lemma4_bilinear(&a, &b, &sigma, gamma, d, 500, seed::derive_seed(4, pair)).unwrap();
        zs.push(check.z_score());
    }
    let elapsed = start.elapsed();
    let worst = zs.iter().cloned().fold(0.0, f64::max);
    Verdict {
        pass: worst <= 3.0 && elapsed < Duration::from_secs(120),
        detail: format!(
            "max |MC - DE| / SE = {worst:.2} over 10 pairs (tol 3), z = [{}], {:.1} s",
            zs.iter()
                .map(|z| format!("{z:.2}"))
                .collect::<Vec<_>>()
                .join(", "),
            elapsed.as_secs_f64()
        ),
    }
}

/// Spike preset training data with stratified class counts and known priors.
fn spike_experiment(p: usize, n: usize, pi0: f64) -> (ClassStats, LabeledDataset, SweepConfig) {
    let truth = synthetic_preset(p, Preset::SpikeCov)
        .unwrap()
        .with_priors(pi0, 1.0 - pi0)
        .unwrap();
    let n0 = (pi0 * n as f64).round() as usize;
    let train = generate_synthetic(&truth, n0, n - n0, SEED).unwrap();
    let config = SweepConfig {
        m: 100,
        seed: SEED,
        priors: Some((pi0, 1.0 - pi0)),
        truth: Some(truth.clone()),
        ..SweepConfig::default()
    };
    (truth, train, config)
}

fn full_grid(train: &LabeledDataset) -> Vec<usize> {
    let max_d = GEstimator::from_data(train, None).unwrap().max_d();
    (1..=max_d).collect()
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    let (_, train, config) = spike_experiment(200, 400, 0.5);

    let g = sweep(&train, &full_grid(&train), &[Estimator::G], &config).unwrap();
    let g_best = g.best_d;
    let mut grid = vec![11, 41, 46, 86, 150, g_best];
    grid.sort();
    grid.dedup();
    let est = [Estimator::De, Estimator::Empirical];
    let rows = sweep(
        &train,
        &grid,
        &est,
        &SweepConfig {
            criterion: Estimator::Empirical,
            ..config
        },
    )
    .unwrap()
    .rows;
    let at = |d: usize| rows.iter().find(|r| r.d == d).unwrap();
    for d in [11, 41, 86, 150] {
        let (de, emp) = (at(d).de_oracle.unwrap(), at(d).empirical.unwrap());
        check(
            (de - emp).abs() <= 0.015,
            &mut ok,
            format!(
                "d={d}: |DE {de:.4} - emp {emp:.4}| = {:.4} (tol 0.015)",
                (de - emp).abs()
            ),
            &mut details,
        );
    }
    let e46 = at(46).empirical.unwrap();
    check(
        within(e46, 0.0378, 0.01),
        &mut ok,
        format!("emp(46) = {e46:.4} (0.0378 +- 0.01)"),
        &mut details,
    );
    let eg = at(g_best).empirical.unwrap();
    check(
        within(eg, 0.0415, 0.01),
        &mut ok,
        format!("G argmin d={g_best}, emp there = {eg:.4} (0.0415 +- 0.01)"),
        &mut details,
    );
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(15 * 60);
    details.push(format!("{:.1} s", elapsed.as_secs_f64()));
    Verdict {
        pass: ok,
        detail: details.join("; "),
    }
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    let (_, train, config) = spike_experiment(200, 400, 0.7);
    let est = [Estimator::G, Estimator::De, Estimator::Empirical];
    let rows = sweep(&train, &full_grid(&train), &est, &config)
        .unwrap()
        .rows;
    let value = |d: usize, e: Estimator| rows.iter().find(|r| r.d == d).unwrap().get(e).unwrap();

    let emp_best = argmin_d(&rows, Estimator::Empirical).unwrap();
    let de_best = argmin_d(&rows, Estimator::De).unwrap();
    let g_best = argmin_d(&rows, Estimator::G).unwrap();
    check(
        (76..=96).contains(&emp_best),
        &mut ok,
        format!("empirical argmin {emp_best} in [76, 96]"),
        &mut details,
    );
    check(
        (76..=96).contains(&de_best),
        &mut ok,
        format!("DE argmin {de_best} in [76, 96]"),
        &mut details,
    );
    check(
        (71..=91).contains(&g_best),
        &mut ok,
        format!("G argmin {g_best} in [71, 91]"),
        &mut details,
    );
    let e_emp = value(emp_best, Estimator::Empirical);
    let e_g = value(g_best, Estimator::Empirical);
    check(
        within(e_emp, 0.0372, 0.01),
        &mut ok,
        format!("emp at its argmin {e_emp:.4} (0.0372 +- 0.01)"),
        &mut details,
    );
    check(
        within(e_g, 0.0375, 0.01),
        &mut ok,
        format!("emp at G argmin {e_g:.4} (0.0375 +- 0.01)"),
        &mut details,
    );
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(15 * 60);
    details.push(format!("{:.1} s", elapsed.as_secs_f64()));
    Verdict {
        pass: ok,
        detail: details.join("; "),
    }
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    let (_, train, config) = spike_experiment(400, 200, 0.5);
    let est = [Estimator::G, Estimator::Empirical];
    let rows = sweep(&train, &full_grid(&train), &est, &config)
        .unwrap()
        .rows;

    let gaps: Vec<(usize, f64)> = rows
        .iter()
        .map(|r| (r.d, (r.g_estimate.unwrap() - r.empirical.unwrap()).abs()))
        .collect();
    let (worst_d, worst) = gaps
        .iter()
        .cloned()
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let outside: Vec<usize> = gaps.iter().filter(|g| g.1 > 0.02).map(|g| g.0).collect();
    check(
        outside.is_empty(),
        &mut ok,
        format!(
            "max |G - emp| = {worst:.4} at d={worst_d} (tol 0.02); {} of {} grid points outside{}",
            outside.len(),
            gaps.len(),
            summarize_ranges(&outside)
        ),
        &mut details,
    );
    let best = argmin_d(&rows, Estimator::Empirical).unwrap();
    let e = rows
        .iter()
        .find(|r| r.d == best)
        .unwrap()
        .empirical
        .unwrap();
    check(
        within(e, 0.0751, 0.015) && best.abs_diff(66) <= 10,
        &mut ok,
        format!("empirical minimum {e:.4} at d={best} (0.0751 +- 0.015 near d=66 +- 10)"),
        &mut details,
    );
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(20 * 60);
    details.push(format!("{:.1} s", elapsed.as_secs_f64()));
    Verdict {
        pass: ok,
        detail: details.join("; "),
    }
}

fn summarize_ranges(ds: &[usize]) -> String {
    if ds.is_empty() {
        return String::new();
    }
    let mut parts = Vec::new();
    let mut lo = ds[0];
    let mut hi = ds[0];
    for &d in &ds[1..] {
        if d == hi + 1 {
            hi = d;
        } else {
            parts.push(if lo == hi {
                format!("{lo}")
            } else {
                format!("{lo}-{hi}")
            });
            lo = d;
            hi = d;
        }
    }
    parts.push(if lo == hi {
        format!("{lo}")
    } else {
        format!("{lo}-{hi}")
    });
    format!(" (d = {})", parts.join(", "))
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    let truth = synthetic_preset(50, Preset::IdentityCov).unwrap();
    let train = generate_synthetic(&truth, 50, 50, SEED).unwrap();
    let test = SyntheticTestSet::new(&truth, 100_000, seed::derive_seed(SEED, 8)).unwrap();
    let sample = estimate_stats(&train, Some((0.5, 0.5))).unwrap();

    let lda_known = LinearRule::lda(&truth).unwrap();
    let lda_unknown_means = LinearRule::lda(&sample.with_covariance_of(&truth)).unwrap();
    let known = EnsembleTrainer::new(&truth).unwrap();
    let unknown = EnsembleTrainer::from_data(&train, Some((0.5, 0.5))).unwrap();
    let max_d = unknown.max_d();

    let mut rules = vec![lda_known, lda_unknown_means];
    for d in 1..=max_d {
        rules.push(
            known
                .train(d, 2000, seed::derive_seed(SEED, d as u64))
                .unwrap()
                .rule()
                .clone(),
        );
    }
    for d in 1..=5 {
        rules.push(
            unknown
                .train(d, 2000, seed::derive_seed(SEED, 1000 + d as u64))
                .unwrap()
                .rule()
                .clone(),
        );
    }
    let errors = test.errors(&rules.iter().collect::<Vec<_>>()).unwrap();
    let (bayes, lda_um) = (errors[0], errors[1]);
    let known_gap = errors[2..2 + max_d]
        .iter()
        .map(|e| (e - bayes).abs())
        .fold(0.0, f64::max);
    check(
        known_gap <= 0.01,
        &mut ok,
        format!("known-stats ensemble vs LDA {bayes:.4}: max gap {known_gap:.4} over d=1..{max_d} (tol 0.01)"),
        &mut details,
    );
    let small: Vec<f64> = errors[2 + max_d..].to_vec();
    let small_gap = small.iter().map(|e| (e - lda_um).abs()).fold(0.0, f64::max);
    check(
        small_gap <= 0.015,
        &mut ok,
        format!(
            "unknown-stats ensemble d<=5 [{}] vs unknown-means LDA {lda_um:.4}: max gap {small_gap:.4} (tol 0.015)",
            small.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>().join(", ")
        ),
        &mut details,
    );
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(30 * 60);
    details.push(format!("{:.1} s", elapsed.as_secs_f64()));
    Verdict {
        pass: ok,
        detail: details.join("; "),
    }
}

struct RealDataset {
    env: &'static str,
    name: &'static str,
    /// CV error expected at this d.
    cv_at: Option<(usize, f64)>,
    /// Expected G-estimate argmin.
    g_argmin: Option<usize>,
}

const REAL: [RealDataset; 4] = [
    RealDataset {
        env: "RPLD_PHONEME_CSV",
        name: "phoneme",
        cv_at: None,
        g_argmin: Some(86),
    },
    RealDataset {
        env: "RPLD_PHONEME_SUBSET_CSV",
        name: "phoneme subset",
        cv_at: Some((19, 0.1590)),
        g_argmin: None,
    },
    RealDataset {
        env: "RPLD_LESIONS_CSV",
        name: "lesions",
        cv_at: Some((5, 0.1405)),
        g_argmin: Some(5),
    },
    RealDataset {
        env: "RPLD_PROSTATE_CSV",
        name: "prostate",
        cv_at: Some((14, 0.3217)),
        g_argmin: Some(14),
    },
];

fn criterion_9() -> Option<Verdict> {
    let present: Vec<(&RealDataset, String)> = REAL
        .iter()
        .filter_map(|r| std::env::var(r.env).ok().map(|path| (r, path)))
        .collect();
    if present.is_empty() {
        return None;
    }
    let mut ok = true;
    let mut details = Vec::new();
    let cv = CvConfig::default();
    for (set, path) in present {
        let data = match load_csv(&path, DEFAULT_LABEL_COLUMN, None) {
            Ok(d) => d,
            Err(e) => {
                check(false, &mut ok, format!("{}: {e}", set.name), &mut details);
                continue;
            }
        };
        if let Some(expected) = set.g_argmin {
            let max_d = cv_max_d(&data, &cv, SEED).unwrap();
            let g = GEstimator::from_data(&data, None).unwrap();
            let grid: Vec<usize> = (1..=max_d).collect();
            let curve = g.curve(&grid).unwrap();
            let best = curve
                .iter()
                .fold((0, f64::INFINITY), |b, e| {
                    if e.error < b.1 {
                        (e.d, e.error)
                    } else {
                        b
                    }
                })
                .0;
            check(
                best.abs_diff(expected) <= 10,
                &mut ok,
                format!("{}: G argmin {best} ({expected} +- 10)", set.name),
                &mut details,
            );
        }
        if let Some((d, expected)) = set.cv_at {
            let e = cross_validate(&data, d, 100, &cv, SEED)
                .unwrap()
                .estimate
                .value;
            check(
                within(e, expected, 0.02),
                &mut ok,
                format!("{}: CV at d={d} = {e:.4} ({expected} +- 0.02)", set.name),
                &mut details,
            );
        }
    }
    Some(Verdict {
        pass: ok,
        detail: details.join("; "),
    })
}

fn criterion_10() -> Verdict {
    let start = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    let mut rng = seed::rng(10);

    // rescaling every projection leaves the discriminant unchanged
    let truth = synthetic_preset(30, Preset::SpikeCov).unwrap();
    let train = generate_synthetic(&truth, 25, 25, 1).unwrap();
    let trainer = EnsembleTrainer::from_data(&train, None).unwrap();
    let test = generate_synthetic(&truth, 200, 200, 2).unwrap();
    let mut worst_scale = 0.0f64;
    let mut labels_equal = true;
    for _ in 0..20 {
        let d = rng.random_range(1..=trainer.max_d());
        let c = rng.random_range(0.01..100.0);
        let proj = sample_projections(d, 30, 5, rng.random()).unwrap();
        let a = trainer.train_with(proj.clone()).unwrap();
        let b = trainer.train_with(proj.scaled(c)).unwrap();
        let (sa, sb) = (
            a.rule().scores(test.samples()),
            b.rule().scores(test.samples()),
        );
        worst_scale = worst_scale.max((&sa - &sb).amax() / sa.amax());
        labels_equal &= a.predict(test.samples()) == b.predict(test.samples());
    }
    check(
        worst_scale < 1e-9 && labels_equal,
        &mut ok,
        format!("projection rescaling: rel score change {worst_scale:.1e}"),
        &mut details,
    );

    // swapping the classes negates the score
    let swapped = EnsembleTrainer::from_data(&train.swap_labels(), None).unwrap();
    let mut worst_swap = 0.0f64;
    for d in [1, 5, 20] {
        let s = rng.random();
        let a = trainer
            .train(d, 7, s)
            .unwrap()
            .rule()
            .scores(test.samples());
        let b = swapped
            .train(d, 7, s)
            .unwrap()
            .rule()
            .scores(test.samples());
        worst_swap = worst_swap.max((&a + &b).amax() / a.amax());
    }
    check(
        worst_swap < 1e-9,
        &mut ok,
        format!("label swap: max |s + s'| rel {worst_swap:.1e}"),
        &mut details,
    );

    check(
        classify(DiscriminantScore(0.0)) == 0 && classify(DiscriminantScore(-0.0)) == 0,
        &mut ok,
        "tie goes to class 0".into(),
        &mut details,
    );

    let mut worst_cdf = 0.0f64;
    for _ in 0..1000 {
        let x: f64 = rng.random_range(-10.0..10.0);
        worst_cdf = worst_cdf.max((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs());
    }
    check(
        worst_cdf < 1e-15,
        &mut ok,
        format!("Phi(x) + Phi(-x) - 1 <= {worst_cdf:.1e}"),
        &mut details,
    );

    let mut partitions = true;
    for _ in 0..50 {
        let n = rng.random_range(2..200);
        let labels: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let k = rng.random_range(2..=n.min(12));
        let plan = kfold_plan(&labels, k, rng.random(), rng.random()).unwrap();
        let mut seen = vec![0; n];
        for f in 0..k {
            for j in plan.test_indices(f) {
                seen[j] += 1;
            }
        }
        let sizes = plan.fold_sizes();
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        partitions &= seen.iter().all(|&s| s == 1) && hi - lo <= 1;
    }
    check(
        partitions,
        &mut ok,
        "k-fold plans partition the indices".into(),
        &mut details,
    );

    let same = generate_synthetic(&truth, 9, 9, 3).unwrap()
        == generate_synthetic(&truth, 9, 9, 3).unwrap()
        && trainer.train(4, 6, 5).unwrap().rule() == trainer.train(4, 6, 5).unwrap().rule()
        && cross_validate(
            &train,
            3,
            4,
            &CvConfig {
                repeats: 2,
                ..CvConfig::default()
            },
            8,
        )
        .unwrap()
            == cross_validate(
                &train,
                3,
                4,
                &CvConfig {
                    repeats: 2,
                    ..CvConfig::default()
                },
                8,
            )
            .unwrap();
    check(
        same,
        &mut ok,
        "seeded operations are deterministic".into(),
        &mut details,
    );

    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    details.push(format!("{:.1} s", elapsed.as_secs_f64()));
    Verdict {
        pass: ok,
        detail: details.join("; "),
    }
}

fn main() {
    // `cargo test -- --list` and similar probes expect no work
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let criteria: [Criterion; 9] = [
        (
            1,
            "known-statistics DE equals the Bayes error for identity covariance",
            Gate::Hard,
            criterion_1,
        ),
        (
            2,
            "analytic fixed points and solver residuals",
            Gate::Hard,
            criterion_2,
        ),
        (
            3,
            "estimated-covariance DEs match their closed forms",
            Gate::Hard,
            criterion_3,
        ),
        (
            4,
            "projected bilinear form Monte Carlo vs DE",
            Gate::Hard,
            criterion_4,
        ),
        (
            5,
            "DE vs empirical error, spike preset p=200 n=400",
            Gate::Reported,
            criterion_5,
        ),
        (
            6,
            "unequal-priors tuning bands, p=200 n=400",
            Gate::Reported,
            criterion_6,
        ),
        (
            7,
            "G-estimate vs empirical error, p=400 n=200",
            Gate::Reported,
            criterion_7,
        ),
        (
            8,
            "ensemble limits at p=50 n=100, M=2000",
            Gate::Hard,
            criterion_8,
        ),
        (10, "property suite", Gate::Hard, criterion_10),
    ];
    let mut hard_failures = 0;
    let mut report = |id: u8, title: &str, gate: Gate, v: Verdict| {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let note = if gate == Gate::Reported && !v.pass {
            " (reported, not gating)"
        } else {
            ""
        };
        println!("{tag} [{id}] {title}{note}: {}", v.detail);
        if !v.pass && gate == Gate::Hard {
            hard_failures += 1;
        }
    };
    for (id, title, gate, run) in criteria {
        report(id, title, gate, run());
        if id == 8 {
            match criterion_9() {
                Some(v) => report(9, "real datasets", Gate::Hard, v),
                None => println!(
                    "SKIP [9] real datasets: set RPLD_PHONEME_CSV, RPLD_PHONEME_SUBSET_CSV, RPLD_LESIONS_CSV or RPLD_PROSTATE_CSV to run"
                ),
            }
        }
    }
    if hard_failures > 0 {
        eprintln!("{hard_failures} gating acceptance criteria failed");
        std::process::exit(1);
    }
}

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use rplda::asymptotics::{DeModel, KnowledgeRegime};
use rplda::classifiers::{sample_projections, EnsembleTrainer};
use rplda::data::{generate_synthetic, kfold_plan, synthetic_preset, ClassStats, Preset};
use rplda::gestimate::GEstimator;
use rplda::numerics::std_normal_cdf;
use rplda::seed::derive_seed;

fn identity_truth(p: usize, norm: f64) -> ClassStats {
    let mut mu1 = DVector::zeros(p);
    mu1[0] = norm;
    ClassStats::new(DVector::zeros(p), mu1, DMatrix::identity(p, p), 0.5, 0.5).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cdf_symmetry(x in -30.0f64..30.0) {
        prop_assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_monotone(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(std_normal_cdf(lo) <= std_normal_cdf(hi));
    }

    #[test]
    fn de_errors_are_probabilities(p in 20usize..120, frac in 0.05f64..0.9, norm in 0.1f64..5.0) {
        let d = ((frac * p as f64) as usize).max(1);
        let model = DeModel::new(&identity_truth(p, norm)).unwrap();
        for regime in KnowledgeRegime::ALL {
            let e = model.error(regime, d, 2 * p, 2 * p).unwrap().value;
            prop_assert!((0.0..=1.0).contains(&e));
        }
    }

    #[test]
    fn estimating_more_never_helps(p in 20usize..120, frac in 0.05f64..0.45, norm in 0.5f64..4.0) {
        let d = ((frac * p as f64) as usize).max(1);
        let model = DeModel::new(&identity_truth(p, norm)).unwrap();
        let known = model.error(KnowledgeRegime::KNOWN, d, p, p).unwrap().value;
        let means = model.error(KnowledgeRegime::UNKNOWN_MEANS, d, p, p).unwrap().value;
        let all = model.error(KnowledgeRegime::UNKNOWN, d, p, p).unwrap().value;
        prop_assert!(known <= means + 1e-12);
        prop_assert!(means <= all + 1e-12);
    }

    #[test]
    fn kfold_partitions(n in 2usize..300, k_seed in any::<u64>(), seed in any::<u64>(), strat in any::<bool>()) {
        let labels: Vec<u8> = (0..n).map(|j| (derive_seed(seed, j as u64) % 2) as u8).collect();
        let k = 2 + (k_seed as usize) % (n.min(20) - 1);
        let plan = kfold_plan(&labels, k, seed, strat).unwrap();
        let mut count = vec![0; n];
        for f in 0..k {
            for j in plan.test_indices(f) {
                count[j] += 1;
            }
            prop_assert_eq!(plan.test_indices(f).len() + plan.train_indices(f).len(), n);
        }
        prop_assert!(count.iter().all(|&c| c == 1));
    }

    #[test]
    fn g_estimate_residual_and_range(seed in any::<u64>(), d in 1usize..20) {
        let truth = synthetic_preset(25, Preset::SpikeCov).unwrap();
        let data = generate_synthetic(&truth, 15, 12, seed).unwrap();
        let est = GEstimator::from_data(&data, None).unwrap();
        let g = est.estimate(d.min(est.max_d())).unwrap();
        prop_assert!(g.residual.abs() <= 1e-6);
        prop_assert!(g.error > 0.0 && g.error < 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn projection_scale_does_not_change_labels(seed in any::<u64>(), c in 0.01f64..100.0, d in 1usize..15) {
        let truth = synthetic_preset(20, Preset::SpikeCov).unwrap();
        let train = generate_synthetic(&truth, 20, 20, seed).unwrap();
        let test = generate_synthetic(&truth, 50, 50, seed ^ 1).unwrap();
        let trainer = EnsembleTrainer::from_data(&train, None).unwrap();
        let proj = sample_projections(d, 20, 4, seed).unwrap();
        let a = trainer.train_with(proj.clone()).unwrap();
        let b = trainer.train_with(proj.scaled(c)).unwrap();
        let (sa, sb) = (a.rule().scores(test.samples()), b.rule().scores(test.samples()));
        prop_assert!((&sa - &sb).amax() <= 1e-8 * sa.amax().max(1.0));
    }

    #[test]
    fn swapping_labels_negates_scores(seed in any::<u64>(), d in 1usize..15) {
        let truth = synthetic_preset(20, Preset::SpikeCov).unwrap();
        let train = generate_synthetic(&truth, 18, 23, seed).unwrap();
        let test = generate_synthetic(&truth, 30, 30, seed ^ 7).unwrap();
        let a = EnsembleTrainer::from_data(&train, None).unwrap().train(d, 5, seed).unwrap();
        let b = EnsembleTrainer::from_data(&train.swap_labels(), None).unwrap().train(d, 5, seed).unwrap();
        let sum = a.rule().scores(test.samples()) + b.rule().scores(test.samples());
        prop_assert!(sum.amax() <= 1e-8 * a.rule().scores(test.samples()).amax().max(1.0));
    }
}

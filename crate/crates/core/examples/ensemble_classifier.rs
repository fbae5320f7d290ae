//! Train a projected LDA ensemble and score it against held-out data, the
//! exact error of its rule, and plain LDA.

use rplda::classifiers::{EnsembleTrainer, LinearRule};
use rplda::data::{estimate_stats, generate_synthetic, synthetic_preset, Preset};
use rplda::evaluation::{empirical_error, exact_error, rule_error};

fn main() -> rplda::Result<()> {
    let truth = synthetic_preset(100, Preset::SpikeCov)?;
    let train = generate_synthetic(&truth, 60, 60, 1)?;
    let test = generate_synthetic(&truth, 5000, 5000, 2)?;

    let trainer = EnsembleTrainer::from_data(&train, None)?;
    for d in [5, 20, 40, 80] {
        let ens = trainer.train(d, 200, 3)?;
        println!(
            "d = {d:>3}: test {:.4}  exact {:.4}",
            empirical_error(&ens, &test)?.value,
            exact_error(ens.rule(), &truth)?.value
        );
    }

    // full-dimensional LDA on the same 120 points, for comparison
    let lda = LinearRule::lda(&estimate_stats(&train, None)?)?;
    println!("plain LDA: test {:.4}", rule_error(&lda, &test)?.value);
    Ok(())
}

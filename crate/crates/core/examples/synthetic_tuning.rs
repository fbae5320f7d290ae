//! Tune `d` on synthetic spike-covariance data and compare the G-estimate,
//! the deterministic equivalent and the test error of a trained ensemble.
//!
//! ```text
//! cargo run --release --example synthetic_tuning -- [p] [n] [pi0] [seed] [d_step]
//! ```

use std::time::Instant;

use rplda::data::{generate_synthetic, synthetic_preset, Preset};
use rplda::evaluation::{sweep, Estimator, SweepConfig};

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    std::env::args()
        .nth(i)
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

fn main() -> rplda::Result<()> {
    let p: usize = arg(1, 200);
    let n: usize = arg(2, 400);
    let pi0: f64 = arg(3, 0.5);
    let seed: u64 = arg(4, 2020);
    let step: usize = arg(5, 5);

    let truth = synthetic_preset(p, Preset::SpikeCov)?.with_priors(pi0, 1.0 - pi0)?;
    let n0 = (pi0 * n as f64).round() as usize;
    let train = generate_synthetic(&truth, n0, n - n0, seed)?;
    let max_d = (p.min(n - 2)).saturating_sub(2);
    let grid: Vec<usize> = (1..=max_d).step_by(step).collect();

    let config = SweepConfig {
        m: 100,
        seed,
        priors: Some((pi0, 1.0 - pi0)),
        truth: Some(truth),
        ..SweepConfig::default()
    };
    let start = Instant::now();
    let result = sweep(
        &train,
        &grid,
        &[Estimator::G, Estimator::De, Estimator::Empirical],
        &config,
    )?;
    println!("{:>5} {:>10} {:>10} {:>10}", "d", "g", "de", "empirical");
    for row in &result.rows {
        println!(
            "{:>5} {:>10.5} {:>10.5} {:>10.5}",
            row.d,
            row.g_estimate.unwrap(),
            row.de_oracle.unwrap(),
            row.empirical.unwrap()
        );
    }
    for which in [Estimator::G, Estimator::De, Estimator::Empirical] {
        let d = rplda::evaluation::argmin_d(&result.rows, which).unwrap();
        println!("argmin {which}: d = {d}");
    }
    println!("elapsed {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}

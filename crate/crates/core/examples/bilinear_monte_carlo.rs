//! Monte Carlo check of the projected-resolvent bilinear form against its
//! deterministic equivalent.
//!
//! ```text
//! cargo run --release --example bilinear_monte_carlo -- [d] [samples]
//! ```

use nalgebra::{DMatrix, DVector};
use rplda::asymptotics::mc_lemma4_bilinear;

fn main() -> rplda::Result<()> {
    let d: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(60);
    let samples: usize = std::env::args()
        .nth(2)
        .and_then(|s| s.parse().ok())
        .unwrap_or(500);
    let p = 200;
    // a diagonal covariance with a spread spectrum
    let sigma =
        DMatrix::from_diagonal(&DVector::from_fn(p, |i, _| 0.2 + 2.0 * i as f64 / p as f64));
    let a = DVector::from_fn(p, |i, _| if i % 3 == 0 { 1.0 } else { 0.0 }).normalize();
    let b = DVector::from_fn(p, |i, _| (i as f64 * 0.37).sin()).normalize();

    for gamma in [0.01, 0.1, 1.0] {
        let check = mc_lemma4_bilinear(&a, &b, &sigma, gamma, d, samples, 7)?;
        println!(
            "gamma {gamma:<5} MC {:.5} +- {:.5}   DE {:.5}   z {:.2}",
            check.mean,
            check.std_error,
            check.de.value,
            check.z_score()
        );
    }
    Ok(())
}

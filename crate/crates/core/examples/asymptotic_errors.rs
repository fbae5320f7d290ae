//! Deterministic-equivalent error of the infinite ensemble under each
//! knowledge regime, for the spike-covariance preset.
//!
//! ```text
//! cargo run --release --example asymptotic_errors -- [p] [n]
//! ```

use rplda::asymptotics::{DeModel, KnowledgeRegime};
use rplda::classifiers::LinearRule;
use rplda::data::{synthetic_preset, Preset};
use rplda::evaluation::exact_error;

fn arg(i: usize, default: usize) -> usize {
    std::env::args()
        .nth(i)
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

fn main() -> rplda::Result<()> {
    let p = arg(1, 200);
    let n = arg(2, 400);
    let truth = synthetic_preset(p, Preset::SpikeCov)?;
    let model = DeModel::new(&truth)?;
    let bayes = exact_error(&LinearRule::lda(&truth)?, &truth)?;
    println!("Bayes error {:.5}", bayes.value);

    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10}",
        "d", "known", "means", "cov", "both"
    );
    for d in (1..p.min(n)).step_by(p / 10) {
        let mut line = format!("{d:>5}");
        for regime in KnowledgeRegime::ALL {
            match model.error(regime, d, n / 2, n - n / 2) {
                Ok(e) => line.push_str(&format!(" {:>10.5}", e.value)),
                Err(_) => line.push_str(&format!(" {:>10}", "-")),
            }
        }
        println!("{line}");
    }
    Ok(())
}

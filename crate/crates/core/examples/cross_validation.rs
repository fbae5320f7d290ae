//! Repeated k-fold cross-validation of the ensemble next to the G-estimate,
//! which needs no resampling.

use std::time::Instant;

use rplda::data::{generate_synthetic, synthetic_preset, Preset};
use rplda::evaluation::{cross_validate_grid, cv_max_d, CvConfig};
use rplda::gestimate::GEstimator;

fn main() -> rplda::Result<()> {
    let truth = synthetic_preset(60, Preset::SpikeCov)?;
    let data = generate_synthetic(&truth, 40, 40, 11)?;
    let config = CvConfig {
        k: 5,
        repeats: 10,
        stratified: true,
        ..CvConfig::default()
    };
    let max_d = cv_max_d(&data, &config, 5)?;
    let grid: Vec<usize> = (1..=max_d).step_by(6).collect();

    let start = Instant::now();
    let cv = cross_validate_grid(&data, &grid, 50, &config, 5)?;
    let cv_time = start.elapsed();
    let start = Instant::now();
    let g = GEstimator::from_data(&data, None)?.curve(&grid)?;
    let g_time = start.elapsed();

    println!("{:>4} {:>8} {:>8} {:>8}", "d", "cv", "se", "g");
    for (c, g) in cv.iter().zip(&g) {
        println!(
            "{:>4} {:>8.4} {:>8.4} {:>8.4}",
            c.d,
            c.estimate.value,
            c.std_error(),
            g.error
        );
    }
    println!(
        "cv {:.1} ms, g {:.2} ms",
        cv_time.as_secs_f64() * 1e3,
        g_time.as_secs_f64() * 1e3
    );
    Ok(())
}

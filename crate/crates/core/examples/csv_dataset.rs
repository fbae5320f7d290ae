//! Round-trip a dataset through CSV with string labels, then estimate the
//! error curve of the loaded data.
//!
//! ```text
//! cargo run --release --example csv_dataset -- [path.csv] [label_column] [positive_label]
//! ```
//!
//! Without a path, a synthetic dataset is written to a temporary file first.

use rplda::data::{generate_synthetic, load_csv, synthetic_preset, write_csv, Preset};
use rplda::gestimate::GEstimator;

fn main() -> rplda::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let (path, label, positive) = match args.get(1) {
        Some(path) => (
            std::path::PathBuf::from(path),
            args.get(2).cloned().unwrap_or_else(|| "label".into()),
            args.get(3).cloned(),
        ),
        None => {
            let path = std::env::temp_dir().join("rplda_example.csv");
            let truth = synthetic_preset(40, Preset::SpikeCov)?;
            write_csv(&generate_synthetic(&truth, 50, 30, 4)?, &path)?;
            println!("wrote {}", path.display());
            (path, "label".into(), Some("1".into()))
        }
    };

    let data = load_csv(&path, &label, positive.as_deref())?;
    println!("p = {}, n0 = {}, n1 = {}", data.p(), data.n0(), data.n1());
    let est = GEstimator::from_data(&data, None)?;
    let grid: Vec<usize> = (1..=est.max_d()).collect();
    let best = est
        .curve(&grid)?
        .into_iter()
        .min_by(|a, b| a.error.total_cmp(&b.error))
        .expect("non-empty grid");
    println!("lowest G-estimate {:.4} at d = {}", best.error, best.d);
    Ok(())
}

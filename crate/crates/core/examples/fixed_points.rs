//! Scalar fixed points behind the deterministic equivalents, with the
//! residual each solver leaves behind.

use rplda::asymptotics::DeModel;
use rplda::data::{synthetic_preset, Preset};

fn main() -> rplda::Result<()> {
    let (p, n) = (200, 400);
    for preset in [Preset::IdentityCov, Preset::SpikeCov] {
        let model = DeModel::new(&synthetic_preset(p, preset)?)?;
        println!("{preset:?}");
        println!(
            "{:>5} {:>10} {:>10} {:>10} {:>10} {:>10} {:>9}",
            "d", "zeta", "zeta_hat", "x*", "e", "e~", "residual"
        );
        for d in [10, 50, 100, 150, 190] {
            let known = model.zeta_known(d)?;
            let q = model.zeta_hat(d, n)?;
            println!(
                "{d:>5} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>10.5} {:>9.1e}",
                known.root,
                q.zeta,
                q.x_star.unwrap_or(f64::NAN),
                q.e.unwrap_or(f64::NAN),
                q.e_tilde.unwrap_or(f64::NAN),
                q.residual.abs().max(known.residual.abs())
            );
        }
    }
    Ok(())
}

//! Supremum deviation bounds for a binary class with mean eta.

use rade_bounds::bounds::{sd_bound_bd, sd_bound_bousquet, sd_bound_sb};
use rade_bounds::{Confidence, Side, SupDeviationInputs};

fn main() -> rade_bounds::Result<()> {
    let delta = Confidence::new(0.05)?;
    let m = 1000;
    println!("bounded differences: {:.5}", sd_bound_bd(1.0, m, delta)?.value);
    println!("{:>6} {:>6} {:>9} {:>9} {:>7}", "E[Z]", "eta", "bousquet", "sb", "ratio");
    for (ez, eta) in [(0.01, 0.005), (0.01, 0.05), (0.05, 0.02), (0.05, 0.3)] {
        let inp = SupDeviationInputs::new(ez, 1.0, m).with_tau(eta * (1.0 - eta)).with_mean_gap(eta);
        let vd = sd_bound_bousquet(&inp, delta)?.value;
        let sb = sd_bound_sb(&inp, Side::Pos, delta)?.value;
        println!("{ez:>6} {eta:>6} {vd:>9.5} {sb:>9.5} {:>7.3}", vd / sb);
    }
    Ok(())
}

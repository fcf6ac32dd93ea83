//! Bounded-differences against self-bounding ERA bounds as n grows.

use rade_bounds::bounds::{era_bound_bd, era_bound_sb_nu, era_bound_sb_wvar};
use rade_bounds::Confidence;

fn main() -> rade_bounds::Result<()> {
    let delta = Confidence::new(0.05)?;
    let m = 10_000;
    let (mcera, nu_hat, wvar_hat) = (0.01, 0.05, 0.03);
    println!("{:>5} {:>10} {:>10} {:>10}", "n", "bd", "sb_nu", "sb_wvar");
    for n in [1, 10, 100] {
        let bd = mcera + era_bound_bd(1.0, n, m, delta)?.value;
        let nu = era_bound_sb_nu(mcera, 1.0, nu_hat, n, m, delta)?.value;
        let wvar = era_bound_sb_wvar(mcera, 1.0, wvar_hat, n, m, delta)?.value;
        println!("{n:>5} {bd:>10.6} {nu:>10.6} {wvar:>10.6}");
    }
    Ok(())
}

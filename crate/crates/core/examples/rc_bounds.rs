//! Rademacher complexity bounds: the two-stage chain through the ERA and the
//! single sign vector bounds.

use rade_bounds::bounds::{
    era_bound_bd, era_bound_sb_wvar, rc_bound_from_era, rc_bound_n1_bd, rc_bound_n1_var, wvar_upper_bound,
};
use rade_bounds::Confidence;

fn main() -> rade_bounds::Result<()> {
    let half = Confidence::new(0.05)?.split(2);
    let (m, mcera, wvar_hat) = (100_000, 0.004, 0.02);

    let era_bd = mcera + era_bound_bd(1.0, 1, m, half)?.value;
    let era_sb = era_bound_sb_wvar(mcera, 1.0, wvar_hat, 1, m, half)?.value;
    println!("bd then sb: {:.6}", rc_bound_from_era(era_bd, 1.0, m, half)?.value);
    println!("sb then sb: {:.6}", rc_bound_from_era(era_sb, 1.0, m, half)?.value);

    let wvar_ub = wvar_upper_bound(wvar_hat, 1.0, m, half)?.value;
    println!("n=1 bd:     {:.6}", rc_bound_n1_bd(mcera, 1.0, m, half)?.value);
    println!("n=1 var:    {:.6}", rc_bound_n1_var(mcera, 1.0, wvar_ub, m, half)?.value);
    Ok(())
}

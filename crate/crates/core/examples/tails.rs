//! Bennett tails next to their sub-gamma relaxations.

use rade_bounds::bounds::{tail_probability, TailKind, TailParams};

fn main() -> rade_bounds::Result<()> {
    let p = TailParams { c: Some(1.0), z: Some(1.0), m: Some(1000), rc: Some(0.05), wvar: Some(0.1), ..Default::default() };
    for kind in [TailKind::RcSelfBounding, TailKind::WvarSelfBounding] {
        let relaxed = kind.relaxation().expect("paired kind");
        println!("{kind} vs {relaxed}");
        for eps in [0.005, 0.01, 0.02, 0.04] {
            println!("  eps={eps:<6} {:.3e}  {:.3e}", tail_probability(kind, eps, &p)?, tail_probability(relaxed, eps, &p)?);
        }
    }
    Ok(())
}

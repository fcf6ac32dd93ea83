//! How often each bound misses the exact quantity on a synthetic domain.

use rade_bounds::oracles::{coverage_experiment, GeneratorSpec};
use rade_bounds::{Confidence, Method};

fn main() -> rade_bounds::Result<()> {
    let generator = GeneratorSpec::default();
    let delta = Confidence::new(0.1)?;
    for method in [Method::EraBd, Method::EraSbWvar, Method::RcFromEra, Method::WvarUb, Method::SdSbPos] {
        let r = coverage_experiment(&generator, method, 5000, delta, 1)?;
        println!(
            "{:<14} target={:<7} failures={:<4} freq={:.4} mean bound={:.4} mean truth={:.4}",
            method.tag(),
            r.target,
            r.failures,
            r.failure_frequency,
            r.mean_bound,
            r.mean_truth
        );
    }
    Ok(())
}

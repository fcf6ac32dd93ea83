//! Exhaustive checks of the self-bounding properties on tiny classes.

use rade_bounds::oracles::{
    verify_selfbounding_mcera, verify_selfbounding_mean_gap, verify_selfbounding_sd, verify_selfbounding_wvar,
    Configurations, FiniteDomain, VerifyOptions,
};
use rade_bounds::{EvaluationMatrix, Side};

fn main() -> rade_bounds::Result<()> {
    let opts = VerifyOptions::default();
    let sample = EvaluationMatrix::new(
        vec![vec![0.6, -0.2, 0.1], vec![-0.4, 0.3, 0.5], vec![0.2, 0.6, -0.3]],
        -0.4,
        0.6,
    )?;
    for weak in [false, true] {
        let r = verify_selfbounding_mcera(&sample, 2, weak, opts)?;
        println!("mcera weak={weak:<5} passed={} slack={:+.3e} over {} sign matrices", r.passed, r.max_sum_slack, r.configurations_checked);
    }

    let domain = FiniteDomain::new(
        EvaluationMatrix::new(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]], 0.0, 1.0)?,
        vec![0.5, 0.3, 0.2],
    )?;
    let all = Configurations::Exhaustive(4);
    let reports = [
        ("sd+", verify_selfbounding_sd(&domain, &all, Side::Pos, opts)?),
        ("sd-", verify_selfbounding_sd(&domain, &all, Side::Neg, opts)?),
        ("wvar", verify_selfbounding_wvar(&domain, &all, opts)?),
        ("eta", verify_selfbounding_mean_gap(&domain, &all, Side::Pos, opts)?),
        ("gamma", verify_selfbounding_mean_gap(&domain, &all, Side::Neg, opts)?),
    ];
    for (name, r) in reports {
        println!("{name:<5} passed={} slack={:+.3e} over {} samples", r.passed, r.max_sum_slack, r.configurations_checked);
    }
    Ok(())
}

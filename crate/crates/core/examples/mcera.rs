//! Empirical statistics and the n-MCERA of a small class.

use rade_bounds::{class_stats, mcera, EvaluationMatrix, SignMatrix};

fn main() -> rade_bounds::Result<()> {
    // three thresholds evaluated on six points
    let rows = vec![
        vec![1.0, 1.0, 1.0],
        vec![0.0, 1.0, 1.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0],
    ];
    let evals = EvaluationMatrix::new(rows, 0.0, 1.0)?;
    let s = class_stats(&evals);
    println!("z_hat={} nu_hat={:.4} wvar_hat={:.4} eta_hat={:.4} gamma_hat={:.4}", s.z_hat, s.nu_hat, s.wvar_hat, s.eta_hat, s.gamma_hat);

    for n in [1, 10, 100, 1000] {
        let sigma = SignMatrix::generate(42, n, evals.m())?;
        println!("n={n:>4}  mcera={:.4}", mcera(&evals, &sigma)?);
    }
    Ok(())
}

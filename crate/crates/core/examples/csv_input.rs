//! Loading an evaluation matrix from CSV and running the full ERA chain on it.

use rade_bounds::bounds::chain::{bound_from_data, ChainOptions};
use rade_bounds::{class_stats, Confidence, EvaluationMatrix, Method, SignMatrix};

const DATA: &str = "\
#range,-1,1
a,b,c
1,-1,0.5
1,1,-0.5
-1,1,0.25
1,-1,-1
-1,-1,1
1,1,0
";

fn main() -> rade_bounds::Result<()> {
    let evals = EvaluationMatrix::from_csv_str(DATA)?;
    println!("{} points, {} functions (zero function added: {})", evals.m(), evals.k(), evals.zero_column_inserted());
    println!("{:?}", class_stats(&evals));
    let sigma = SignMatrix::generate(7, 50, evals.m())?;
    let delta = Confidence::new(0.05)?;
    for method in [Method::EraSbWvar, Method::RcFromEra] {
        println!("{}", bound_from_data(method, &evals, &sigma, delta, ChainOptions::default())?.to_json());
    }
    Ok(())
}

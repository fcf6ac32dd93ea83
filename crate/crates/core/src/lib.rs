//! Data-dependent Rademacher bounds for finite function classes.
//!
//! The crate estimates the Rademacher complexity of a class from its values on
//! a sample, through the n-sample Monte Carlo Empirical Rademacher Average
//! (n-MCERA), and turns the estimate into high-probability bounds on the ERA,
//! the Rademacher complexity, the wimpy variance and the supremum deviations.
//!
//! - [`class_eval`]: evaluation matrices, sign matrices, n-MCERA and empirical statistics.
//! - [`bounds`]: closed-form bounds and their tail probabilities.
//! - [`oracles`]: exact ERA by enumeration, exhaustive self-bounding checks and coverage experiments.
//! - [`simulation`]: deterministic parameter sweeps comparing the bounds.
//! - [`cli`]: the `rade-bounds` command line.

pub mod bounds;
pub mod class_eval;
pub mod error;
pub mod cli;
pub mod oracles;
pub mod simulation;

pub use bounds::{BoundResult, Confidence, Method, Side, SupDeviationInputs};
pub use class_eval::{class_stats, mcera, ClassStats, EvaluationMatrix, SignMatrix};
pub use error::{Error, Result};

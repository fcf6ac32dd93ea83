//! Empirical coverage of the probabilistic bounds on synthetic finite domains
//! where every quantity being bounded is known exactly.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{era_exact, FiniteDomain};
use crate::bounds::chain::{bound_from_data, ChainOptions};
use crate::bounds::{Confidence, Method, Side};
use crate::class_eval::{EvaluationMatrix, SignMatrix};
use crate::error::{Error, Result};

/// How the finite domain of a coverage experiment is built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// Explicit values `f_k(x)`, one row per domain point; uniform `mu` when omitted.
    Explicit {
        values: Vec<Vec<f64>>,
        #[serde(default)]
        mu: Option<Vec<f64>>,
        a: f64,
        b: f64,
    },
    /// Random values drawn once from `seed`.
    Random {
        points: usize,
        functions: usize,
        #[serde(default)]
        a: f64,
        #[serde(default = "one")]
        b: f64,
        /// Values in `{a, b}` instead of uniform on `[a, b]`.
        #[serde(default = "yes")]
        binary: bool,
        #[serde(default = "yes")]
        uniform_mu: bool,
        #[serde(default)]
        seed: u64,
    },
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// A synthetic class on a finite domain plus the sample and sign-matrix sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub domain: DomainSpec,
    pub m: usize,
    pub n: usize,
}

impl Default for GeneratorSpec {
    /// Binary class of 3 functions on 4 equally likely points, samples of 8
    /// points and 2 sign vectors.
    fn default() -> Self {
        GeneratorSpec {
            domain: DomainSpec::Random {
                points: 4,
                functions: 3,
                a: 0.0,
                b: 1.0,
                binary: true,
                uniform_mu: true,
                seed: 0,
            },
            m: 8,
            n: 2,
        }
    }
}

impl GeneratorSpec {
    pub fn build_domain(&self) -> Result<FiniteDomain> {
        match &self.domain {
            DomainSpec::Explicit { values, mu, a, b } => {
                let evals = EvaluationMatrix::new(values.clone(), *a, *b)?;
                match mu {
                    Some(mu) => FiniteDomain::new(evals, mu.clone()),
                    None => Ok(FiniteDomain::uniform(evals)),
                }
            }
            &DomainSpec::Random { points, functions, a, b, binary, uniform_mu, seed } => {
                if points == 0 || functions == 0 {
                    return Err(Error::invalid("a random domain needs at least one point and one function"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let values: Vec<Vec<f64>> = (0..points)
                    .map(|_| {
                        (0..functions)
                            .map(|_| if binary { if rng.gen::<bool>() { b } else { a } } else { rng.gen_range(a..=b) })
                            .collect()
                    })
                    .collect();
                let evals = EvaluationMatrix::new(values, a, b)?;
                if uniform_mu {
                    Ok(FiniteDomain::uniform(evals))
                } else {
                    let weights: Vec<f64> = (0..points).map(|_| rng.gen_range(0.1..1.0)).collect();
                    let total: f64 = weights.iter().sum();
                    FiniteDomain::new(evals, weights.iter().map(|w| w / total).collect())
                }
            }
        }
    }
}

/// Result of a coverage experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub method: Method,
    pub delta: f64,
    pub trials: u64,
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub domain_points: usize,
    pub functions: usize,
    /// The quantity each trial compares against: `era`, `rc`, `wvar`, `eta`,
    /// `gamma`, `sup_variance` or `sd_pos` / `sd_neg`.
    pub target: &'static str,
    pub failures: u64,
    pub failure_frequency: f64,
    /// `delta + 3 sqrt(delta (1 - delta) / trials)`
    pub tolerance_band: f64,
    pub mean_bound: f64,
    pub mean_truth: f64,
    /// `failure_frequency <= delta`
    pub passed: bool,
}

enum Truth {
    Fixed(f64),
    EraOfSample,
    Deviation(Side),
}

/// Draws `trials` samples (and sign matrices) from the generator, computes
/// `method` from each with [`bound_from_data`], and counts how often the
/// bound falls below the exact quantity it claims to bound.
///
/// Trial `t` uses ChaCha stream `t` of `seed`, so the report depends only on
/// the arguments. SD_BD and SD_BOUSQUET are checked against the positive
/// supremum deviation.
pub fn coverage_experiment(
    generator: &GeneratorSpec,
    method: Method,
    trials: u64,
    delta: Confidence,
    seed: u64,
) -> Result<CoverageReport> {
    let domain = generator.build_domain()?;
    let (m, n) = (generator.m, generator.n);
    if m == 0 || n == 0 {
        return Err(Error::invalid("generator needs m >= 1 and n >= 1"));
    }
    if trials == 0 {
        return Err(Error::invalid("at least one trial is needed"));
    }
    let (truth, target) = match method {
        Method::EraBd | Method::EraSbNu | Method::EraSbWvar => {
            if m > super::ERA_EXACT_MAX_M {
                return Err(Error::Capacity(format!(
                    "exact ERA ground truth needs m <= {}, got {m}",
                    super::ERA_EXACT_MAX_M
                )));
            }
            (Truth::EraOfSample, "era")
        }
        Method::RcFromEra | Method::RcN1Bd | Method::RcN1Var => {
            (Truth::Fixed(domain.rademacher_complexity(m)?), "rc")
        }
        Method::WvarUb => (Truth::Fixed(domain.wvar()), "wvar"),
        Method::EtaUb => (Truth::Fixed(domain.eta()), "eta"),
        Method::GammaUb => (Truth::Fixed(domain.gamma()), "gamma"),
        Method::TauBhatiaDavis => (Truth::Fixed(domain.sup_variance()), "sup_variance"),
        Method::SdBd | Method::SdBousquet | Method::SdSbPos => (Truth::Deviation(Side::Pos), "sd_pos"),
        Method::SdSbNeg => (Truth::Deviation(Side::Neg), "sd_neg"),
    };
    let pick = WeightedIndex::new(domain.mu()).map_err(|e| Error::invalid(format!("bad distribution: {e}")))?;

    let outcomes: Vec<Result<(bool, f64, f64)>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let rows: Vec<usize> = (0..m).map(|_| pick.sample(&mut rng)).collect();
            let sigma = SignMatrix::generate(rng.next_u64(), n, m)?;
            let sample = domain.evals().select_rows(&rows)?;
            let bound = bound_from_data(method, &sample, &sigma, delta, ChainOptions::default())?.value;
            let truth = match truth {
                Truth::Fixed(v) => v,
                Truth::EraOfSample => era_exact(&sample)?,
                Truth::Deviation(side) => domain.supremum_deviation(&rows, side),
            };
            let failed = truth > bound + 1e-12 * bound.abs().max(1.0);
            Ok((failed, bound, truth))
        })
        .collect();

    let (mut failures, mut bound_sum, mut truth_sum) = (0u64, 0.0, 0.0);
    for outcome in outcomes {
        let (failed, bound, truth) = outcome?;
        failures += u64::from(failed);
        bound_sum += bound;
        truth_sum += truth;
    }
    let d = delta.delta();
    let frequency = failures as f64 / trials as f64;
    Ok(CoverageReport {
        method,
        delta: d,
        trials,
        seed,
        m,
        n,
        domain_points: domain.size(),
        functions: domain.evals().k(),
        target,
        failures,
        failure_frequency: frequency,
        tolerance_band: d + 3.0 * (d * (1.0 - d) / trials as f64).sqrt(),
        mean_bound: bound_sum / trials as f64,
        mean_truth: truth_sum / trials as f64,
        passed: frequency <= d,
    })
}

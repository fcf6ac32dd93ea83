//! Exhaustive checks of (weak) self-bounding properties.
//!
//! A function `g` of `N` coordinates is (alpha, beta)-self-bounding when,
//! with `g_i` the infimum of `g` over the `i`-th coordinate,
//! `0 <= g - g_i <= 1` and `sum_i (g - g_i) <= alpha g + beta`. The weak
//! variant sums squared decrements. The checks below evaluate both conditions
//! on every configuration (or on a uniform sample of them when exhaustive
//! enumeration is too large and a sampling budget is given).

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_sample_enumeration, FiniteDomain};
use crate::bounds::Side;
use crate::class_eval::{class_stats, EvaluationMatrix, SignMatrix};
use crate::error::{Error, Result};

/// Largest `n m` for exhaustive sign-matrix enumeration.
pub const SIGN_ENUMERATION_MAX: usize = 16;

/// Largest domain and sample size for exhaustive sample enumeration.
pub const SAMPLE_REPLACEMENT_MAX: usize = 8;

/// Absolute slack allowed for floating-point rounding in pass/fail decisions.
pub const TOLERANCE: f64 = 1e-9;

const CHUNK: u64 = 1 << 10;

/// Outcome of a self-bounding check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfBoundingReport {
    pub alpha: f64,
    pub beta: f64,
    pub weak: bool,
    /// Largest `g - g_i` over all coordinates and configurations.
    pub max_single_decrement: f64,
    /// Smallest `g - g_i`.
    pub min_single_decrement: f64,
    /// Largest `sum_i (g - g_i) - alpha g - beta` (squared decrements when weak).
    pub max_sum_slack: f64,
    pub configurations_checked: u64,
    /// Configurations were sampled rather than enumerated.
    pub sampled: bool,
    pub passed: bool,
}

impl SelfBoundingReport {
    fn empty(alpha: f64, beta: f64, weak: bool) -> Self {
        SelfBoundingReport {
            alpha,
            beta,
            weak,
            max_single_decrement: f64::NEG_INFINITY,
            min_single_decrement: f64::INFINITY,
            max_sum_slack: f64::NEG_INFINITY,
            configurations_checked: 0,
            sampled: false,
            passed: true,
        }
    }

    fn observe(&mut self, g: f64, decrements: &[f64]) {
        let mut sum = 0.0;
        for &d in decrements {
            self.max_single_decrement = self.max_single_decrement.max(d);
            self.min_single_decrement = self.min_single_decrement.min(d);
            sum += if self.weak { d * d } else { d };
        }
        self.max_sum_slack = self.max_sum_slack.max(sum - self.alpha * g - self.beta);
        self.configurations_checked += 1;
    }

    /// Combines two partial reports over disjoint configuration sets.
    pub fn merge(mut self, other: &SelfBoundingReport) -> Self {
        self.max_single_decrement = self.max_single_decrement.max(other.max_single_decrement);
        self.min_single_decrement = self.min_single_decrement.min(other.min_single_decrement);
        self.max_sum_slack = self.max_sum_slack.max(other.max_sum_slack);
        self.configurations_checked += other.configurations_checked;
        self.sampled |= other.sampled;
        self
    }

    fn finish(mut self, sampled: bool) -> Self {
        self.sampled = sampled;
        self.passed = self.min_single_decrement >= -TOLERANCE
            && self.max_single_decrement <= 1.0 + TOLERANCE
            && self.max_sum_slack <= TOLERANCE;
        self
    }
}

/// Number of uniformly drawn configurations used when exhaustive enumeration
/// exceeds the capacity limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingBudget {
    pub count: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Without a budget, oversized checks fail with a capacity error.
    pub sampling: Option<SamplingBudget>,
}

/// Which samples a sample-replacement check visits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Configurations {
    /// One sample, given as domain indices.
    Single(Vec<usize>),
    /// Every sample of size `m` from the domain.
    Exhaustive(usize),
}

/// Runs `check(config)` over `0..total` in fixed chunks and merges the partial
/// reports. Max/min/count reductions make the result independent of the
/// traversal order.
fn sweep<F>(total: u64, empty: SelfBoundingReport, check: F) -> SelfBoundingReport
where
    F: Fn(u64, &mut SelfBoundingReport) + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut report = empty;
            for config in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                check(config, &mut report);
            }
            report
        })
        .reduce(|| empty, |a, b| a.merge(&b))
}

/// Row sums `R_j = sup_k sum_i sigma_ji f_k(s_i)` and the decrement
/// `R_j - min(R_j, R_j with sigma_ji flipped)` of every coordinate.
fn mcera_decrements(evals: &EvaluationMatrix, signs: &[i8], n: usize, acc: &mut [f64], decs: &mut Vec<f64>) -> f64 {
    let m = evals.m();
    decs.clear();
    let mut g = 0.0;
    for j in 0..n {
        let row = &signs[j * m..(j + 1) * m];
        let r = crate::class_eval::signed_row_sup(evals, row, acc);
        g += r;
        for (i, &s) in row.iter().enumerate() {
            let s = f64::from(s);
            let flipped = acc
                .iter()
                .zip(evals.row(i))
                .map(|(a, v)| a - 2.0 * s * v)
                .fold(f64::NEG_INFINITY, f64::max);
            decs.push(r - r.min(flipped));
        }
    }
    g
}

struct McEraSetup {
    evals: EvaluationMatrix,
    alpha: f64,
    beta: f64,
}

/// Rescales by `1/(2 z_hat)` so that `z_hat <= 1/2`, and picks the constants:
/// strong `(1, n m nu_hat)` or weak `(2 z_hat, 2 n m wvar_hat)` of the
/// rescaled class.
fn mcera_setup(evals: &EvaluationMatrix, n: usize, weak: bool) -> Result<McEraSetup> {
    let z_hat = class_stats(evals).z_hat;
    let evals = if z_hat > 0.0 { evals.scaled(1.0 / (2.0 * z_hat))? } else { evals.clone() };
    let s = class_stats(&evals);
    let nm = (n * evals.m()) as f64;
    let (alpha, beta) = if weak { (2.0 * s.z_hat, 2.0 * nm * s.wvar_hat) } else { (1.0, nm * s.nu_hat) };
    Ok(McEraSetup { evals, alpha, beta })
}

/// Checks that `g(sigma) = n m MCERA` of the class rescaled to `z_hat <= 1/2`
/// is `(1, n m nu_hat)`-self-bounding (`weak = false`) or weakly
/// `(2 z_hat, 2 n m wvar_hat)`-self-bounding (`weak = true`) over all
/// `n x m` sign matrices.
pub fn verify_selfbounding_mcera(
    evals: &EvaluationMatrix,
    n: usize,
    weak: bool,
    opts: VerifyOptions,
) -> Result<SelfBoundingReport> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let setup = mcera_setup(evals, n, weak)?;
    let m = evals.m();
    let nm = n * m;
    let empty = SelfBoundingReport::empty(setup.alpha, setup.beta, weak);
    let check_signs = |signs: &[i8], report: &mut SelfBoundingReport| {
        let mut acc = vec![0.0; setup.evals.k()];
        let mut decs = Vec::with_capacity(nm);
        let g = mcera_decrements(&setup.evals, signs, n, &mut acc, &mut decs);
        report.observe(g, &decs);
    };

    if nm <= SIGN_ENUMERATION_MAX {
        let report = sweep(1u64 << nm, empty, |index, report| {
            let signs: Vec<i8> = (0..nm).map(|bit| if index >> bit & 1 == 1 { -1 } else { 1 }).collect();
            check_signs(&signs, report);
        });
        return Ok(report.finish(false));
    }
    let budget = opts.sampling.ok_or_else(|| {
        Error::Capacity(format!(
            "exhaustive check enumerates 2^(n m) = 2^{nm} sign matrices (limit n m <= {SIGN_ENUMERATION_MAX}); \
             give a sampling budget to check random sign matrices instead"
        ))
    })?;
    let report = sweep(budget.count, empty, |t, report| {
        let sigma = SignMatrix::generate(budget.seed.wrapping_add(t), n, m).expect("dimensions are positive");
        let signs: Vec<i8> = (0..n).flat_map(|j| sigma.row(j).to_vec()).collect();
        check_signs(&signs, report);
    });
    Ok(report.finish(true))
}

/// The same check at one sign matrix.
pub fn verify_selfbounding_mcera_at(evals: &EvaluationMatrix, sigma: &SignMatrix, weak: bool) -> Result<SelfBoundingReport> {
    if sigma.m() != evals.m() {
        return Err(Error::DimensionMismatch {
            evals_rows: evals.m(),
            evals_cols: evals.k(),
            sign_rows: sigma.n(),
            sign_cols: sigma.m(),
        });
    }
    let n = sigma.n();
    let setup = mcera_setup(evals, n, weak)?;
    let mut report = SelfBoundingReport::empty(setup.alpha, setup.beta, weak);
    let signs: Vec<i8> = (0..n).flat_map(|j| sigma.row(j).to_vec()).collect();
    let mut acc = vec![0.0; evals.k()];
    let mut decs = Vec::new();
    let g = mcera_decrements(&setup.evals, &signs, n, &mut acc, &mut decs);
    report.observe(g, &decs);
    Ok(report.finish(false))
}

/// `g(S) = sup_k sum_j d_k(s_j)` for a per-point contribution table `d`
/// (`|X|` rows of `K` values), with `g_i` the infimum over replacing `s_j` by
/// any domain point. Every sample-replacement check is of this form.
struct ContributionTable {
    rows: Vec<Vec<f64>>,
}

impl ContributionTable {
    fn evaluate(&self, sample: &[usize], acc: &mut [f64], decs: &mut Vec<f64>) -> f64 {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for &x in sample {
            for (a, d) in acc.iter_mut().zip(&self.rows[x]) {
                *a += d;
            }
        }
        let g = acc.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        decs.clear();
        for &x in sample {
            let inf = self
                .rows
                .iter()
                .map(|replacement| {
                    acc.iter()
                        .zip(&self.rows[x])
                        .zip(replacement)
                        .map(|((a, old), new)| a - old + new)
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .fold(f64::INFINITY, f64::min);
            decs.push(g - inf);
        }
        g
    }
}

fn run_sample_check(
    table: &ContributionTable,
    points: usize,
    configs: &Configurations,
    alpha: f64,
    beta_per_sample: f64,
    opts: VerifyOptions,
) -> Result<SelfBoundingReport> {
    let k = table.rows.first().map_or(0, Vec::len);
    match configs {
        Configurations::Single(sample) => {
            if sample.is_empty() || sample.iter().any(|&x| x >= points) {
                return Err(Error::invalid(format!("sample indices must lie in 0..{points} and be nonempty")));
            }
            let mut report = SelfBoundingReport::empty(alpha, beta_per_sample * sample.len() as f64, false);
            let (mut acc, mut decs) = (vec![0.0; k], Vec::new());
            let g = table.evaluate(sample, &mut acc, &mut decs);
            report.observe(g, &decs);
            Ok(report.finish(false))
        }
        &Configurations::Exhaustive(m) => {
            if m == 0 {
                return Err(Error::invalid("sample size must be at least 1"));
            }
            let empty = SelfBoundingReport::empty(alpha, beta_per_sample * m as f64, false);
            let check = |sample: &[usize], report: &mut SelfBoundingReport| {
                let (mut acc, mut decs) = (vec![0.0; k], Vec::with_capacity(m));
                let g = table.evaluate(sample, &mut acc, &mut decs);
                report.observe(g, &decs);
            };
            let enumerable = points <= SAMPLE_REPLACEMENT_MAX && m <= SAMPLE_REPLACEMENT_MAX;
            match (enumerable, check_sample_enumeration(points, m)) {
                (true, Ok(total)) => {
                    let report = sweep(total, empty, |mut index, report| {
                        let mut sample = vec![0usize; m];
                        for s in sample.iter_mut() {
                            *s = (index % points as u64) as usize;
                            index /= points as u64;
                        }
                        check(&sample, report);
                    });
                    Ok(report.finish(false))
                }
                _ => {
                    let budget = opts.sampling.ok_or_else(|| {
                        Error::Capacity(format!(
                            "exhaustive check over {points}^{m} samples exceeds the limits \
                             (|X| <= {SAMPLE_REPLACEMENT_MAX}, m <= {SAMPLE_REPLACEMENT_MAX}, |X|^m <= 2^20); \
                             give a sampling budget to check random samples instead"
                        ))
                    })?;
                    let pick = Uniform::new(0, points);
                    let report = sweep(budget.count, empty, |t, report| {
                        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
                        rng.set_stream(t);
                        let sample: Vec<usize> = (0..m).map(|_| pick.sample(&mut rng)).collect();
                        check(&sample, report);
                    });
                    Ok(report.finish(true))
                }
            }
        }
    }
}

/// Checks that `m SD` is `(1, m eta_F)`-self-bounding (positive side) or
/// `(1, m gamma_F)`-self-bounding (negative side), with expectations taken
/// exactly under the domain's distribution. Needs `c <= 1`.
pub fn verify_selfbounding_sd(
    domain: &FiniteDomain,
    configs: &Configurations,
    side: Side,
    opts: VerifyOptions,
) -> Result<SelfBoundingReport> {
    let evals = domain.evals();
    if evals.c() > 1.0 {
        return Err(Error::invalid(format!(
            "the supremum-deviation check needs c = b - a <= 1, got c = {}; rescale the class by 1/c",
            evals.c()
        )));
    }
    let means = domain.means();
    let rows = evals
        .rows()
        .map(|row| {
            row.iter()
                .zip(&means)
                .map(|(v, e)| match side {
                    Side::Pos => v - e,
                    Side::Neg => e - v,
                })
                .collect()
        })
        .collect();
    let gap = match side {
        Side::Pos => domain.eta(),
        Side::Neg => domain.gamma(),
    };
    run_sample_check(&ContributionTable { rows }, domain.size(), configs, 1.0, gap, opts)
}

/// Checks that `m wvar_hat` of the class rescaled by `1/z` is
/// `(1, 0)`-self-bounding.
pub fn verify_selfbounding_wvar(
    domain: &FiniteDomain,
    configs: &Configurations,
    opts: VerifyOptions,
) -> Result<SelfBoundingReport> {
    let z = domain.evals().z();
    let rows = domain.evals().rows().map(|row| row.iter().map(|v| (v / z) * (v / z)).collect()).collect();
    run_sample_check(&ContributionTable { rows }, domain.size(), configs, 1.0, 0.0, opts)
}

/// Checks that `m eta_hat / c` (positive side) or `m gamma_hat / c`
/// (negative side) is `(1, 0)`-self-bounding.
pub fn verify_selfbounding_mean_gap(
    domain: &FiniteDomain,
    configs: &Configurations,
    side: Side,
    opts: VerifyOptions,
) -> Result<SelfBoundingReport> {
    let evals = domain.evals();
    let (a, b, c) = (evals.a(), evals.b(), evals.c());
    let rows = evals
        .rows()
        .map(|row| {
            row.iter()
                .map(|v| match side {
                    Side::Pos => (v - a) / c,
                    Side::Neg => (b - v) / c,
                })
                .collect()
        })
        .collect();
    run_sample_check(&ContributionTable { rows }, domain.size(), configs, 1.0, 0.0, opts)
}

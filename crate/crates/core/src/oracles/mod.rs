//! Ground truth by brute force: the exact ERA by sign enumeration, exact
//! population quantities on finite domains, exhaustive checks of the
//! self-bounding properties, and coverage experiments for the bounds.

mod coverage;
mod self_bounding;

use rayon::prelude::*;

use crate::class_eval::{signed_row_sup, EvaluationMatrix};
use crate::error::{Error, Result};

pub use coverage::{coverage_experiment, CoverageReport, DomainSpec, GeneratorSpec};
pub use self_bounding::{
    verify_selfbounding_mcera, verify_selfbounding_mcera_at, verify_selfbounding_mean_gap,
    verify_selfbounding_sd, verify_selfbounding_wvar, Configurations, SamplingBudget, SelfBoundingReport,
    VerifyOptions,
};

/// Largest sample size [`era_exact`] enumerates.
pub const ERA_EXACT_MAX_M: usize = 20;

/// Largest number of ordered samples `|X|^m` enumerated for the Rademacher
/// complexity and for exhaustive sample-replacement checks.
pub const SAMPLE_ENUMERATION_LIMIT: u64 = 1 << 20;

const CHUNK: u64 = 1 << 12;

/// The exact ERA `2^-m sum_sigma sup_k (1/m) sum_i sigma_i f_k(s_i)`, by
/// enumerating every sign vector. Bit `i` of the enumeration index set means
/// `sigma_i = -1`.
pub fn era_exact(evals: &EvaluationMatrix) -> Result<f64> {
    let m = evals.m();
    if m > ERA_EXACT_MAX_M {
        return Err(Error::Capacity(format!(
            "exact ERA enumerates 2^m sign vectors; m = {m} would need 2^{m} suprema (limit m <= {ERA_EXACT_MAX_M})"
        )));
    }
    let total = 1u64 << m;
    let chunk_sum = |chunk: u64| {
        let mut acc = vec![0.0; evals.k()];
        let mut signs = vec![1i8; m];
        let end = ((chunk + 1) * CHUNK).min(total);
        let mut sum = 0.0;
        for index in chunk * CHUNK..end {
            for (i, s) in signs.iter_mut().enumerate() {
                *s = if index >> i & 1 == 1 { -1 } else { 1 };
            }
            sum += signed_row_sup(evals, &signs, &mut acc);
        }
        sum
    };
    let chunks = total.div_ceil(CHUNK);
    // fixed chunking keeps the summation order independent of the pool size
    let sums: Vec<f64> = (0..chunks).into_par_iter().map(chunk_sum).collect();
    Ok(sums.iter().sum::<f64>() / (total as f64 * m as f64))
}

/// A finite domain `X` with a probability vector `mu`: row `x` of `evals`
/// holds `f_k(x)` for every function of the class.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDomain {
    evals: EvaluationMatrix,
    mu: Vec<f64>,
}

impl FiniteDomain {
    pub fn new(evals: EvaluationMatrix, mu: Vec<f64>) -> Result<Self> {
        if mu.len() != evals.m() {
            return Err(Error::invalid(format!(
                "distribution has {} weights for a domain of {} points",
                mu.len(),
                evals.m()
            )));
        }
        if mu.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::invalid("distribution weights must be finite and nonnegative"));
        }
        let total: f64 = mu.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("distribution weights sum to {total}, expected 1")));
        }
        Ok(FiniteDomain { evals, mu })
    }

    pub fn uniform(evals: EvaluationMatrix) -> Self {
        let p = 1.0 / evals.m() as f64;
        let mu = vec![p; evals.m()];
        FiniteDomain { evals, mu }
    }

    pub fn evals(&self) -> &EvaluationMatrix {
        &self.evals
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Number of domain points `|X|`.
    pub fn size(&self) -> usize {
        self.evals.m()
    }

    fn expectation(&self, map: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.evals.k()];
        for (row, p) in self.evals.rows().zip(&self.mu) {
            for (o, v) in out.iter_mut().zip(row) {
                *o += p * map(*v);
            }
        }
        out
    }

    /// `E[f_k]` for every column.
    pub fn means(&self) -> Vec<f64> {
        self.expectation(|v| v)
    }

    /// Wimpy variance `sup_k E[f_k^2]`.
    pub fn wvar(&self) -> f64 {
        self.expectation(|v| v * v).into_iter().fold(0.0, f64::max)
    }

    /// `eta_F = sup_k E[f_k] - a`
    pub fn eta(&self) -> f64 {
        self.means().into_iter().fold(f64::NEG_INFINITY, f64::max) - self.evals.a()
    }

    /// `gamma_F = b - inf_k E[f_k]`
    pub fn gamma(&self) -> f64 {
        self.evals.b() - self.means().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `sup_k Var(f_k)`
    pub fn sup_variance(&self) -> f64 {
        let means = self.means();
        let second = self.expectation(|v| v * v);
        means
            .iter()
            .zip(&second)
            .map(|(m1, m2)| (m2 - m1 * m1).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Supremum deviation of the sample given by domain indices:
    /// `sup_k (mean_S f_k - E f_k)` for [`crate::bounds::Side::Pos`], the
    /// reverse difference for `Neg`.
    pub fn supremum_deviation(&self, sample: &[usize], side: crate::bounds::Side) -> f64 {
        let means = self.means();
        let m = sample.len() as f64;
        let mut sums = vec![0.0; self.evals.k()];
        for &x in sample {
            for (s, v) in sums.iter_mut().zip(self.evals.row(x)) {
                *s += v;
            }
        }
        sums.iter()
            .zip(&means)
            .map(|(s, e)| match side {
                crate::bounds::Side::Pos => s / m - e,
                crate::bounds::Side::Neg => e - s / m,
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The Rademacher complexity `E_S[ERA(S)]` over i.i.d. samples of size
    /// `m`. Every multiset of domain points is enumerated once with its
    /// multinomial probability, which equals averaging over all `|X|^m`
    /// ordered samples.
    pub fn rademacher_complexity(&self, m: usize) -> Result<f64> {
        check_sample_enumeration(self.size(), m)?;
        if m > ERA_EXACT_MAX_M {
            return Err(Error::Capacity(format!("m = {m} exceeds the exact ERA limit {ERA_EXACT_MAX_M}")));
        }
        let log_fact: Vec<f64> = (0..=m).scan(0.0, |acc, i| {
            if i > 0 {
                *acc += (i as f64).ln();
            }
            Some(*acc)
        }).collect();
        let mut multisets = Vec::new();
        let mut counts = vec![0usize; self.size()];
        collect_multisets(&mut counts, 0, m, &mut multisets);
        let terms: Vec<Result<f64>> = multisets
            .par_iter()
            .map(|counts| {
                let mut log_p = log_fact[m];
                let mut rows = Vec::with_capacity(m);
                for (x, &c) in counts.iter().enumerate() {
                    if c > 0 {
                        if self.mu[x] == 0.0 {
                            return Ok(0.0);
                        }
                        log_p += c as f64 * self.mu[x].ln() - log_fact[c];
                        rows.extend(std::iter::repeat(x).take(c));
                    }
                }
                Ok(log_p.exp() * era_exact(&self.evals.select_rows(&rows)?)?)
            })
            .collect();
        let mut total = 0.0;
        for t in terms {
            total += t?;
        }
        Ok(total)
    }
}

fn collect_multisets(counts: &mut Vec<usize>, pos: usize, left: usize, out: &mut Vec<Vec<usize>>) {
    if pos + 1 == counts.len() {
        counts[pos] = left;
        out.push(counts.clone());
        return;
    }
    for c in (0..=left).rev() {
        counts[pos] = c;
        collect_multisets(counts, pos + 1, left - c, out);
    }
    counts[pos] = 0;
}

/// `|X|^m` if it is at most [`SAMPLE_ENUMERATION_LIMIT`].
pub(crate) fn check_sample_enumeration(points: usize, m: usize) -> Result<u64> {
    let mut total: u64 = 1;
    for _ in 0..m {
        total = total.saturating_mul(points as u64);
        if total > SAMPLE_ENUMERATION_LIMIT {
            return Err(Error::Capacity(format!(
                "enumerating all samples needs |X|^m = {points}^{m} > 2^20 configurations"
            )));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::Side;
    use crate::class_eval::{mcera, SignMatrix};
    use approx::assert_relative_eq;

    #[test]
    fn era_exact_small_cases() {
        let zero = EvaluationMatrix::new(vec![vec![0.0]; 3], 0.0, 1.0).unwrap();
        assert_eq!(era_exact(&zero).unwrap(), 0.0);
        let ones = EvaluationMatrix::new(vec![vec![1.0], vec![1.0]], 0.0, 1.0).unwrap();
        assert_eq!(era_exact(&ones).unwrap(), 0.25);
        let big = EvaluationMatrix::new(vec![vec![1.0]; 21], 0.0, 1.0).unwrap();
        let err = era_exact(&big).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
        assert!(err.to_string().contains("2^21"));
    }

    #[test]
    fn era_exact_is_mean_of_all_mceras() {
        let e = EvaluationMatrix::new(
            vec![vec![0.3, -0.2, 1.0], vec![-0.5, 0.7, 0.1], vec![0.9, 0.0, -0.4]],
            -1.0,
            1.0,
        )
        .unwrap();
        let (n, m) = (2, 3);
        let total = 1u64 << (n * m);
        let mean: f64 = (0..total)
            .map(|i| mcera(&e, &SignMatrix::from_index(i, n, m).unwrap()).unwrap())
            .sum::<f64>()
            / total as f64;
        assert_relative_eq!(mean, era_exact(&e).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn domain_quantities() {
        let e = EvaluationMatrix::new(vec![vec![1.0], vec![0.0]], 0.0, 1.0).unwrap();
        let d = FiniteDomain::uniform(e);
        assert_eq!(d.means(), vec![0.5, 0.0]);
        assert_eq!(d.eta(), 0.5);
        assert_eq!(d.gamma(), 1.0);
        assert_eq!(d.wvar(), 0.5);
        assert_eq!(d.sup_variance(), 0.25);
        assert_eq!(d.supremum_deviation(&[0, 0, 1], Side::Pos), 2.0 / 3.0 - 0.5);
        assert_eq!(d.supremum_deviation(&[1, 1, 1], Side::Neg), 0.5);
        assert!(FiniteDomain::new(d.evals().clone(), vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn rademacher_complexity_matches_ordered_enumeration() {
        let e = EvaluationMatrix::new(vec![vec![1.0, 0.2], vec![0.0, 0.9], vec![0.4, 0.4]], 0.0, 1.0).unwrap();
        let d = FiniteDomain::new(e.clone(), vec![0.2, 0.3, 0.5]).unwrap();
        let m = 3;
        let mut expected = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let p = d.mu()[a] * d.mu()[b] * d.mu()[c];
                    expected += p * era_exact(&e.select_rows(&[a, b, c]).unwrap()).unwrap();
                }
            }
        }
        assert_relative_eq!(d.rademacher_complexity(m).unwrap(), expected, max_relative = 1e-12);
        assert!(matches!(d.rademacher_complexity(13), Err(Error::Capacity(_))));
    }
}

//! Function classes evaluated on a sample, Rademacher sign matrices, and the
//! empirical statistics every bound consumes.
//!
//! The artifact never sees the functions themselves: a class `F` restricted to
//! a sample `S = (s_1, .., s_m)` is the `m x K` table `f_k(s_i)` together with
//! the declared codomain `[a, b]`. The constant-zero function is always part of
//! the class, so every supremum computed here is nonnegative.

mod loader;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Rows above this many multiply-adds are spread over the rayon pool.
const PARALLEL_WORK: usize = 1 << 16;

/// The values `f_k(s_i)` of a finite function class on a sample, with the
/// declared range `[a, b]`. Row `i` is sample point `s_i`, column `k` is `f_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationMatrix {
    values: Vec<f64>,
    m: usize,
    k: usize,
    a: f64,
    b: f64,
    names: Option<Vec<String>>,
    zero_column_inserted: bool,
}

impl EvaluationMatrix {
    /// Builds a matrix from sample rows. Appends the constant-zero column when
    /// no all-zero column is present.
    pub fn new(rows: Vec<Vec<f64>>, a: f64, b: f64) -> Result<Self> {
        Self::build(rows, a, b, None)
    }

    /// Same as [`EvaluationMatrix::new`] with one name per column.
    pub fn with_names(rows: Vec<Vec<f64>>, a: f64, b: f64, names: Vec<String>) -> Result<Self> {
        Self::build(rows, a, b, Some(names))
    }

    fn build(rows: Vec<Vec<f64>>, a: f64, b: f64, names: Option<Vec<String>>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || !(b > 0.0 && a <= 0.0) {
            return Err(Error::invalid(format!(
                "declared range [{a}, {b}] must satisfy b > 0 >= a"
            )));
        }
        let m = rows.len();
        if m == 0 {
            return Err(Error::invalid("evaluation matrix needs at least one sample row"));
        }
        let k = rows[0].len();
        if k == 0 {
            return Err(Error::invalid("evaluation matrix needs at least one function column"));
        }
        if let Some(names) = &names {
            if names.len() != k {
                return Err(Error::invalid(format!(
                    "{} column names given for {k} columns",
                    names.len()
                )));
            }
        }
        let mut values = Vec::with_capacity(m * (k + 1));
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::invalid(format!(
                    "row {i} has {} values, expected {k}",
                    row.len()
                )));
            }
            for (col, &v) in row.iter().enumerate() {
                if !(v >= a && v <= b) {
                    return Err(Error::OutOfRange { row: i, column: col, value: v, a, b });
                }
                values.push(v);
            }
        }

        let has_zero = (0..k).any(|col| (0..m).all(|i| values[i * k + col] == 0.0));
        let mut matrix = EvaluationMatrix {
            values,
            m,
            k,
            a,
            b,
            names,
            zero_column_inserted: false,
        };
        if !has_zero {
            matrix.append_zero_column();
        }
        Ok(matrix)
    }

    fn append_zero_column(&mut self) {
        let k = self.k;
        let mut values = Vec::with_capacity(self.m * (k + 1));
        for row in self.values.chunks_exact(k) {
            values.extend_from_slice(row);
            values.push(0.0);
        }
        self.values = values;
        self.k = k + 1;
        if let Some(names) = &mut self.names {
            names.push("f0".to_string());
        }
        self.zero_column_inserted = true;
    }

    /// Number of sample rows.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of functions, including the constant-zero one.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Range width `c = b - a`.
    pub fn c(&self) -> f64 {
        self.b - self.a
    }

    /// Declared magnitude bound `z = max(|a|, |b|)`.
    pub fn z(&self) -> f64 {
        self.a.abs().max(self.b.abs())
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Whether the loader had to append the constant-zero function.
    pub fn zero_column_inserted(&self) -> bool {
        self.zero_column_inserted
    }

    pub fn value(&self, row: usize, column: usize) -> f64 {
        self.values[row * self.k + column]
    }

    /// Values of every function at sample `row`.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.k..(row + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.k)
    }

    /// Multiplies every value and the declared range by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::invalid(format!("scale factor must be positive, got {factor}")));
        }
        Ok(EvaluationMatrix {
            values: self.values.iter().map(|v| v * factor).collect(),
            a: self.a * factor,
            b: self.b * factor,
            ..self.clone()
        })
    }

    /// The class `{-f : f in F}` on range `[-b, -a]`. Needs `a < 0` so the
    /// negated range keeps its positive upper end.
    pub fn negated(&self) -> Result<Self> {
        if !(self.a < 0.0) {
            return Err(Error::invalid(format!(
                "negating a class on [{}, {}] leaves no positive upper range bound",
                self.a, self.b
            )));
        }
        Ok(EvaluationMatrix {
            values: self.values.iter().map(|v| -v).collect(),
            a: -self.b,
            b: -self.a,
            ..self.clone()
        })
    }

    /// A new matrix whose rows are the given rows of `self`, in order and with
    /// repetition. Used to draw samples from a finite domain.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("a sample needs at least one row"));
        }
        let mut values = Vec::with_capacity(rows.len() * self.k);
        for &r in rows {
            if r >= self.m {
                return Err(Error::invalid(format!("row index {r} out of {}", self.m)));
            }
            values.extend_from_slice(self.row(r));
        }
        Ok(EvaluationMatrix {
            values,
            m: rows.len(),
            ..self.clone()
        })
    }
}

/// An `n x m` matrix of Rademacher signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    signs: Vec<i8>,
    n: usize,
    m: usize,
    seed: Option<u64>,
}

impl SignMatrix {
    /// Wraps explicit sign rows; every entry must be `-1` or `+1`.
    pub fn from_rows(rows: Vec<Vec<i8>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("sign matrix needs at least one row"));
        }
        let m = rows[0].len();
        if m == 0 {
            return Err(Error::invalid("sign matrix needs at least one column"));
        }
        let mut signs = Vec::with_capacity(n * m);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::invalid(format!("sign row {j} has {} entries, expected {m}", row.len())));
            }
            for (i, &s) in row.iter().enumerate() {
                if s != 1 && s != -1 {
                    return Err(Error::invalid(format!("sign at ({j}, {i}) is {s}, expected +1 or -1")));
                }
                signs.push(s);
            }
        }
        Ok(SignMatrix { signs, n, m, seed: None })
    }

    /// Generates signs from `seed`. Entry `(j, i)` depends only on
    /// `(seed, j, i)`: row `j` selects the ChaCha stream and column `i` the
    /// word position, so any submatrix is reproducible on its own.
    pub fn generate(seed: u64, n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::invalid(format!("sign matrix dimensions must be positive, got {n} x {m}")));
        }
        let mut signs = Vec::with_capacity(n * m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for j in 0..n {
            rng.set_stream(j as u64);
            rng.set_word_pos(0);
            signs.extend((0..m).map(|_| if rng.next_u32() & 1 == 0 { 1 } else { -1 }));
        }
        Ok(SignMatrix { signs, n, m, seed: Some(seed) })
    }

    /// The `index`-th matrix of the `2^(n m)` enumeration: bit `j*m + i` of
    /// `index` set means `sigma[j][i] = -1`.
    pub fn from_index(index: u64, n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 || n * m > 63 {
            return Err(Error::invalid(format!("cannot index a {n} x {m} sign matrix")));
        }
        let signs = (0..n * m)
            .map(|bit| if index >> bit & 1 == 1 { -1 } else { 1 })
            .collect();
        Ok(SignMatrix { signs, n, m, seed: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn get(&self, row: usize, column: usize) -> i8 {
        self.signs[row * self.m + column]
    }

    pub fn row(&self, row: usize) -> &[i8] {
        &self.signs[row * self.m..(row + 1) * self.m]
    }
}

/// Empirical quantities of a class on a sample, plus the declared range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassStats {
    /// `max_{i,k} |f_k(s_i)|`
    pub z_hat: f64,
    /// `sup_k (1/m) sum_i |f_k(s_i)|`
    pub nu_hat: f64,
    /// Empirical wimpy variance `sup_k (1/m) sum_i f_k(s_i)^2`.
    pub wvar_hat: f64,
    /// `sup_k mean_k - a`
    pub eta_hat: f64,
    /// `b - inf_k mean_k`
    pub gamma_hat: f64,
    pub m: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

/// Supremum of the signed column sums `sum_i signs[i] f_k(s_i)` over `k`.
pub(crate) fn signed_row_sup(evals: &EvaluationMatrix, signs: &[i8], acc: &mut [f64]) -> f64 {
    acc.iter_mut().for_each(|v| *v = 0.0);
    for (row, &s) in evals.rows().zip(signs) {
        let s = f64::from(s);
        for (a, v) in acc.iter_mut().zip(row) {
            *a += s * v;
        }
    }
    acc.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// The n-Monte Carlo Empirical Rademacher Average
/// `(1/n) sum_j sup_k (1/m) sum_i sigma_{j,i} f_k(s_i)`.
pub fn mcera(evals: &EvaluationMatrix, sigma: &SignMatrix) -> Result<f64> {
    if sigma.m() != evals.m() {
        return Err(Error::DimensionMismatch {
            evals_rows: evals.m(),
            evals_cols: evals.k(),
            sign_rows: sigma.n(),
            sign_cols: sigma.m(),
        });
    }
    let m = evals.m() as f64;
    let row_sup = |j: usize| {
        let mut acc = vec![0.0; evals.k()];
        signed_row_sup(evals, sigma.row(j), &mut acc) / m
    };
    let sups: Vec<f64> = if sigma.n() * evals.m() * evals.k() >= PARALLEL_WORK {
        (0..sigma.n()).into_par_iter().map(row_sup).collect()
    } else {
        (0..sigma.n()).map(row_sup).collect()
    };
    Ok(sups.iter().sum::<f64>() / sigma.n() as f64)
}

/// Computes every empirical statistic in one pass over the matrix.
pub fn class_stats(evals: &EvaluationMatrix) -> ClassStats {
    let k = evals.k();
    let mut sum = vec![0.0; k];
    let mut sum_abs = vec![0.0; k];
    let mut sum_sq = vec![0.0; k];
    let mut z_hat: f64 = 0.0;
    for row in evals.rows() {
        for (col, &v) in row.iter().enumerate() {
            sum[col] += v;
            sum_abs[col] += v.abs();
            sum_sq[col] += v * v;
            z_hat = z_hat.max(v.abs());
        }
    }
    let m = evals.m() as f64;
    let max = |xs: &[f64]| xs.iter().copied().fold(f64::NEG_INFINITY, f64::max) / m;
    let min = |xs: &[f64]| xs.iter().copied().fold(f64::INFINITY, f64::min) / m;
    ClassStats {
        z_hat,
        nu_hat: max(&sum_abs),
        wvar_hat: max(&sum_sq),
        eta_hat: max(&sum) - evals.a(),
        gamma_hat: evals.b() - min(&sum),
        m: evals.m(),
        k,
        a: evals.a(),
        b: evals.b(),
        c: evals.c(),
        z: evals.z(),
    }
}

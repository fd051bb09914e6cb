//! Rate estimation from count data.
//!
//! Off-diagonal coupling rates come straight from Pearson correlation
//! (clamped at zero: the shared-latent model has no notion of negative
//! coupling), and base rates from subtracting each row's couplings from the
//! unit diagonal. Correlation rather than covariance keeps every rate in
//! [0, 1], the regime where the joint-entropy approximation is accurate.

use crate::counts::CountMatrix;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

/// Directions whose residual norm drops below this fraction of the original
/// are treated as linearly dependent and dropped.
const DEPENDENT_TOL: f64 = 1e-9;

/// Symmetric nonnegative matrix of Poisson rates: diagonal entries are base
/// rates, off-diagonal entries coupling rates.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    inner: SquareMatrix,
}

impl RateMatrix {
    /// Build from an entry function; the result is symmetrized from the
    /// upper triangle and validated to be nonnegative and finite.
    pub fn from_entries(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut inner = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidRate(v));
                }
                inner.set(i, j, v);
                inner.set(j, i, v);
            }
        }
        Ok(Self { inner })
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner.get(i, j)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Centered copy of a count row.
fn centered(row: &[u64]) -> Vec<f64> {
    let xs: Vec<f64> = row.iter().map(|&c| c as f64).collect();
    let m = mean(&xs);
    xs.into_iter().map(|x| x - m).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Pearson correlation of two centered vectors; zero variance on either side
/// yields 0.
fn corr_centered(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot(a, b) / (na * nb)).clamp(-1.0, 1.0)
}

/// Pearson correlation matrix of the count rows.
///
/// Zero-variance rows produce 0 off the diagonal; the diagonal is exactly 1.
pub fn correlation(counts: &CountMatrix) -> Result<SquareMatrix> {
    if counts.n_samples() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: counts.n_samples(),
        });
    }
    let n = counts.n_vars();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| centered(counts.row(i))).collect();
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        m.set(i, i, 1.0);
        for j in i + 1..n {
            let r = corr_centered(&rows[i], &rows[j]);
            m.set(i, j, r);
            m.set(j, i, r);
        }
    }
    Ok(m)
}

/// Estimate the full rate matrix from counts: couplings are clamped
/// correlations, base rates the unit diagonal minus each row's couplings
/// (clamped at zero).
pub fn estimate_rate_matrix(counts: &CountMatrix) -> Result<RateMatrix> {
    let corr = correlation(counts)?;
    let n = corr.n();
    RateMatrix::from_entries(n, |i, j| {
        if i != j {
            corr.get(i, j).max(0.0)
        } else {
            let coupling_sum: f64 = (0..n)
                .filter(|&k| k != i)
                .map(|k| corr.get(i, k).max(0.0))
                .sum();
            (1.0 - coupling_sum).max(0.0)
        }
    })
}

/// Partial correlation of two f64 rows given condition rows, by correlating
/// the residuals after projecting out an orthonormal basis of the condition
/// span. Near-dependent condition directions are dropped, which handles rank
/// deficiency without failing. Degenerate residual variance yields 0.
pub fn partial_correlation_rows(x: &[f64], y: &[f64], condition: &[&[f64]]) -> f64 {
    let t = x.len();
    let center = |v: &[f64]| {
        let m = mean(v);
        v.iter().map(|a| a - m).collect::<Vec<f64>>()
    };
    let mut xc = center(x);
    let mut yc = center(y);

    // modified Gram-Schmidt over the centered condition rows
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(condition.len());
    for &s in condition {
        let mut z = center(s);
        let orig = norm(&z);
        if orig == 0.0 {
            continue;
        }
        for q in &basis {
            let c = dot(&z, q);
            for (zi, qi) in z.iter_mut().zip(q) {
                *zi -= c * qi;
            }
        }
        let nz = norm(&z);
        if nz > DEPENDENT_TOL * orig {
            for zi in z.iter_mut() {
                *zi /= nz;
            }
            basis.push(z);
        }
    }
    debug_assert!(basis.len() <= t);

    for q in &basis {
        let cx = dot(&xc, q);
        let cy = dot(&yc, q);
        for i in 0..t {
            xc[i] -= cx * q[i];
            yc[i] -= cy * q[i];
        }
    }
    corr_centered(&xc, &yc)
}

fn validate_pair(x: usize, y: usize, condition: &[usize], counts: &CountMatrix) -> Result<()> {
    let n = counts.n_vars();
    for &i in [x, y].iter().chain(condition) {
        if i >= n {
            return Err(Error::VariableOutOfRange { index: i, n });
        }
    }
    if x == y || condition.contains(&x) || condition.contains(&y) {
        return Err(Error::ConditionSetOverlap { x, y });
    }
    let needed = if condition.is_empty() {
        2
    } else {
        condition.len() + 3
    };
    if counts.n_samples() < needed {
        return Err(Error::TooFewSamples {
            needed,
            got: counts.n_samples(),
        });
    }
    Ok(())
}

/// Partial correlation of count rows x and y given the condition set.
/// An empty condition set reduces to plain Pearson correlation.
pub fn partial_correlation(
    x: usize,
    y: usize,
    condition: &[usize],
    counts: &CountMatrix,
) -> Result<f64> {
    validate_pair(x, y, condition, counts)?;
    let xr: Vec<f64> = counts.row(x).iter().map(|&c| c as f64).collect();
    let yr: Vec<f64> = counts.row(y).iter().map(|&c| c as f64).collect();
    let cond: Vec<Vec<f64>> = condition
        .iter()
        .map(|&s| counts.row(s).iter().map(|&c| c as f64).collect())
        .collect();
    let cond_refs: Vec<&[f64]> = cond.iter().map(|v| v.as_slice()).collect();
    Ok(partial_correlation_rows(&xr, &yr, &cond_refs))
}

/// Conditional coupling rate: partial correlation clamped at zero.
pub fn conditional_rate(
    x: usize,
    y: usize,
    condition: &[usize],
    counts: &CountMatrix,
) -> Result<f64> {
    Ok(partial_correlation(x, y, condition, counts)?.max(0.0))
}

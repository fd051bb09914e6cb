//! Minimal dense symmetric-matrix helpers for the Gaussian baseline.
//!
//! The matrices here are tiny (a pair of variables plus a condition set), so
//! a plain row-major buffer and an unblocked Cholesky are all that is needed.

use crate::error::{Error, Result};

/// Diagonal jitter added when a required principal minor is singular.
pub const CHOLESKY_JITTER: f64 = 1e-9;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Principal submatrix on the given indices, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> SquareMatrix {
        SquareMatrix::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }
}

/// log(det M) of a symmetric positive definite matrix via Cholesky.
///
/// On failure, retries once with `CHOLESKY_JITTER` added to the diagonal;
/// a second failure is reported as `SingularMatrix`. The empty matrix has
/// log-det 0 by convention.
pub fn cholesky_logdet(m: &SquareMatrix) -> Result<f64> {
    if m.n() == 0 {
        return Ok(0.0);
    }
    match try_logdet(m, 0.0) {
        Some(v) => Ok(v),
        None => try_logdet(m, CHOLESKY_JITTER).ok_or(Error::SingularMatrix),
    }
}

fn try_logdet(m: &SquareMatrix, jitter: f64) -> Option<f64> {
    let n = m.n();
    let mut l = vec![0.0f64; n * n];
    let mut logdet = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let mut s = m.get(i, j);
            if i == j {
                s += jitter;
            }
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !s.is_finite() || s <= 0.0 {
                    return None;
                }
                let d = s.sqrt();
                l[i * n + i] = d;
                logdet += 2.0 * d.ln();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(logdet)
}

//! Exact (truncated-series) and approximate entropies for Poisson variables,
//! plus the Gaussian closed-form baseline.
//!
//! All entropies are in nats. The exact bivariate joint entropy evaluates the
//! full double series and is deliberately slow; it exists as the accuracy
//! oracle for the cheap approximation
//! `H(X_1..X_n) ~ sum_i H(X_i) + sum_{j>i} lambda_ij`,
//! which is what the inference engine runs on. The approximation is accurate
//! when every coupling rate is small relative to the product of the base
//! rates, which correlation-based rate estimation guarantees by keeping all
//! rates in [0, 1].

use crate::counts::CountMatrix;
use crate::error::{Error, Result};
use crate::linalg::{cholesky_logdet, SquareMatrix};
use crate::rates::{self, RateMatrix};

/// Truncation rule for the entropy series: stop once the cumulative Poisson
/// pmf mass reaches `1 - tail_mass`, or after `max_terms` terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    tail_mass: f64,
    max_terms: usize,
}

impl TruncationPolicy {
    pub fn new(tail_mass: f64, max_terms: usize) -> Result<Self> {
        if !(tail_mass > 0.0 && tail_mass < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail_mass must be in (0,1), got {tail_mass}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::InvalidArgument("max_terms must be >= 1".into()));
        }
        Ok(Self {
            tail_mass,
            max_terms,
        })
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_mass: 1e-12,
            max_terms: 1_000_000,
        }
    }
}

fn validate_rate(rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::InvalidRate(rate));
    }
    Ok(rate)
}

/// Entropy of Poisson(rate) in nats:
/// `lambda - lambda ln lambda + sum_k pmf(k) ln(k!)`.
///
/// A point mass (rate 0) has zero entropy.
pub fn poisson_entropy(rate: f64, policy: &TruncationPolicy) -> Result<f64> {
    let lambda = validate_rate(rate)?;
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let ln_lambda = lambda.ln();
    let mut ln_fact = 0.0; // ln(k!)
    let mut mass = 0.0;
    let mut series = 0.0;
    let mut k = 0usize;
    while mass < 1.0 - policy.tail_mass && k < policy.max_terms {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let pmf = (k as f64 * ln_lambda - lambda - ln_fact).exp();
        mass += pmf;
        series += pmf * ln_fact;
        k += 1;
    }
    Ok(lambda - lambda * ln_lambda + series)
}

/// Number of pmf terms (support points 0..len) the policy keeps for
/// Poisson(rate).
pub(crate) fn poisson_support_len(rate: f64, policy: &TruncationPolicy) -> usize {
    if rate == 0.0 {
        return 1;
    }
    let ln_lambda = rate.ln();
    let mut ln_fact = 0.0;
    let mut mass = 0.0;
    let mut k = 0usize;
    while mass < 1.0 - policy.tail_mass && k < policy.max_terms {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        mass += (k as f64 * ln_lambda - rate - ln_fact).exp();
        k += 1;
    }
    k
}

/// Exact joint entropy of the bivariate Poisson, by direct evaluation of the
/// double series with the inner combinatorial factor
/// `D(x1,x2) = sum_a x1!/(x1-a)! * x2!/((x2-a)! a!) * d12^a`,
/// `d12 = lambda12 / (lambda11 lambda22)`.
///
/// Each index is truncated where the corresponding true marginal
/// (`Poisson(lambda_ii + lambda_12)`) reaches `1 - tail_mass` of its mass.
/// All factorial and power terms are accumulated in the log domain, so the
/// result stays finite for rates up to at least 50.
///
/// This is the brute-force accuracy oracle for [`joint_entropy_approx`].
pub fn bivariate_joint_entropy_exact(
    lambda11: f64,
    lambda22: f64,
    lambda12: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let l11 = validate_rate(lambda11)?;
    let l22 = validate_rate(lambda22)?;
    let l12 = validate_rate(lambda12)?;
    if l12 > 0.0 && l11 * l22 == 0.0 {
        return Err(Error::UndefinedCoupling {
            coupling: l12,
            base1: l11,
            base2: l22,
        });
    }

    let k1 = poisson_support_len(l11 + l12, policy);
    let k2 = poisson_support_len(l22 + l12, policy);
    let kmax = k1.max(k2);
    let mut ln_fact = vec![0.0f64; kmax];
    for k in 1..kmax {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }

    let ln_d12 = if l12 > 0.0 {
        (l12 / (l11 * l22)).ln()
    } else {
        0.0
    };
    let const_term = -(l11 + l22 + l12);
    let ln_l11 = if l11 > 0.0 { l11.ln() } else { 0.0 };
    let ln_l22 = if l22 > 0.0 { l22.ln() } else { 0.0 };

    let mut entropy = 0.0;
    let mut term_buf: Vec<f64> = Vec::with_capacity(kmax);
    for x1 in 0..k1 {
        for x2 in 0..k2 {
            // ln D(x1,x2) via log-sum-exp over the shared-count index a
            let ln_d = if l12 == 0.0 {
                0.0
            } else {
                term_buf.clear();
                let amax = x1.min(x2);
                let mut peak = f64::NEG_INFINITY;
                for a in 0..=amax {
                    let t =
                        ln_fact[x1] - ln_fact[x1 - a] + ln_fact[x2] - ln_fact[x2 - a] - ln_fact[a]
                            + a as f64 * ln_d12;
                    term_buf.push(t);
                    peak = peak.max(t);
                }
                peak + term_buf.iter().map(|t| (t - peak).exp()).sum::<f64>().ln()
            };
            let mut ln_p = const_term + ln_d;
            if x1 > 0 {
                ln_p += x1 as f64 * ln_l11 - ln_fact[x1];
            }
            if x2 > 0 {
                ln_p += x2 as f64 * ln_l22 - ln_fact[x2];
            }
            let p = ln_p.exp();
            if p > 0.0 {
                entropy -= p * ln_p;
            }
        }
    }
    Ok(entropy)
}

/// Joint entropy approximation over an index subset of a rate matrix:
/// `sum_i H(lambda_ii) + sum_{j>i} lambda_ij`.
pub fn joint_entropy_approx(
    rates: &RateMatrix,
    subset: &[usize],
    policy: &TruncationPolicy,
) -> Result<f64> {
    let n = rates.n();
    for (pos, &i) in subset.iter().enumerate() {
        if i >= n {
            return Err(Error::VariableOutOfRange { index: i, n });
        }
        if subset[..pos].contains(&i) {
            return Err(Error::InvalidArgument(format!(
                "duplicate index {i} in subset"
            )));
        }
    }
    let mut h = 0.0;
    for (pos, &i) in subset.iter().enumerate() {
        h += poisson_entropy(rates.get(i, i), policy)?;
        for &j in &subset[pos + 1..] {
            h += rates.get(i, j);
        }
    }
    Ok(h)
}

/// Mutual information of a coupled Poisson pair using the correct (hatted)
/// marginals `Poisson(lambda_ii + lambda_12)` together with the joint-entropy
/// approximation:
/// `I = H(l11 + l12) + H(l22 + l12) - [H(l11) + H(l22) + l12]`.
///
/// Using the naive marginals `Poisson(lambda_ii)` instead would make the
/// estimate collapse to `-lambda_12`, which is negative whenever the pair is
/// coupled at all.
pub fn mutual_information_poisson(
    lambda11: f64,
    lambda22: f64,
    lambda12: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let l11 = validate_rate(lambda11)?;
    let l22 = validate_rate(lambda22)?;
    let l12 = validate_rate(lambda12)?;
    let h1_hat = poisson_entropy(l11 + l12, policy)?;
    let h2_hat = poisson_entropy(l22 + l12, policy)?;
    let h1 = poisson_entropy(l11, policy)?;
    let h2 = poisson_entropy(l22, policy)?;
    Ok(h1_hat + h2_hat - (h1 + h2 + l12))
}

/// Conditional mutual information `I(X, Y | S)` for count rows, with every
/// joint term expanded by the joint-entropy approximation.
///
/// Under that expansion the condition set survives only through the
/// conditional coupling rate `lambda_xy|S` (partial correlation clamped at
/// zero, see [`rates::conditional_rate`]), and the CMI reduces to the pair
/// formula evaluated at the pairwise rates
/// `lambda_xx = lambda_yy = 1 - lambda_xy|S`.
///
/// With an empty condition set this is exactly [`mutual_information_poisson`]
/// on the rates estimated from the pair, through the same code path. A
/// zero-variance variable yields 0.
pub fn conditional_mutual_information_poisson(
    x: usize,
    y: usize,
    condition: &[usize],
    counts: &CountMatrix,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let coupling = rates::conditional_rate(x, y, condition, counts)?;
    let base = 1.0 - coupling;
    mutual_information_poisson(base, base, coupling, policy)
}

/// Differential entropy of a k-variate Gaussian: `0.5 ln((2 pi e)^k det S)`.
///
/// A singular covariance is retried once with diagonal jitter 1e-9.
pub fn gaussian_entropy(covariance: &SquareMatrix) -> Result<f64> {
    let k = covariance.n() as f64;
    let logdet = cholesky_logdet(covariance)?;
    Ok(0.5 * (k * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() + logdet))
}

/// Gaussian conditional mutual information via the four-term log-det
/// identity:
/// `I(X,Y|S) = 0.5 [ln det S_xS + ln det S_yS - ln det S_xyS - ln det S_S]`.
///
/// Singular minors are retried once with diagonal jitter 1e-9, then error.
pub fn gaussian_cmi(
    x: usize,
    y: usize,
    condition: &[usize],
    covariance: &SquareMatrix,
) -> Result<f64> {
    let n = covariance.n();
    for &i in [x, y].iter().chain(condition) {
        if i >= n {
            return Err(Error::VariableOutOfRange { index: i, n });
        }
    }
    if x == y || condition.contains(&x) || condition.contains(&y) {
        return Err(Error::ConditionSetOverlap { x, y });
    }
    let mut xs = vec![x];
    xs.extend_from_slice(condition);
    let mut ys = vec![y];
    ys.extend_from_slice(condition);
    let mut xys = vec![x, y];
    xys.extend_from_slice(condition);

    let ld_xs = cholesky_logdet(&covariance.submatrix(&xs))?;
    let ld_ys = cholesky_logdet(&covariance.submatrix(&ys))?;
    let ld_xys = cholesky_logdet(&covariance.submatrix(&xys))?;
    let ld_s = cholesky_logdet(&covariance.submatrix(condition))?;
    Ok(0.5 * (ld_xs + ld_ys - ld_xys - ld_s))
}

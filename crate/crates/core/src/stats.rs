//! Distribution utilities: goodness-of-fit screening, negative binomial,
//! box-cox, and seeded permutation machinery.
//!
//! All randomness flows through ChaCha8, seeded explicitly; identical seeds
//! give identical streams on every platform.

use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use statrs::function::gamma::ln_gamma;

/// The fixed generator used throughout.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fold arbitrary key parts into a derived seed.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut s = splitmix64(seed);
    for &p in parts {
        s = splitmix64(s ^ p);
    }
    s
}

/// Deterministic sub-generator keyed by a seed and arbitrary parts
/// (worker index, variable pair, phase, ...).
pub fn substream(seed: u64, parts: &[u64]) -> SeededRng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, parts))
}

/// FNV-1a over bytes; used to key RNG substreams by variable label.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Fitted parameters attached to a goodness-of-fit result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitParams {
    Poisson { lambda: f64 },
    NegBinomial { r: f64, lambda: f64 },
}

/// Outcome of a goodness-of-fit screen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub p_value: f64,
    pub params: FitParams,
}

fn sample_mean(xs: &[u64]) -> f64 {
    xs.iter().map(|&x| x as f64).sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[u64], mean: f64) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    xs.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

fn draw_poisson(rng: &mut impl Rng, lambda: f64, n: usize) -> Vec<u64> {
    if lambda <= 0.0 {
        return vec![0; n];
    }
    let d = Poisson::new(lambda).expect("positive finite lambda");
    (0..n).map(|_| d.sample(rng) as u64).collect()
}

/// Negative binomial sampling via the Gamma-Poisson mixture.
fn draw_negbin(rng: &mut impl Rng, r: f64, lambda: f64, n: usize) -> Vec<u64> {
    let scale = lambda / (1.0 - lambda);
    let g = Gamma::new(r, scale).expect("valid gamma parameters");
    (0..n)
        .map(|_| {
            let lam = g.sample(rng);
            if lam <= 0.0 {
                0
            } else {
                Poisson::new(lam).expect("positive lambda").sample(rng) as u64
            }
        })
        .collect()
}

/// Two-sample Kolmogorov-Smirnov statistic for integer samples:
/// sup over values of |ECDF_a - ECDF_b|.
fn ks_two_sample(a: &[u64], b: &[u64]) -> f64 {
    let max = a.iter().chain(b).copied().max().unwrap_or(0) as usize;
    // counting-sort ECDFs; count data is small-valued
    let mut ca = vec![0u64; max + 1];
    let mut cb = vec![0u64; max + 1];
    for &x in a {
        ca[x as usize] += 1;
    }
    for &x in b {
        cb[x as usize] += 1;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut fa = 0.0;
    let mut fb = 0.0;
    let mut d: f64 = 0.0;
    for v in 0..=max {
        fa += ca[v] as f64 / na;
        fb += cb[v] as f64 / nb;
        d = d.max((fa - fb).abs());
    }
    d
}

fn ks_parametric_bootstrap<FitT, DrawT>(
    sample: &[u64],
    rng: &mut SeededRng,
    n_boot: usize,
    fit: FitT,
    draw: DrawT,
) -> (f64, f64)
where
    FitT: Fn(&[u64]) -> FitParams,
    DrawT: Fn(&mut SeededRng, &FitParams, usize) -> Vec<u64>,
{
    let n = sample.len();
    let fitted = fit(sample);
    let synthetic = draw(rng, &fitted, n);
    let observed = ks_two_sample(sample, &synthetic);
    let mut at_least = 0usize;
    for _ in 0..n_boot {
        // refit on each replicate: the null statistic must reflect that the
        // parameters were estimated from the data
        let boot = draw(rng, &fitted, n);
        let refit = fit(&boot);
        let boot_synth = draw(rng, &refit, n);
        if ks_two_sample(&boot, &boot_synth) >= observed {
            at_least += 1;
        }
    }
    let p = (1 + at_least) as f64 / (1 + n_boot) as f64;
    (observed, p)
}

/// Screen a sample against the Poisson family.
///
/// The rate is fitted by the sample mean; the statistic is the two-sample KS
/// distance to an equal-size synthetic Poisson sample, and the p-value comes
/// from a parametric bootstrap that refits the rate on every replicate.
pub fn ks_test_poisson(sample: &[u64], rng: &mut SeededRng, n_boot: usize) -> Result<GofResult> {
    if sample.len() < 10 {
        return Err(Error::TooFewSamples {
            needed: 10,
            got: sample.len(),
        });
    }
    let fit = |xs: &[u64]| FitParams::Poisson {
        lambda: sample_mean(xs),
    };
    let draw = |rng: &mut SeededRng, p: &FitParams, n: usize| match *p {
        FitParams::Poisson { lambda } => draw_poisson(rng, lambda, n),
        _ => unreachable!(),
    };
    let (statistic, p_value) = ks_parametric_bootstrap(sample, rng, n_boot, fit, draw);
    Ok(GofResult {
        statistic,
        p_value,
        params: fit(sample),
    })
}

/// Screen a sample against the negative binomial family, fitted by the
/// method of moments (`r = m^2/(v-m)`, `lambda = 1 - m/v`).
///
/// Samples with variance at or below the mean degenerate to the Poisson fit
/// (the r -> infinity boundary of the family); a zero-variance sample is an
/// exact degenerate fit with p = 1.
pub fn ks_test_negbin(sample: &[u64], rng: &mut SeededRng, n_boot: usize) -> Result<GofResult> {
    if sample.len() < 10 {
        return Err(Error::TooFewSamples {
            needed: 10,
            got: sample.len(),
        });
    }
    let m = sample_mean(sample);
    let v = sample_variance(sample, m);
    if v == 0.0 {
        return Ok(GofResult {
            statistic: 0.0,
            p_value: 1.0,
            params: FitParams::Poisson { lambda: m },
        });
    }
    let fit = |xs: &[u64]| {
        let m = sample_mean(xs);
        let v = sample_variance(xs, m);
        if v > m && m > 0.0 {
            FitParams::NegBinomial {
                r: m * m / (v - m),
                lambda: 1.0 - m / v,
            }
        } else {
            FitParams::Poisson { lambda: m }
        }
    };
    let draw = |rng: &mut SeededRng, p: &FitParams, n: usize| match *p {
        FitParams::NegBinomial { r, lambda } => draw_negbin(rng, r, lambda, n),
        FitParams::Poisson { lambda } => draw_poisson(rng, lambda, n),
    };
    let (statistic, p_value) = ks_parametric_bootstrap(sample, rng, n_boot, fit, draw);
    Ok(GofResult {
        statistic,
        p_value,
        params: fit(sample),
    })
}

/// Negative binomial pmf `C(k+r-1, k) lambda^k (1-lambda)^r`, evaluated
/// through log-gamma.
pub fn negbin_pmf(k: u64, r: f64, lambda: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) || !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidNegBin { r, lambda });
    }
    let kf = k as f64;
    let ln_p = ln_gamma(kf + r) - ln_gamma(r) - ln_gamma(kf + 1.0)
        + kf * lambda.ln()
        + r * (1.0 - lambda).ln();
    Ok(ln_p.exp())
}

/// Box-cox power transform: `(z^gamma - 1)/gamma`, or `ln z` at gamma = 0.
/// Inputs must be strictly positive (shift counts by +1 first).
pub fn box_cox(z: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if let Some(&bad) = z.iter().find(|&&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::NonPositiveBoxCox(bad));
    }
    Ok(z.iter()
        .map(|&v| {
            if gamma == 0.0 {
                v.ln()
            } else {
                (v.powf(gamma) - 1.0) / gamma
            }
        })
        .collect())
}

/// Uniform random permutation (Fisher-Yates); deterministic under a fixed
/// seed.
pub fn permute<T: Clone>(sequence: &[T], rng: &mut SeededRng) -> Vec<T> {
    let mut out = sequence.to_vec();
    out.shuffle(rng);
    out
}

//! Standard-normal quantiles and Gaussian maxima.
//!
//! The quantile is found by bisection on the complementary error function,
//! so it is accurate to ~1e-13 absolute across the whole range, including the
//! far upper tail that `beta_of_n` uses for large `n`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use libm::erfc;

use crate::error::{Error, Result};
use crate::rng;

/// `P(Z > x)` for a standard normal `Z`.
pub fn std_normal_upper_tail(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `x >= 0` with `P(Z > x) = tail`, for `tail` in `(0, 1/2]`.
fn upper_tail_quantile(tail: f64) -> f64 {
    if tail == 0.5 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if std_normal_upper_tail(mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Inverse standard-normal CDF.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", format!("{p} is outside (0, 1)")));
    }
    Ok(if p < 0.5 {
        -upper_tail_quantile(p)
    } else {
        upper_tail_quantile(1.0 - p)
    })
}

/// Exploration weight induced by Best-of-`n`: the `(1 - 1/n)`-quantile.
pub fn beta_of_n(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("n", "Best-of-N weight needs n >= 2"));
    }
    Ok(upper_tail_quantile(1.0 / n as f64))
}

/// Largest and second-largest of `n` standard normal draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxSpacingSample {
    pub max: f64,
    pub second: f64,
    pub n: u64,
    pub q: f64,
}

impl MaxSpacingSample {
    pub fn from_draws(draws: &[f64]) -> Result<Self> {
        if draws.len() < 2 {
            return Err(Error::invalid("n", "need at least two draws"));
        }
        let (mut max, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &x in draws {
            if x > max {
                second = max;
                max = x;
            } else if x > second {
                second = x;
            }
        }
        let n = draws.len() as u64;
        Ok(MaxSpacingSample { max, second, n, q: beta_of_n(n)? })
    }

    pub fn gap(&self) -> f64 {
        self.max - self.q
    }

    pub fn scaled_spacing(&self) -> f64 {
        (self.max - self.second) * self.q
    }
}

/// `trials` independent maxima of `n` standard normals. Trials run in
/// parallel on streams derived from one draw of `rng`.
pub fn sample_max_spacing<R: Rng + ?Sized>(n: u64, trials: usize, rng: &mut R) -> Result<Vec<MaxSpacingSample>> {
    if n < 2 {
        return Err(Error::invalid("n", "must be at least 2"));
    }
    if trials < 1 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let q = beta_of_n(n)?;
    let seed: u64 = rng.random();
    Ok((0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut r = rng::derived(seed, &[trial]);
            let (mut max, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for _ in 0..n {
                let x: f64 = r.sample(StandardNormal);
                if x > max {
                    second = max;
                    max = x;
                } else if x > second {
                    second = x;
                }
            }
            MaxSpacingSample { max, second, n, q }
        })
        .collect())
}

/// Aggregate of a batch of [`MaxSpacingSample`]s for one `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxSpacingSummary {
    pub n: u64,
    pub q_n: f64,
    pub mean_gap: f64,
    pub sd_gap: f64,
    pub median_max: f64,
    pub mean_spacing_scaled: f64,
    pub trials: usize,
}

pub fn summarize_max_spacing(samples: &[MaxSpacingSample]) -> Result<MaxSpacingSummary> {
    let first = samples.first().ok_or(Error::invalid("samples", "empty"))?;
    let k = samples.len() as f64;
    let mean_gap = samples.iter().map(|s| s.gap()).sum::<f64>() / k;
    let var = if samples.len() > 1 {
        samples.iter().map(|s| (s.gap() - mean_gap).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    let mut maxima: Vec<f64> = samples.iter().map(|s| s.max).collect();
    maxima.sort_by(f64::total_cmp);
    let m = maxima.len();
    let median_max = if m % 2 == 1 {
        maxima[m / 2]
    } else {
        0.5 * (maxima[m / 2 - 1] + maxima[m / 2])
    };
    Ok(MaxSpacingSummary {
        n: first.n,
        q_n: first.q,
        mean_gap,
        sd_gap: var.sqrt(),
        median_max,
        mean_spacing_scaled: samples.iter().map(|s| s.scaled_spacing()).sum::<f64>() / k,
        trials: samples.len(),
    })
}

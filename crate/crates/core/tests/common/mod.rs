#![allow(dead_code)]

use nalgebra::DVector;

/// Standard normal CDF from the Taylor series
/// `1/2 + phi(x) (x + x^3/3 + x^5/15 + ...)`, summed until the terms vanish.
/// Independent of erfc; accurate to ~1e-15 for |x| <= 8.
pub fn normal_cdf_series(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - normal_cdf_series(-x);
    }
    let mut term = x;
    let mut sum = x;
    let mut k = 1.0;
    while term.abs() > 1e-18 * sum.abs() {
        k += 2.0;
        term *= x * x / k;
        sum += term;
    }
    0.5 + (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt() * sum
}

/// Quantile by bisection on [`normal_cdf_series`].
pub fn normal_quantile_series(p: f64) -> f64 {
    let (mut lo, mut hi) = (-9.0_f64, 9.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf_series(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Upper tail of chi-square with 7 degrees of freedom (closed form for odd
/// degrees of freedom).
pub fn chi2_sf_7(x: f64) -> f64 {
    let s = x.sqrt();
    let phi = (-0.5 * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    2.0 * (1.0 - normal_cdf_series(s)) + 2.0 * phi * (s + s.powi(3) / 3.0 + s.powi(5) / 15.0)
}

/// `P(X >= k)` for `X ~ Binomial(n, 1/2)`.
pub fn binomial_half_upper(n: u64, k: u64) -> f64 {
    let mut total = 0.0;
    for i in k..=n {
        let mut c = 1.0_f64;
        for j in 0..i {
            c = c * (n - j) as f64 / (j + 1) as f64;
        }
        total += c * 0.5_f64.powi(n as i32);
    }
    total
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    for (rank, &i) in idx.iter().enumerate() {
        r[i] = rank as f64;
    }
    r
}

/// Spearman rank correlation (no ties expected).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

pub fn central_fd(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, step: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let mut hi = x.clone();
        let mut lo = x.clone();
        hi[i] += step;
        lo[i] -= step;
        (f(&hi) - f(&lo)) / (2.0 * step)
    })
}

pub fn unit(d: usize, axis: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[axis] = 1.0;
    v
}

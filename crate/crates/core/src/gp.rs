//! Gaussian-process UCB reference optimizer.
//!
//! Zero-mean GP with unit signal variance and a stationary kernel, exact
//! posterior through a Cholesky factor of `K + noise_var I`, acquisition
//! `mean + beta * sd`, projected multi-start ascent over a box, and a
//! sequential loop that records cumulative and simple regret.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{BoxDomain, ObjectiveModel};

/// Smoothness of a Matérn kernel. Only the half-integer orders with closed
/// forms (and a differentiable sample path) are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaternNu {
    ThreeHalves,
    FiveHalves,
}

impl MaternNu {
    pub fn from_value(nu: f64) -> Result<Self> {
        if nu == 1.5 {
            Ok(MaternNu::ThreeHalves)
        } else if nu == 2.5 {
            Ok(MaternNu::FiveHalves)
        } else {
            Err(Error::invalid("nu", format!("{nu} is not supported (use 1.5 or 2.5)")))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            MaternNu::ThreeHalves => 1.5,
            MaternNu::FiveHalves => 2.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelKind {
    SquaredExponential,
    Matern(MaternNu),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    kind: KernelKind,
    lengthscale: f64,
}

impl KernelSpec {
    pub fn new(kind: KernelKind, lengthscale: f64) -> Result<Self> {
        if !(lengthscale > 0.0 && lengthscale.is_finite()) {
            return Err(Error::invalid("lengthscale", "must be positive and finite"));
        }
        Ok(KernelSpec { kind, lengthscale })
    }

    pub fn squared_exponential(lengthscale: f64) -> Result<Self> {
        Self::new(KernelKind::SquaredExponential, lengthscale)
    }

    pub fn matern(nu: f64, lengthscale: f64) -> Result<Self> {
        Self::new(KernelKind::Matern(MaternNu::from_value(nu)?), lengthscale)
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn lengthscale(&self) -> f64 {
        self.lengthscale
    }

    /// Covariance as a function of distance `r`.
    ///
    /// SE: `exp(-r^2 / (2 l^2))`. Matérn with `z = 2 sqrt(nu) r / l`:
    /// `(1 + z) e^-z` for 3/2 and `(1 + z + z^2/3) e^-z` for 5/2.
    pub fn of_distance(&self, r: f64) -> f64 {
        let l = self.lengthscale;
        match self.kind {
            KernelKind::SquaredExponential => (-(r * r) / (2.0 * l * l)).exp(),
            KernelKind::Matern(nu) => {
                let z = 2.0 * nu.value().sqrt() * r / l;
                match nu {
                    MaternNu::ThreeHalves => (1.0 + z) * (-z).exp(),
                    MaternNu::FiveHalves => (1.0 + z + z * z / 3.0) * (-z).exp(),
                }
            }
        }
    }

    fn eval_unchecked(&self, x: &DVector<f64>, x2: &DVector<f64>) -> f64 {
        match self.kind {
            KernelKind::SquaredExponential => {
                let r2 = (x - x2).norm_squared();
                (-r2 / (2.0 * self.lengthscale * self.lengthscale)).exp()
            }
            KernelKind::Matern(_) => self.of_distance((x - x2).norm()),
        }
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: &DVector<f64>, x2: &DVector<f64>) -> Result<f64> {
    if x.len() != x2.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: x2.len() });
    }
    Ok(spec.eval_unchecked(x, x2))
}

const JITTER_START: f64 = 1e-10;
const JITTER_MAX: f64 = 1e-4;

/// GP conditioned on noisy observations.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    kernel: KernelSpec,
    train_x: Vec<DVector<f64>>,
    train_y: DVector<f64>,
    noise_var: f64,
    factor: Option<Cholesky<f64, Dyn>>,
    alpha: DVector<f64>,
    jitter: f64,
}

/// Conditions the zero-mean prior on `(train_x, train_y)`.
///
/// `K + noise_var I` is factorized as is; if that fails, a diagonal jitter
/// starting at `1e-10` times the mean diagonal is added and grown tenfold up
/// to `1e-4` times the mean diagonal before giving up.
pub fn fit_posterior(
    kernel: KernelSpec,
    train_x: Vec<DVector<f64>>,
    train_y: Vec<f64>,
    noise_var: f64,
) -> Result<GpPosterior> {
    if !(noise_var > 0.0 && noise_var.is_finite()) {
        return Err(Error::invalid("noise_var", "must be positive and finite"));
    }
    if train_x.len() != train_y.len() {
        return Err(Error::DimensionMismatch { expected: train_x.len(), got: train_y.len() });
    }
    if let Some(first) = train_x.first() {
        let d = first.len();
        if let Some(bad) = train_x.iter().find(|x| x.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
        }
    }
    if train_x.iter().any(|x| x.iter().any(|c| !c.is_finite())) || train_y.iter().any(|y| !y.is_finite()) {
        return Err(Error::invalid("train", "observations must be finite"));
    }
    let n = train_x.len();
    let train_y = DVector::from_vec(train_y);
    if n == 0 {
        return Ok(GpPosterior {
            kernel,
            train_x,
            train_y,
            noise_var,
            factor: None,
            alpha: DVector::zeros(0),
            jitter: 0.0,
        });
    }
    let gram = DMatrix::from_fn(n, n, |i, j| kernel.eval_unchecked(&train_x[i], &train_x[j]))
        + DMatrix::identity(n, n) * noise_var;
    let scale = gram.trace() / n as f64;
    let mut jitter = 0.0;
    let factor = loop {
        let m = &gram + DMatrix::identity(n, n) * jitter;
        if let Some(c) = Cholesky::new(m) {
            break c;
        }
        jitter = if jitter == 0.0 { JITTER_START * scale } else { jitter * 10.0 };
        if jitter > JITTER_MAX * scale * (1.0 + 1e-9) {
            return Err(Error::IllConditioned { jitter });
        }
    };
    let alpha = factor.solve(&train_y);
    Ok(GpPosterior {
        kernel,
        train_x,
        train_y,
        noise_var,
        factor: Some(factor),
        alpha,
        jitter,
    })
}

impl GpPosterior {
    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// Diagonal jitter added on top of `noise_var` (zero when none was needed).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn len(&self) -> usize {
        self.train_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train_x.is_empty()
    }

    pub fn train_x(&self) -> &[DVector<f64>] {
        &self.train_x
    }

    pub fn train_y(&self) -> &DVector<f64> {
        &self.train_y
    }

    /// Lower-triangular factor `L` with `L L^T = K + (noise_var + jitter) I`.
    pub fn factor(&self) -> Option<DMatrix<f64>> {
        self.factor.as_ref().map(|c| c.l())
    }

    fn dim(&self) -> Option<usize> {
        self.train_x.first().map(|x| x.len())
    }

    fn check(&self, x: &DVector<f64>) -> Result<()> {
        match self.dim() {
            Some(d) if d != x.len() => Err(Error::DimensionMismatch { expected: d, got: x.len() }),
            _ => Ok(()),
        }
    }

    fn cross(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.train_x.iter().map(|xi| self.kernel.eval_unchecked(x, xi)))
    }

    /// Posterior mean and variance; the variance is clamped at zero.
    pub fn mean_var(&self, x: &DVector<f64>) -> Result<(f64, f64)> {
        self.check(x)?;
        let prior = self.kernel.eval_unchecked(x, x);
        let Some(factor) = &self.factor else {
            return Ok((0.0, prior));
        };
        let k = self.cross(x);
        let mean = k.dot(&self.alpha);
        let v = factor
            .l_dirty()
            .solve_lower_triangular(&k)
            .expect("Cholesky factor has a non-zero diagonal");
        Ok((mean, (prior - v.norm_squared()).max(0.0)))
    }

    pub fn ucb_value(&self, x: &DVector<f64>, beta: f64) -> Result<f64> {
        if !(beta >= 0.0) {
            return Err(Error::invalid("beta", "must be non-negative"));
        }
        let (m, v) = self.mean_var(x)?;
        Ok(m + beta * v.sqrt())
    }

    /// Gradient of `mean + beta * sd`. Analytic for the SE kernel, central
    /// finite differences for Matérn. Fails with
    /// [`Error::SingularVariance`] where `var <= 1e-12`.
    pub fn ucb_grad(&self, x: &DVector<f64>, beta: f64) -> Result<DVector<f64>> {
        if !(beta >= 0.0) {
            return Err(Error::invalid("beta", "must be non-negative"));
        }
        let (_, var) = self.mean_var(x)?;
        if var <= 1e-12 {
            return Err(Error::SingularVariance { var });
        }
        let d = x.len();
        let Some(factor) = &self.factor else {
            return Ok(DVector::zeros(d));
        };
        match self.kernel.kind {
            KernelKind::SquaredExponential => {
                let l2 = self.kernel.lengthscale.powi(2);
                let k = self.cross(x);
                let w = factor.solve(&k);
                let mut grad_mean = DVector::zeros(d);
                let mut grad_var = DVector::zeros(d);
                for (i, xi) in self.train_x.iter().enumerate() {
                    // d k(x, xi) / dx = -k (x - xi) / l^2
                    let dk = (x - xi) * (-k[i] / l2);
                    grad_mean += &dk * self.alpha[i];
                    grad_var -= &dk * (2.0 * w[i]);
                }
                Ok(grad_mean + grad_var * (beta / (2.0 * var.sqrt())))
            }
            KernelKind::Matern(_) => {
                let h = 1e-6 * self.kernel.lengthscale;
                let mut grad = DVector::zeros(d);
                for i in 0..d {
                    let mut p = x.clone();
                    let mut m = x.clone();
                    p[i] += h;
                    m[i] -= h;
                    grad[i] = (self.ucb_value(&p, beta)? - self.ucb_value(&m, beta)?) / (2.0 * h);
                }
                Ok(grad)
            }
        }
    }
}

pub fn posterior_mean_var(post: &GpPosterior, x: &DVector<f64>) -> Result<(f64, f64)> {
    post.mean_var(x)
}

pub fn ucb_value(post: &GpPosterior, x: &DVector<f64>, beta: f64) -> Result<f64> {
    post.ucb_value(x, beta)
}

pub fn ucb_grad(post: &GpPosterior, x: &DVector<f64>, beta: f64) -> Result<DVector<f64>> {
    post.ucb_grad(x, beta)
}

/// Exploration weight per step `t` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum UcbSchedule {
    Constant(f64),
    /// `2 ln(t + 1) + 2`
    Logarithmic,
}

impl UcbSchedule {
    pub fn beta(&self, t: usize) -> f64 {
        match self {
            UcbSchedule::Constant(b) => *b,
            UcbSchedule::Logarithmic => 2.0 * ((t + 1) as f64).ln() + 2.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            UcbSchedule::Constant(b) if !(*b > 0.0 && b.is_finite()) => {
                Err(Error::invalid("beta", "must be positive and finite"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentOptions {
    pub max_iterations: usize,
    pub grad_tolerance: f64,
    pub step_tolerance: f64,
    /// Merge radius as a fraction of the box diagonal.
    pub merge_fraction: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            max_iterations: 200,
            grad_tolerance: 1e-6,
            step_tolerance: 1e-10,
            merge_fraction: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMaximum {
    pub point: DVector<f64>,
    pub value: f64,
    pub start: DVector<f64>,
    pub start_value: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn ascend(post: &GpPosterior, beta: f64, domain: &BoxDomain, start: DVector<f64>, opts: &AscentOptions) -> Result<LocalMaximum> {
    let mut x = start.clone();
    domain.project(&mut x);
    let start_value = post.ucb_value(&x, beta)?;
    let mut value = start_value;
    let mut step = 0.1 * domain.diagonal();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let grad = match post.ucb_grad(&x, beta) {
            Ok(g) => g,
            Err(Error::SingularVariance { .. }) => {
                converged = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let gnorm = grad.norm();
        if gnorm < opts.grad_tolerance {
            converged = true;
            break;
        }
        let dir = grad / gnorm;
        let mut improved = false;
        loop {
            let mut cand = &x + &dir * step;
            domain.project(&mut cand);
            let moved = (&cand - &x).norm();
            if moved < opts.step_tolerance {
                break;
            }
            let cv = post.ucb_value(&cand, beta)?;
            if cv > value {
                x = cand;
                value = cv;
                improved = true;
                step = (step * 2.0).min(domain.diagonal());
                break;
            }
            step *= 0.5;
            if step < opts.step_tolerance {
                break;
            }
        }
        if !improved {
            converged = true;
            break;
        }
    }
    Ok(LocalMaximum {
        point: x,
        value,
        start,
        start_value,
        converged,
        iterations,
    })
}

/// Projected gradient ascent on the UCB from `n_starts` uniform starts in
/// the box, run in parallel. Results are sorted by value (descending) and
/// merged when closer than `merge_fraction` of the box diagonal.
pub fn multistart_ascent<R: Rng + ?Sized>(
    post: &GpPosterior,
    beta: f64,
    domain: &BoxDomain,
    n_starts: usize,
    opts: &AscentOptions,
    rng: &mut R,
) -> Result<Vec<LocalMaximum>> {
    if n_starts < 1 {
        return Err(Error::invalid("n_starts", "must be at least 1"));
    }
    if let Some(d) = post.dim() {
        if d != domain.dim() {
            return Err(Error::DimensionMismatch { expected: d, got: domain.dim() });
        }
    }
    let starts: Vec<DVector<f64>> = (0..n_starts).map(|_| domain.sample(rng)).collect();
    ascend_from(post, beta, domain, starts, opts)
}

/// Same as [`multistart_ascent`] with explicit start points.
pub fn ascend_from(
    post: &GpPosterior,
    beta: f64,
    domain: &BoxDomain,
    starts: Vec<DVector<f64>>,
    opts: &AscentOptions,
) -> Result<Vec<LocalMaximum>> {
    let mut found = starts
        .into_par_iter()
        .map(|s| ascend(post, beta, domain, s, opts))
        .collect::<Result<Vec<_>>>()?;
    // stable: equal values keep start order
    found.sort_by(|a, b| b.value.total_cmp(&a.value));
    let radius = opts.merge_fraction * domain.diagonal();
    let mut kept: Vec<LocalMaximum> = Vec::new();
    for m in found {
        if kept.iter().all(|k| (&k.point - &m.point).norm() > radius) {
            kept.push(m);
        }
    }
    Ok(kept)
}

/// Per-step record of a sequential optimizer against a known optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretRecord {
    pub optimum: f64,
    pub points: Vec<DVector<f64>>,
    pub true_values: Vec<f64>,
    pub observed: Vec<f64>,
    pub cumulative_regret: Vec<f64>,
    /// Gap between the optimum and the best true value queried so far.
    pub simple_regret: Vec<f64>,
}

impl RegretRecord {
    pub fn new(optimum: f64) -> Self {
        RegretRecord {
            optimum,
            points: Vec::new(),
            true_values: Vec::new(),
            observed: Vec::new(),
            cumulative_regret: Vec::new(),
            simple_regret: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, x: DVector<f64>, true_value: f64, observed: f64) {
        let gap = self.optimum - true_value;
        let cum = self.cumulative_regret.last().copied().unwrap_or(0.0) + gap;
        let simple = self.simple_regret.last().map_or(gap, |s| s.min(gap));
        self.points.push(x);
        self.true_values.push(true_value);
        self.observed.push(observed);
        self.cumulative_regret.push(cum);
        self.simple_regret.push(simple);
    }

    /// Cumulative regret non-decreasing, simple regret non-increasing. A
    /// point slightly above the numerically located optimum may give a tiny
    /// negative gap, tolerated to 1e-9.
    pub fn check_invariants(&self) -> Result<()> {
        for w in self.cumulative_regret.windows(2) {
            if w[1] < w[0] - 1e-9 {
                return Err(Error::InvariantViolation(format!(
                    "cumulative regret decreased from {} to {}",
                    w[0], w[1]
                )));
            }
        }
        for w in self.simple_regret.windows(2) {
            if w[1] > w[0] {
                return Err(Error::InvariantViolation("simple regret increased".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpUcbConfig {
    pub iterations: usize,
    pub noise_sd: f64,
    pub kernel: KernelSpec,
    pub schedule: UcbSchedule,
    pub domain: BoxDomain,
    pub n_starts: usize,
    pub ascent: AscentOptions,
}

fn known_optimum(objective: &ObjectiveModel, domain: &BoxDomain) -> Result<f64> {
    Ok(objective.maximize_mu_on_box(domain)?.1)
}

fn validate_loop(objective: &ObjectiveModel, iterations: usize, noise_sd: f64, domain: &BoxDomain) -> Result<()> {
    if iterations < 1 {
        return Err(Error::invalid("iterations", "must be at least 1"));
    }
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(Error::invalid("noise_sd", "must be non-negative and finite"));
    }
    if domain.dim() != objective.dim() {
        return Err(Error::DimensionMismatch { expected: objective.dim(), got: domain.dim() });
    }
    Ok(())
}

/// Sequential GP-UCB: fit, maximize the acquisition, query with noise.
pub fn gp_ucb_loop<R: Rng + ?Sized>(objective: &ObjectiveModel, cfg: &GpUcbConfig, rng: &mut R) -> Result<RegretRecord> {
    validate_loop(objective, cfg.iterations, cfg.noise_sd, &cfg.domain)?;
    cfg.schedule.validate()?;
    let optimum = known_optimum(objective, &cfg.domain)?;
    let noise_var = (cfg.noise_sd * cfg.noise_sd).max(1e-8);
    let mut record = RegretRecord::new(optimum);
    for t in 1..=cfg.iterations {
        let post = fit_posterior(cfg.kernel, record.points.clone(), record.observed.clone(), noise_var)?;
        let beta = cfg.schedule.beta(t);
        let maxima = multistart_ascent(&post, beta, &cfg.domain, cfg.n_starts, &cfg.ascent, rng)?;
        let x = maxima[0].point.clone();
        let f = objective.mu_at(&x);
        let z: f64 = rng.sample(StandardNormal);
        record.push(x, f, f + cfg.noise_sd * z);
    }
    record.check_invariants()?;
    Ok(record)
}

/// Uniform random search with the same budget and noise, for comparison.
pub fn random_search_loop<R: Rng + ?Sized>(
    objective: &ObjectiveModel,
    iterations: usize,
    noise_sd: f64,
    domain: &BoxDomain,
    rng: &mut R,
) -> Result<RegretRecord> {
    validate_loop(objective, iterations, noise_sd, domain)?;
    let mut record = RegretRecord::new(known_optimum(objective, domain)?);
    for _ in 0..iterations {
        let x = domain.sample(rng);
        let f = objective.mu_at(&x);
        let z: f64 = rng.sample(StandardNormal);
        record.push(x, f, f + noise_sd * z);
    }
    record.check_invariants()?;
    Ok(record)
}

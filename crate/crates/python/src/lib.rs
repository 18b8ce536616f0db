//! Python bindings for the core types and experiments.
//!
//! Vectors cross the boundary as lists of floats, experiment rows as dicts.
//! Invalid arguments raise `ValueError`, numerical failures `RuntimeError`.

use nalgebra::DVector;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use tbon_core::arms::{gaussian_arm, identify_best_and_worst, IdentifyConfig};
use tbon_core::bon::{self, JudgeModel, Selector};
use tbon_core::gp::{self, AscentOptions, GpUcbConfig, KernelSpec, UcbSchedule};
use tbon_core::objective::{make_linear_model, make_smooth_model, SmoothKind};
use tbon_core::orchestrator::{best_sequence_csv, history_csv, run_tbon, GaussianEvaluator, SelectorKind, SyntheticCritic, TbonParams};
use tbon_core::{order_stats, rng, EmbeddingPoint, Error, ObjectiveModel, UnitDirection};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParameter { .. } | Error::DimensionMismatch { .. } | Error::EmptyBatch => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for tbon_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn vector(x: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(x)
}

fn check_dim(model: &ObjectiveModel, x: &[f64]) -> PyResult<()> {
    if x.len() == model.dim() {
        Ok(())
    } else {
        Err(py_err(Error::DimensionMismatch { expected: model.dim(), got: x.len() }))
    }
}

fn judge(accuracy: f64) -> PyResult<JudgeModel> {
    if accuracy == 1.0 {
        Ok(JudgeModel::Exact)
    } else {
        JudgeModel::noisy(accuracy).py()
    }
}

/// Mean and deviation fields over an embedding space.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: ObjectiveModel,
}

#[pymethods]
impl PyModel {
    /// Linear field `mu = mu0 + g.x`, `sigma = max(0, sigma0 + h.x)`.
    #[staticmethod]
    #[pyo3(signature = (g, h, mu0, sigma0, validity_radius = None))]
    fn linear(g: Vec<f64>, h: Vec<f64>, mu0: f64, sigma0: f64, validity_radius: Option<f64>) -> PyResult<Self> {
        let mut m = make_linear_model(g, h, mu0, sigma0).py()?;
        if let Some(r) = validity_radius {
            m = m.with_validity_radius(r).py()?;
        }
        Ok(PyModel { inner: m })
    }

    /// Test function `quadratic`, `sinusoid` or `branin` with constant
    /// deviation `sigma0`.
    #[staticmethod]
    #[pyo3(signature = (kind, dim = 1, sigma0 = 0.0))]
    fn smooth(kind: &str, dim: usize, sigma0: f64) -> PyResult<Self> {
        let kind = SmoothKind::from_tag(kind, dim).py()?;
        Ok(PyModel { inner: make_smooth_model(kind, sigma0).py()? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn mu(&self, x: Vec<f64>) -> PyResult<f64> {
        check_dim(&self.inner, &x)?;
        Ok(self.inner.mu_at(&vector(x)))
    }

    fn sigma(&self, x: Vec<f64>) -> PyResult<f64> {
        check_dim(&self.inner, &x)?;
        Ok(self.inner.sigma_at(&vector(x)))
    }

    fn grad_mu(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        check_dim(&self.inner, &x)?;
        Ok(self.inner.grad_mu_at(&vector(x)).as_slice().to_vec())
    }

    fn grad_sigma(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        check_dim(&self.inner, &x)?;
        Ok(self.inner.grad_sigma_at(&vector(x)).as_slice().to_vec())
    }

    /// One Best-of-N step from `base`; returns `(index, step)`.
    #[pyo3(signature = (base, epsilon, n, seed, judge_accuracy = None, repeats = 2))]
    fn bon_step(
        &self,
        base: Vec<f64>,
        epsilon: f64,
        n: usize,
        seed: u64,
        judge_accuracy: Option<f64>,
        repeats: u32,
    ) -> PyResult<(usize, Vec<f64>)> {
        check_dim(&self.inner, &base)?;
        let base = EmbeddingPoint::new(base).py()?;
        let selector = match judge_accuracy {
            None => Selector::Oracle,
            Some(p) => Selector::Tournament { judge: judge(p)?, repeats },
        };
        let s = bon::bon_gradient_step(&base, epsilon, n, &self.inner, selector, &mut rng::stream(seed)).py()?;
        Ok((s.index, s.step.as_slice().to_vec()))
    }
}

/// `Phi^{-1}(1 - 1/n)`.
#[pyfunction]
fn beta_of_n(n: u64) -> PyResult<f64> {
    order_stats::beta_of_n(n).py()
}

#[pyfunction]
fn std_normal_quantile(p: f64) -> PyResult<f64> {
    order_stats::std_normal_quantile(p).py()
}

/// Direction-law rows for a linear model (unit `g`, orthogonal unit or zero
/// `h`) at the origin.
#[pyfunction]
fn effective_beta<'py>(
    py: Python<'py>,
    model: &PyModel,
    epsilon: f64,
    n_values: Vec<usize>,
    trials: usize,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let base = EmbeddingPoint::zeros(model.inner.dim());
    let rows = bon::estimate_effective_beta(&model.inner, &base, epsilon, &n_values, trials, &mut rng::stream(seed)).py()?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n", r.n)?;
            d.set_item("beta_hat", r.beta_hat)?;
            d.set_item("q_n", r.q_n)?;
            d.set_item("mean_cosine", r.mean_cosine)?;
            d.set_item("ci_halfwidth", r.ci_halfwidth)?;
            d.set_item("trials", r.trials)?;
            Ok(d)
        })
        .collect()
}

/// Fraction of oracle steps that do not decrease `mu + q_n sigma`, per `n`.
#[pyfunction]
fn ascent_fraction(model: &PyModel, epsilon: f64, n_values: Vec<usize>, trials: usize, seed: u64) -> PyResult<Vec<(usize, f64)>> {
    let base = EmbeddingPoint::zeros(model.inner.dim());
    let rows = bon::ascent_fraction(&model.inner, &base, epsilon, &n_values, trials, &mut rng::stream(seed)).py()?;
    Ok(rows.iter().map(|r| (r.n, r.fraction)).collect())
}

/// Summary of `trials` maxima of `n` standard normals.
#[pyfunction]
fn max_spacing<'py>(py: Python<'py>, n: u64, trials: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let samples = order_stats::sample_max_spacing(n, trials, &mut rng::stream(seed)).py()?;
    let s = order_stats::summarize_max_spacing(&samples).py()?;
    let d = PyDict::new(py);
    d.set_item("n", s.n)?;
    d.set_item("q_n", s.q_n)?;
    d.set_item("mean_gap", s.mean_gap)?;
    d.set_item("sd_gap", s.sd_gap)?;
    d.set_item("median_max", s.median_max)?;
    d.set_item("mean_spacing_scaled", s.mean_spacing_scaled)?;
    d.set_item("trials", s.trials)?;
    Ok(d)
}

/// Mean cap deficit `1 - max_i v.U_i` and its standard error, per `n`.
#[pyfunction]
fn cap_coverage(v: Vec<f64>, n_values: Vec<usize>, trials: usize, seed: u64) -> PyResult<Vec<(usize, f64, f64)>> {
    let v = UnitDirection::normalize(vector(v)).py()?;
    let rows = bon::cap_coverage_stat(&v, &n_values, trials, &mut rng::stream(seed)).py()?;
    Ok(rows.iter().map(|r| (r.n, r.mean_deficit, r.se)).collect())
}

fn kernel(kind: &str, lengthscale: f64, nu: f64) -> PyResult<KernelSpec> {
    match kind {
        "se" => KernelSpec::squared_exponential(lengthscale).py(),
        "matern" => KernelSpec::matern(nu, lengthscale).py(),
        other => Err(PyValueError::new_err(format!("unknown kernel `{other}` (se, matern)"))),
    }
}

/// Exact GP posterior with a stationary kernel and Gaussian noise.
#[pyclass(name = "GpPosterior", frozen)]
struct PyGpPosterior {
    inner: gp::GpPosterior,
}

#[pymethods]
impl PyGpPosterior {
    #[new]
    #[pyo3(signature = (xs, ys, noise_var, kernel_kind = "se", lengthscale = 1.0, nu = 2.5))]
    fn new(xs: Vec<Vec<f64>>, ys: Vec<f64>, noise_var: f64, kernel_kind: &str, lengthscale: f64, nu: f64) -> PyResult<Self> {
        let k = kernel(kernel_kind, lengthscale, nu)?;
        let xs = xs.into_iter().map(vector).collect();
        Ok(PyGpPosterior { inner: gp::fit_posterior(k, xs, ys, noise_var).py()? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn mean_var(&self, x: Vec<f64>) -> PyResult<(f64, f64)> {
        gp::posterior_mean_var(&self.inner, &vector(x)).py()
    }

    fn ucb(&self, x: Vec<f64>, beta: f64) -> PyResult<f64> {
        gp::ucb_value(&self.inner, &vector(x), beta).py()
    }

    fn ucb_grad(&self, x: Vec<f64>, beta: f64) -> PyResult<Vec<f64>> {
        Ok(gp::ucb_grad(&self.inner, &vector(x), beta).py()?.as_slice().to_vec())
    }
}

/// GP-UCB on a test function; returns per-step observations and regrets.
#[pyfunction]
#[pyo3(signature = (function, iterations, seed, dim = 1, noise_sd = 0.1, kernel_kind = "se", lengthscale = 0.3, nu = 2.5, beta = Some(2.0), n_starts = 8))]
#[allow(clippy::too_many_arguments)]
fn gp_ucb<'py>(
    py: Python<'py>,
    function: &str,
    iterations: usize,
    seed: u64,
    dim: usize,
    noise_sd: f64,
    kernel_kind: &str,
    lengthscale: f64,
    nu: f64,
    beta: Option<f64>,
    n_starts: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let kind = SmoothKind::from_tag(function, dim).py()?;
    let domain = kind.natural_domain();
    let f = make_smooth_model(kind, 0.0).py()?;
    let cfg = GpUcbConfig {
        iterations,
        noise_sd,
        kernel: kernel(kernel_kind, lengthscale, nu)?,
        schedule: beta.map_or(UcbSchedule::Logarithmic, UcbSchedule::Constant),
        domain,
        n_starts,
        ascent: AscentOptions::default(),
    };
    let rec = gp::gp_ucb_loop(&f, &cfg, &mut rng::stream(seed)).py()?;
    let d = PyDict::new(py);
    d.set_item("optimum", rec.optimum)?;
    d.set_item("points", rec.points.iter().map(|p| p.as_slice().to_vec()).collect::<Vec<_>>())?;
    d.set_item("observed", rec.observed)?;
    d.set_item("cumulative_regret", rec.cumulative_regret)?;
    d.set_item("simple_regret", rec.simple_regret)?;
    Ok(d)
}

/// Multi-trajectory run on a synthetic backend. Every trajectory starts at
/// `start`; returns counts plus the history and best-sequence CSV text.
#[pyfunction]
#[pyo3(signature = (model, start, epsilon, iterations, trajectories, gradient_steps, candidates, eval_samples, seed, noise_sd = 0.1, judge_accuracy = None, repeats = 2))]
#[allow(clippy::too_many_arguments)]
fn run_synthetic<'py>(
    py: Python<'py>,
    model: &PyModel,
    start: Vec<f64>,
    epsilon: f64,
    iterations: usize,
    trajectories: usize,
    gradient_steps: usize,
    candidates: usize,
    eval_samples: usize,
    seed: u64,
    noise_sd: f64,
    judge_accuracy: Option<f64>,
    repeats: u32,
) -> PyResult<Bound<'py, PyDict>> {
    check_dim(&model.inner, &start)?;
    let critic = SyntheticCritic::new(model.inner.clone(), epsilon, judge(judge_accuracy.unwrap_or(1.0))?).py()?;
    let params = TbonParams {
        iterations,
        trajectories,
        gradient_steps,
        candidates_per_step: candidates,
        eval_samples,
        master_seed: seed,
        selector: match judge_accuracy {
            None => SelectorKind::Oracle,
            Some(_) => SelectorKind::Tournament { repeats },
        },
    };
    let initial = vec![EmbeddingPoint::new(start).py()?; trajectories];
    let run = run_tbon(&params, &critic, &GaussianEvaluator { noise_sd }, initial).py()?;
    let d = PyDict::new(py);
    d.set_item("evaluations", run.metrics.evaluations)?;
    d.set_item("generations", run.metrics.generations)?;
    d.set_item("generations_per_evaluation", run.metrics.generations_per_evaluation())?;
    d.set_item("reflection_version", run.reflection.version)?;
    d.set_item("best_scores", run.best_sequence.iter().map(|b| b.score).collect::<Vec<_>>())?;
    d.set_item("history_csv", history_csv(&run.history))?;
    d.set_item("best_csv", best_sequence_csv(&run.best_sequence))?;
    Ok(d)
}

/// Best and `k_worst` worst of Gaussian arms with the given means; returns
/// `(best, worst, pulls_used)`.
#[pyfunction]
#[pyo3(signature = (means, sd, budget, k_worst, seed, score_range = 1.0, delta = 0.05))]
fn identify_arms(
    means: Vec<f64>,
    sd: f64,
    budget: usize,
    k_worst: usize,
    seed: u64,
    score_range: f64,
    delta: f64,
) -> PyResult<(usize, Vec<usize>, usize)> {
    let arms: Vec<_> = means.iter().map(|&m| gaussian_arm(m, sd)).collect();
    let cfg = IdentifyConfig { budget, k_worst, score_range, delta };
    let id = identify_best_and_worst(&arms, &cfg, &mut rng::stream(seed)).py()?;
    Ok((id.best, id.worst, id.used))
}

#[pymodule]
fn tbon(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyGpPosterior>()?;
    m.add_function(wrap_pyfunction!(beta_of_n, m)?)?;
    m.add_function(wrap_pyfunction!(std_normal_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(effective_beta, m)?)?;
    m.add_function(wrap_pyfunction!(ascent_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(max_spacing, m)?)?;
    m.add_function(wrap_pyfunction!(cap_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(gp_ucb, m)?)?;
    m.add_function(wrap_pyfunction!(run_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(identify_arms, m)?)?;
    Ok(())
}

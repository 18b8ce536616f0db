//! Synthetic objective models over an embedding space.
//!
//! A model carries a mean field `mu`, a non-negative deviation field `sigma`,
//! their analytic gradients, and a smoothness constant `C` bounding both the
//! Taylor remainder of `mu` and the remainder of the edit operator.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the embedding space. All coordinates are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPoint(DVector<f64>);

impl EmbeddingPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(coords))
    }

    pub fn from_vector(v: DVector<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::invalid("coords", "dimension must be at least 1"));
        }
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coords", "all coordinates must be finite"));
        }
        Ok(EmbeddingPoint(v))
    }

    pub fn zeros(dim: usize) -> Self {
        EmbeddingPoint(DVector::zeros(dim.max(1)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }
}

/// A direction on the unit sphere, norm within `1 ± 1e-12`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitDirection(DVector<f64>);

impl UnitDirection {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    /// Normalizes a non-zero finite vector.
    pub fn normalize(v: DVector<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::invalid("direction", "cannot normalize a zero or non-finite vector"));
        }
        Ok(UnitDirection(v / norm))
    }

    /// Wraps a vector that is already unit length.
    pub fn from_unit(v: DVector<f64>) -> Result<Self> {
        if v.is_empty() || (v.norm() - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::invalid("direction", "vector is not unit length"));
        }
        Ok(UnitDirection(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn dot(&self, other: &DVector<f64>) -> f64 {
        self.0.dot(other)
    }
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::invalid("domain", "bounds must be non-empty and of equal length"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u)) {
            return Err(Error::invalid("domain", "every axis needs finite lower < upper"));
        }
        Ok(BoxDomain { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn diagonal(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn project(&self, x: &mut DVector<f64>) {
        for (i, c) in x.iter_mut().enumerate() {
            *c = c.clamp(self.lower[i], self.upper[i]);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.lower
                .iter()
                .zip(&self.upper)
                .map(|(l, u)| l + (u - l) * rng.random::<f64>()),
        )
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .enumerate()
                .all(|(i, c)| *c >= self.lower[i] && *c <= self.upper[i])
    }
}

/// One term `amplitude * sin(frequency * x + phase)` of a 1D sinusoid sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidTerm {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// Nonlinear test fields with known derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothKind {
    /// `mu(x) = -scale * |x - center|^2`
    Quadratic { center: Vec<f64>, scale: f64 },
    /// `mu(x) = sum_k a_k sin(w_k x + phi_k)` in one dimension.
    SinusoidSum { terms: Vec<SinusoidTerm> },
    /// Negated Branin function in two dimensions (maximum -0.397887).
    Branin,
}

impl SmoothKind {
    /// Default parameters for a tag: `quadratic`, `sinusoid`, `branin`.
    pub fn from_tag(tag: &str, dim: usize) -> Result<Self> {
        match tag {
            "quadratic" => Ok(SmoothKind::Quadratic {
                center: vec![0.0; dim.max(1)],
                scale: 1.0,
            }),
            "sinusoid" => Ok(SmoothKind::SinusoidSum {
                terms: vec![
                    SinusoidTerm { amplitude: 1.0, frequency: 3.0, phase: 0.0 },
                    SinusoidTerm { amplitude: 0.5, frequency: 7.0, phase: 1.0 },
                ],
            }),
            "branin" => Ok(SmoothKind::Branin),
            other => Err(Error::invalid("kind", format!("unknown test function `{other}`"))),
        }
    }

    /// Box on which the declared smoothness bound holds and benchmarks run.
    pub fn natural_domain(&self) -> BoxDomain {
        match self {
            SmoothKind::Quadratic { center, .. } => BoxDomain {
                lower: center.iter().map(|c| c - 2.0).collect(),
                upper: center.iter().map(|c| c + 2.0).collect(),
            },
            SmoothKind::SinusoidSum { .. } => BoxDomain { lower: vec![0.0], upper: vec![3.0] },
            SmoothKind::Branin => BoxDomain { lower: vec![-5.0, 0.0], upper: vec![10.0, 15.0] },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Field {
    Linear {
        g: DVector<f64>,
        h: DVector<f64>,
        mu0: f64,
        sigma0: f64,
    },
    Smooth {
        kind: SmoothKind,
        sigma0: f64,
    },
}

const BRANIN_A: f64 = 1.0;
const BRANIN_R: f64 = 6.0;
const BRANIN_S: f64 = 10.0;

fn branin_consts() -> (f64, f64, f64) {
    let pi = std::f64::consts::PI;
    (5.1 / (4.0 * pi * pi), 5.0 / pi, 1.0 / (8.0 * pi))
}

/// Mean and deviation fields over `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveModel {
    dim: usize,
    field: Field,
    smoothness_bound: f64,
    validity_override: Option<f64>,
}

/// `mu(x) = mu0 + g.x`, `sigma(x) = sigma0 + h.x` (clamped at zero), with no
/// Taylor or edit remainder.
pub fn make_linear_model(g: Vec<f64>, h: Vec<f64>, mu0: f64, sigma0: f64) -> Result<ObjectiveModel> {
    if g.is_empty() {
        return Err(Error::invalid("g", "dimension must be at least 1"));
    }
    if g.len() != h.len() {
        return Err(Error::DimensionMismatch { expected: g.len(), got: h.len() });
    }
    if !(sigma0 > 0.0 && sigma0.is_finite()) {
        return Err(Error::invalid("sigma0", "must be positive and finite"));
    }
    if !mu0.is_finite() || g.iter().chain(&h).any(|c| !c.is_finite()) {
        return Err(Error::invalid("g/h/mu0", "must be finite"));
    }
    Ok(ObjectiveModel {
        dim: g.len(),
        field: Field::Linear {
            g: DVector::from_vec(g),
            h: DVector::from_vec(h),
            mu0,
            sigma0,
        },
        smoothness_bound: 0.0,
        validity_override: None,
    })
}

/// Nonlinear field with constant deviation `sigma0 >= 0`.
///
/// Smoothness bounds: quadratic `scale`; sinusoid sum `1/2 sum |a_k| w_k^2`;
/// Branin 18.5 (half the Frobenius bound on the Hessian over its natural box).
pub fn make_smooth_model(kind: SmoothKind, sigma0: f64) -> Result<ObjectiveModel> {
    if !(sigma0 >= 0.0 && sigma0.is_finite()) {
        return Err(Error::invalid("sigma0", "must be non-negative and finite"));
    }
    let (dim, bound) = match &kind {
        SmoothKind::Quadratic { center, scale } => {
            if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("center", "must be a non-empty finite vector"));
            }
            if !(*scale > 0.0 && scale.is_finite()) {
                return Err(Error::invalid("scale", "must be positive"));
            }
            (center.len(), *scale)
        }
        SmoothKind::SinusoidSum { terms } => {
            if terms.is_empty() {
                return Err(Error::invalid("terms", "need at least one sinusoid term"));
            }
            if terms
                .iter()
                .any(|t| !(t.amplitude.is_finite() && t.frequency.is_finite() && t.phase.is_finite()))
            {
                return Err(Error::invalid("terms", "must be finite"));
            }
            let c = 0.5 * terms.iter().map(|t| t.amplitude.abs() * t.frequency.powi(2)).sum::<f64>();
            (1, c)
        }
        SmoothKind::Branin => (2, 18.5),
    };
    Ok(ObjectiveModel {
        dim,
        field: Field::Smooth { kind, sigma0 },
        smoothness_bound: bound,
        validity_override: None,
    })
}

impl ObjectiveModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn smoothness_bound(&self) -> f64 {
        self.smoothness_bound
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.field, Field::Linear { .. })
    }

    pub fn smooth_kind(&self) -> Option<&SmoothKind> {
        match &self.field {
            Field::Smooth { kind, .. } => Some(kind),
            Field::Linear { .. } => None,
        }
    }

    /// Overrides the validity radius used by [`apply_edit`].
    pub fn with_validity_radius(mut self, eps0: f64) -> Result<Self> {
        if !(eps0 > 0.0) {
            return Err(Error::invalid("epsilon0", "must be positive"));
        }
        self.validity_override = Some(eps0);
        Ok(self)
    }

    fn check(&self, x: &DVector<f64>) {
        assert_eq!(x.len(), self.dim, "point dimension does not match the model");
    }

    pub fn mu_at(&self, x: &DVector<f64>) -> f64 {
        self.check(x);
        match &self.field {
            Field::Linear { g, mu0, .. } => mu0 + g.dot(x),
            Field::Smooth { kind, .. } => match kind {
                SmoothKind::Quadratic { center, scale } => {
                    -scale * x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>()
                }
                SmoothKind::SinusoidSum { terms } => terms
                    .iter()
                    .map(|t| t.amplitude * (t.frequency * x[0] + t.phase).sin())
                    .sum(),
                SmoothKind::Branin => {
                    let (b, c, t) = branin_consts();
                    let q = x[1] - b * x[0] * x[0] + c * x[0] - BRANIN_R;
                    -(BRANIN_A * q * q + BRANIN_S * (1.0 - t) * x[0].cos() + BRANIN_S)
                }
            },
        }
    }

    pub fn sigma_at(&self, x: &DVector<f64>) -> f64 {
        self.check(x);
        match &self.field {
            Field::Linear { h, sigma0, .. } => (sigma0 + h.dot(x)).max(0.0),
            Field::Smooth { sigma0, .. } => *sigma0,
        }
    }

    pub fn grad_mu_at(&self, x: &DVector<f64>) -> DVector<f64> {
        self.check(x);
        match &self.field {
            Field::Linear { g, .. } => g.clone(),
            Field::Smooth { kind, .. } => match kind {
                SmoothKind::Quadratic { center, scale } => {
                    DVector::from_iterator(self.dim, x.iter().zip(center).map(|(a, c)| -2.0 * scale * (a - c)))
                }
                SmoothKind::SinusoidSum { terms } => DVector::from_element(
                    1,
                    terms
                        .iter()
                        .map(|t| t.amplitude * t.frequency * (t.frequency * x[0] + t.phase).cos())
                        .sum(),
                ),
                SmoothKind::Branin => {
                    let (b, c, t) = branin_consts();
                    let q = x[1] - b * x[0] * x[0] + c * x[0] - BRANIN_R;
                    let d0 = 2.0 * BRANIN_A * q * (-2.0 * b * x[0] + c) - BRANIN_S * (1.0 - t) * x[0].sin();
                    let d1 = 2.0 * BRANIN_A * q;
                    DVector::from_vec(vec![-d0, -d1])
                }
            },
        }
    }

    pub fn grad_sigma_at(&self, x: &DVector<f64>) -> DVector<f64> {
        self.check(x);
        match &self.field {
            Field::Linear { h, sigma0, .. } => {
                if sigma0 + h.dot(x) > 0.0 {
                    h.clone()
                } else {
                    DVector::zeros(self.dim)
                }
            }
            Field::Smooth { .. } => DVector::zeros(self.dim),
        }
    }

    pub fn mu(&self, x: &EmbeddingPoint) -> f64 {
        self.mu_at(x.as_vector())
    }

    pub fn sigma(&self, x: &EmbeddingPoint) -> f64 {
        self.sigma_at(x.as_vector())
    }

    pub fn grad_mu(&self, x: &EmbeddingPoint) -> DVector<f64> {
        self.grad_mu_at(x.as_vector())
    }

    pub fn grad_sigma(&self, x: &EmbeddingPoint) -> DVector<f64> {
        self.grad_sigma_at(x.as_vector())
    }

    /// Validity radius of the edit at `x`: the override if set, otherwise
    /// `sigma(x) / (2 |h|)` when the deviation gradient is non-zero, else 1.
    pub fn validity_radius(&self, x: &EmbeddingPoint) -> f64 {
        if let Some(r) = self.validity_override {
            return r;
        }
        let h = self.grad_sigma(x).norm();
        if h > 0.0 {
            self.sigma(x) / (2.0 * h)
        } else {
            1.0
        }
    }

    /// Edit remainder `r(eps, u)`. Zero for the linear field; for smooth
    /// fields `C eps^2 / 2` times the cyclic shift of `u`.
    pub fn edit_remainder(&self, epsilon: f64, u: &UnitDirection) -> DVector<f64> {
        match self.field {
            Field::Linear { .. } => DVector::zeros(self.dim),
            Field::Smooth { .. } => {
                let d = u.dim();
                let coef = 0.5 * self.smoothness_bound * epsilon * epsilon;
                DVector::from_fn(d, |i, _| coef * u.coords()[(i + 1) % d])
            }
        }
    }

    /// Maximum of `mu` over a box: dense grid scan, then projected gradient
    /// refinement from the best grid cells.
    pub fn maximize_mu_on_box(&self, domain: &BoxDomain) -> Result<(DVector<f64>, f64)> {
        if domain.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: domain.dim() });
        }
        if let Field::Linear { g, .. } = &self.field {
            let x = DVector::from_fn(self.dim, |i, _| if g[i] >= 0.0 { domain.upper[i] } else { domain.lower[i] });
            let v = self.mu_at(&x);
            return Ok((x, v));
        }
        let per_axis = match self.dim {
            1 => 20_001,
            2 => 401,
            3 => 61,
            _ => 9,
        };
        let total = (per_axis as u64).saturating_pow(self.dim as u32).min(5_000_000) as usize;
        let mut grid: Vec<(f64, DVector<f64>)> = Vec::with_capacity(total);
        let mut idx = vec![0usize; self.dim];
        loop {
            let x = DVector::from_fn(self.dim, |i, _| {
                domain.lower[i] + (domain.upper[i] - domain.lower[i]) * idx[i] as f64 / (per_axis - 1) as f64
            });
            grid.push((self.mu_at(&x), x));
            let mut k = 0;
            while k < self.dim {
                idx[k] += 1;
                if idx[k] < per_axis {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == self.dim || grid.len() >= total {
                break;
            }
        }
        grid.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut best = (grid[0].1.clone(), grid[0].0);
        for (v0, x0) in grid.into_iter().take(8) {
            let (x, v) = self.refine(domain, x0, v0);
            if v > best.1 {
                best = (x, v);
            }
        }
        Ok(best)
    }

    fn refine(&self, domain: &BoxDomain, mut x: DVector<f64>, mut v: f64) -> (DVector<f64>, f64) {
        let mut step = 1e-2 * domain.diagonal();
        for _ in 0..2000 {
            let g = self.grad_mu_at(&x);
            if g.norm() < 1e-12 || step < 1e-14 {
                break;
            }
            let mut cand = &x + &g * (step / g.norm());
            domain.project(&mut cand);
            let cv = self.mu_at(&cand);
            if cv > v {
                x = cand;
                v = cv;
                step *= 1.5;
            } else {
                step *= 0.5;
            }
        }
        (x, v)
    }
}

/// `n` directions i.i.d. uniform on the unit sphere `S^{d-1}` (normalized
/// Gaussian vectors; a zero draw is redrawn).
pub fn sample_unit_sphere<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Vec<UnitDirection>> {
    if d < 1 {
        return Err(Error::invalid("d", "must be at least 1"));
    }
    if n < 1 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    Ok((0..n).map(|_| sample_direction(d, rng)).collect())
}

pub(crate) fn sample_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> UnitDirection {
    loop {
        let v = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-300 {
            return UnitDirection(v / norm);
        }
    }
}

/// First-order edit: `x + eps u + r(eps, u)`. A zero step returns `base`.
pub fn apply_edit(
    base: &EmbeddingPoint,
    epsilon: f64,
    direction: &UnitDirection,
    model: &ObjectiveModel,
) -> Result<EmbeddingPoint> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid("epsilon", "must be finite and non-negative"));
    }
    if base.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: base.dim() });
    }
    if direction.dim() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: direction.dim() });
    }
    if epsilon == 0.0 {
        return Ok(base.clone());
    }
    let eps0 = model.validity_radius(base);
    if epsilon > eps0 {
        return Err(Error::invalid(
            "epsilon",
            format!("step {epsilon} exceeds the validity radius {eps0}"),
        ));
    }
    let moved = base.as_vector() + direction.as_vector() * epsilon + model.edit_remainder(epsilon, direction);
    EmbeddingPoint::from_vector(moved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn fd(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>) -> DVector<f64> {
        let h = 1e-5;
        DVector::from_fn(x.len(), |i, _| {
            let mut p = x.clone();
            let mut m = x.clone();
            p[i] += h;
            m[i] -= h;
            (f(&p) - f(&m)) / (2.0 * h)
        })
    }

    #[test]
    fn linear_evaluation() {
        let m = make_linear_model(vec![1.0, 0.0], vec![0.0, 1.0], 0.0, 1.0).unwrap();
        let x = EmbeddingPoint::new(vec![2.0, 3.0]).unwrap();
        assert_eq!(m.mu(&x), 2.0);
        assert_eq!(m.sigma(&x), 4.0);
        assert_eq!(m.grad_mu(&x).as_slice(), &[1.0, 0.0]);
        assert_eq!(m.grad_sigma(&x).as_slice(), &[0.0, 1.0]);
        assert_eq!(m.smoothness_bound(), 0.0);
    }

    #[test]
    fn linear_rejects_bad_input() {
        assert!(make_linear_model(vec![1.0], vec![0.0], 0.0, 0.0).is_err());
        assert!(make_linear_model(vec![1.0], vec![0.0], 0.0, -1.0).is_err());
        assert!(matches!(
            make_linear_model(vec![1.0, 2.0], vec![0.0], 0.0, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_h_gives_zero_sigma_gradient() {
        let m = make_linear_model(vec![0.3, -0.2, 1.0], vec![0.0; 3], 1.0, 0.5).unwrap();
        let mut r = rng::stream(1);
        for _ in 0..50 {
            let x = EmbeddingPoint::from_vector(DVector::from_fn(3, |_, _| r.random_range(-5.0..5.0))).unwrap();
            assert_eq!(m.grad_sigma(&x).norm(), 0.0);
        }
    }

    #[test]
    fn linear_gradient_matches_finite_differences() {
        let m = make_linear_model(vec![0.7, -1.3], vec![0.1, 0.2], 0.5, 2.0).unwrap();
        let x = DVector::from_vec(vec![0.4, -0.9]);
        let diff = (m.grad_mu_at(&x) - fd(|p| m.mu_at(p), &x)).norm();
        assert!(diff < 1e-9, "{diff}");
    }

    #[test]
    fn smooth_gradients() {
        let q = make_smooth_model(SmoothKind::from_tag("quadratic", 2).unwrap(), 0.1).unwrap();
        let x = EmbeddingPoint::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(q.grad_mu(&x).as_slice(), &[-2.0, -2.0]);

        let s = make_smooth_model(
            SmoothKind::SinusoidSum {
                terms: vec![SinusoidTerm { amplitude: 1.0, frequency: 3.0, phase: 0.0 }],
            },
            0.0,
        )
        .unwrap();
        let z = EmbeddingPoint::new(vec![0.0]).unwrap();
        assert!((s.grad_mu(&z)[0] - 3.0).abs() < 1e-15);
        assert_eq!(s.smoothness_bound(), 4.5);
    }

    #[test]
    fn unknown_tag_is_rejected() {
        assert!(SmoothKind::from_tag("rosenbrock", 2).is_err());
    }

    #[test]
    fn branin_known_optimum() {
        let m = make_smooth_model(SmoothKind::Branin, 0.0).unwrap();
        let (_, v) = m.maximize_mu_on_box(&SmoothKind::Branin.natural_domain()).unwrap();
        assert!((v + 0.397887).abs() < 1e-5, "{v}");
    }

    #[test]
    fn sphere_in_one_dimension_is_plus_minus_one() {
        let mut r = rng::stream(3);
        let dirs = sample_unit_sphere(1, 4000, &mut r).unwrap();
        let pos = dirs.iter().filter(|u| u.coords()[0] == 1.0).count();
        assert!(dirs.iter().all(|u| u.coords()[0].abs() == 1.0));
        // binomial(4000, 1/2): sd ~ 32
        assert!((pos as i64 - 2000).abs() < 150, "{pos}");
    }

    #[test]
    fn sphere_rejects_bad_parameters() {
        let mut r = rng::stream(3);
        assert!(sample_unit_sphere(0, 5, &mut r).is_err());
        assert!(sample_unit_sphere(3, 0, &mut r).is_err());
    }

    #[test]
    fn linear_edit_has_no_remainder() {
        let m = make_linear_model(vec![1.0, 0.0], vec![0.0, 0.0], 0.0, 1.0).unwrap();
        let base = EmbeddingPoint::zeros(2);
        let u = UnitDirection::from_unit(DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let moved = apply_edit(&base, 0.1, &u, &m).unwrap();
        assert_eq!(moved.coords(), &[0.1, 0.0]);
        assert_eq!(apply_edit(&base, 0.0, &u, &m).unwrap(), base);
        assert!(apply_edit(&base, -0.1, &u, &m).is_err());
    }

    #[test]
    fn edit_beyond_validity_radius_is_rejected() {
        // sigma0 / (2 |h|) = 0.25
        let m = make_linear_model(vec![1.0, 0.0], vec![0.0, 1.0], 0.0, 0.5).unwrap();
        let base = EmbeddingPoint::zeros(2);
        let u = UnitDirection::from_unit(DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert!(apply_edit(&base, 0.2, &u, &m).is_ok());
        assert!(apply_edit(&base, 0.3, &u, &m).is_err());
        let m = m.with_validity_radius(1.0).unwrap();
        assert!(apply_edit(&base, 0.3, &u, &m).is_ok());
    }

    #[test]
    fn unit_direction_validation() {
        assert!(UnitDirection::from_unit(DVector::from_vec(vec![1.0, 1e-3])).is_err());
        assert!(UnitDirection::normalize(DVector::zeros(3)).is_err());
        let u = UnitDirection::normalize(DVector::from_vec(vec![3.0, 4.0])).unwrap();
        assert!((u.as_vector().norm() - 1.0).abs() < 1e-15);
    }
}

mod common;

use common::central_fd;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use tbon_core::gp::*;
use tbon_core::objective::{make_smooth_model, BoxDomain, SmoothKind};
use tbon_core::rng;

fn kernels() -> Vec<KernelSpec> {
    vec![
        KernelSpec::squared_exponential(0.7).unwrap(),
        KernelSpec::matern(1.5, 0.9).unwrap(),
        KernelSpec::matern(2.5, 0.8).unwrap(),
    ]
}

fn dataset(r: &mut impl Rng, n: usize, d: usize) -> (Vec<DVector<f64>>, Vec<f64>) {
    let xs: Vec<DVector<f64>> = (0..n).map(|_| DVector::from_fn(d, |_, _| r.random_range(-2.0..2.0))).collect();
    let ys = xs.iter().map(|x| x.iter().map(|c| c.sin()).sum::<f64>() + r.random_range(-0.1..0.1)).collect();
    (xs, ys)
}

/// Posterior by explicit dense inverse of `K + s2 I`.
fn dense_oracle(k: &KernelSpec, xs: &[DVector<f64>], ys: &[f64], s2: f64, x: &DVector<f64>) -> (f64, f64) {
    let n = xs.len();
    let gram = DMatrix::from_fn(n, n, |i, j| kernel_eval(k, &xs[i], &xs[j]).unwrap() + if i == j { s2 } else { 0.0 });
    let inv = gram.lu().try_inverse().unwrap();
    let kx = DVector::from_fn(n, |i, _| kernel_eval(k, x, &xs[i]).unwrap());
    let y = DVector::from_vec(ys.to_vec());
    let mean = kx.dot(&(&inv * y));
    let var = kernel_eval(k, x, x).unwrap() - kx.dot(&(&inv * &kx));
    (mean, var)
}

/// `K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt` by the trapezoid rule
/// (spectrally accurate for this integrand).
fn bessel_k(nu: f64, z: f64) -> f64 {
    let h: f64 = 1e-3;
    let mut sum = 0.5 * (-z).exp();
    let mut t: f64 = h;
    loop {
        let term = (-z * t.cosh()).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-300 || t > 50.0 {
            break;
        }
        t += h;
    }
    sum * h
}

#[test]
fn matern_closed_forms_match_bessel_definition() {
    let gamma = |nu: f64| if nu == 1.5 { std::f64::consts::PI.sqrt() / 2.0 } else { 3.0 * std::f64::consts::PI.sqrt() / 4.0 };
    for (nu, l) in [(1.5, 1.0), (2.5, 1.0), (1.5, 0.4), (2.5, 2.3)] {
        let spec = KernelSpec::matern(nu, l).unwrap();
        for i in 1..40 {
            let r = i as f64 * 0.1;
            let z = 2.0 * nu.sqrt() * r / l;
            let want = z.powf(nu) * bessel_k(nu, z) / (gamma(nu) * 2f64.powf(nu - 1.0));
            assert!((spec.of_distance(r) - want).abs() < 1e-10, "nu={nu} l={l} r={r}");
        }
    }
}

#[test]
fn kernel_examples() {
    let x = DVector::from_vec(vec![0.3, -0.1]);
    for k in kernels() {
        assert_eq!(kernel_eval(&k, &x, &x).unwrap(), 1.0);
        assert!(kernel_eval(&k, &x, &DVector::zeros(3)).is_err());
    }
    let se = KernelSpec::squared_exponential(1.0).unwrap();
    let v = kernel_eval(&se, &DVector::from_vec(vec![0.0]), &DVector::from_vec(vec![1.0])).unwrap();
    assert!((v - 0.6065).abs() < 1e-4);
    let mut r = rng::stream(1);
    for k in kernels() {
        for _ in 0..100 {
            let a = DVector::from_fn(3, |_, _| r.random_range(-1.0..1.0));
            let b = DVector::from_fn(3, |_, _| r.random_range(-1.0..1.0));
            assert_eq!(kernel_eval(&k, &a, &b).unwrap(), kernel_eval(&k, &b, &a).unwrap());
        }
    }
    assert!(KernelSpec::matern(0.5, 1.0).is_err());
    assert!(KernelSpec::squared_exponential(0.0).is_err());
}

#[test]
fn posterior_matches_dense_solve() {
    let mut r = rng::stream(2);
    for k in kernels() {
        for _ in 0..5 {
            let n = r.random_range(5..25);
            let (xs, ys) = dataset(&mut r, n, 2);
            let s2 = 0.05;
            let post = fit_posterior(k, xs.clone(), ys.clone(), s2).unwrap();
            for _ in 0..20 {
                let x = DVector::from_fn(2, |_, _| r.random_range(-2.5..2.5));
                let (m, v) = posterior_mean_var(&post, &x).unwrap();
                let (om, ov) = dense_oracle(&k, &xs, &ys, s2, &x);
                assert!((m - om).abs() < 1e-8, "{m} vs {om}");
                assert!((v - ov.max(0.0)).abs() < 1e-8, "{v} vs {ov}");
            }
        }
    }
}

#[test]
fn factor_reconstructs_gram() {
    let mut r = rng::stream(3);
    for k in kernels() {
        let (xs, ys) = dataset(&mut r, 15, 3);
        let post = fit_posterior(k, xs.clone(), ys, 0.1).unwrap();
        let l = post.factor().unwrap();
        let gram = DMatrix::from_fn(15, 15, |i, j| {
            kernel_eval(&k, &xs[i], &xs[j]).unwrap() + if i == j { 0.1 + post.jitter() } else { 0.0 }
        });
        assert!((&l * l.transpose() - &gram).norm() <= 1e-8 * gram.norm());
    }
}

#[test]
fn one_point_example() {
    let x0 = DVector::from_vec(vec![0.4]);
    let post = fit_posterior(KernelSpec::squared_exponential(1.0).unwrap(), vec![x0.clone()], vec![1.0], 0.25).unwrap();
    assert!((posterior_mean_var(&post, &x0).unwrap().0 - 0.8).abs() < 1e-12);
}

#[test]
fn near_interpolation() {
    let xs: Vec<DVector<f64>> = (0..6).map(|i| DVector::from_vec(vec![i as f64 * 0.8])).collect();
    let ys = vec![0.3, -1.0, 2.0, 0.5, 0.0, 1.2];
    for k in kernels() {
        let post = fit_posterior(k, xs.clone(), ys.clone(), 1e-12).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((posterior_mean_var(&post, x).unwrap().0 - y).abs() < 1e-4);
        }
    }
}

#[test]
fn variance_never_exceeds_prior() {
    let mut r = rng::stream(4);
    for k in kernels() {
        let (xs, ys) = dataset(&mut r, 20, 2);
        let post = fit_posterior(k, xs, ys, 0.01).unwrap();
        for _ in 0..1000 {
            let x = DVector::from_fn(2, |_, _| r.random_range(-3.0..3.0));
            let (_, v) = posterior_mean_var(&post, &x).unwrap();
            assert!(v >= 0.0 && v <= kernel_eval(&k, &x, &x).unwrap() + 1e-12);
        }
    }
}

#[test]
fn prior_and_exploitation_limits() {
    let post = fit_posterior(KernelSpec::squared_exponential(0.5).unwrap(), vec![], vec![], 0.1).unwrap();
    let x = DVector::from_vec(vec![0.2, 0.9]);
    assert_eq!(ucb_value(&post, &x, 1.7).unwrap(), 1.7);

    let mut r = rng::stream(5);
    let (xs, ys) = dataset(&mut r, 10, 2);
    let post = fit_posterior(KernelSpec::squared_exponential(0.5).unwrap(), xs, ys, 0.1).unwrap();
    assert_eq!(ucb_value(&post, &x, 0.0).unwrap(), posterior_mean_var(&post, &x).unwrap().0);
    let far = DVector::from_vec(vec![50.0, 50.0]);
    let (m, v) = posterior_mean_var(&post, &far).unwrap();
    assert!(m.abs() < 1e-12 && (v - 1.0).abs() < 1e-12);
}

#[test]
fn ucb_gradient_matches_finite_differences() {
    let mut r = rng::stream(6);
    for k in kernels() {
        let (xs, ys) = dataset(&mut r, 12, 2);
        let post = fit_posterior(k, xs, ys, 0.05).unwrap();
        let mut checked = 0;
        while checked < 100 {
            let x = DVector::from_fn(2, |_, _| r.random_range(-2.0..2.0));
            if posterior_mean_var(&post, &x).unwrap().1 <= 1e-6 {
                continue;
            }
            let g = ucb_grad(&post, &x, 2.0).unwrap();
            let fd = central_fd(|p| ucb_value(&post, p, 2.0).unwrap(), &x, 1e-5);
            assert!((&g - &fd).norm() <= 1e-5 * (1.0 + fd.norm()), "{k:?} at {x}: {g} vs {fd}");
            checked += 1;
        }
    }
}

#[test]
fn ascent_beats_dense_grid() {
    let x0 = DVector::from_vec(vec![0.3]);
    let post = fit_posterior(KernelSpec::squared_exponential(0.2).unwrap(), vec![x0], vec![1.5], 1e-4).unwrap();
    let dom = BoxDomain::new(vec![0.0], vec![1.0]).unwrap();
    let beta = 1.0;
    let found = multistart_ascent(&post, beta, &dom, 16, &AscentOptions::default(), &mut rng::stream(7)).unwrap();
    let best = found[0].value;
    let grid_max = (0..1000)
        .map(|i| ucb_value(&post, &DVector::from_vec(vec![i as f64 / 999.0]), beta).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(best >= grid_max - 1e-6, "{best} vs {grid_max}");
    for m in &found {
        assert!(m.value >= m.start_value);
        assert!(dom.contains(&m.point));
    }
}

#[test]
fn loops_record_consistent_regret() {
    let kind = SmoothKind::from_tag("sinusoid", 1).unwrap();
    let dom = kind.natural_domain();
    let f = make_smooth_model(kind, 0.0).unwrap();
    let cfg = GpUcbConfig {
        iterations: 12,
        noise_sd: 0.1,
        kernel: KernelSpec::squared_exponential(0.3).unwrap(),
        schedule: UcbSchedule::Constant(2.0),
        domain: dom.clone(),
        n_starts: 8,
        ascent: AscentOptions::default(),
    };
    let a = gp_ucb_loop(&f, &cfg, &mut rng::stream(8)).unwrap();
    let b = gp_ucb_loop(&f, &cfg, &mut rng::stream(8)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 12);
    assert!(a.cumulative_regret.windows(2).all(|w| w[1] >= w[0]));
    assert!(a.simple_regret.windows(2).all(|w| w[1] <= w[0]));
    let rs = random_search_loop(&f, 12, 0.1, &dom, &mut rng::stream(8)).unwrap();
    rs.check_invariants().unwrap();
}

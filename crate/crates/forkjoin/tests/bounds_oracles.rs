//! Independent numerical oracles for the bounds module: adaptive quadrature
//! of the bound tail against the harmonic closed form, and the empirical-F
//! route against the analytic one.

use forkjoin::bounds::{
    asymptotic_mean_mm1, evaluation_grid, independence_ccdf, TaskDelayCdf,
};
use forkjoin::model::ServiceDistribution;
use forkjoin::rng::StreamFactory;
use forkjoin::sim::simulate_single_queue;

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
}

#[test]
fn quadrature_of_bound_tail_equals_harmonic_mean() {
    // E[max of k iid Exp(mu - lambda)] = integral of 1 - F^k
    //                                  = H_k / (mu - lambda).
    let (lambda, mu) = (2.0 / 3.0, 1.0);
    let f = TaskDelayCdf::analytic_mm1(lambda, mu).unwrap();
    for k in [1usize, 2, 4, 8, 32] {
        // Truncate where the integrand falls below 1e-14 of the mean, with
        // the geometric tail bound k e^{-a tau} / a added back.
        let a = mu - lambda;
        let upper = ((k as f64) * 1e15).ln() / a;
        let integral = adaptive_simpson(
            &|tau| independence_ccdf(&f, k, tau),
            0.0,
            upper,
            1e-10,
        ) + k as f64 * (-a * upper).exp() / a;
        let closed = asymptotic_mean_mm1(k, lambda, mu).unwrap();
        assert!(
            (integral - closed).abs() <= 1e-6 * closed,
            "k={k}: quadrature {integral} vs closed {closed}"
        );
    }
}

#[test]
fn monte_carlo_mean_of_max_of_eight() {
    use rand::Rng;
    let mut rng = StreamFactory::new(2024).stream(0);
    let trials = 1_000_000;
    let mut sum = 0.0;
    for _ in 0..trials {
        let m = (0..8)
            .map(|_| {
                let u: f64 = rng.gen();
                -(-u).ln_1p() * 3.0
            })
            .fold(0.0f64, f64::max);
        sum += m;
    }
    let mc = sum / trials as f64;
    let closed = asymptotic_mean_mm1(8, 2.0 / 3.0, 1.0).unwrap();
    assert!((mc - closed).abs() < 0.01 * closed, "MC {mc} vs {closed}");
}

#[test]
fn empirical_f_bound_matches_analytic_bound_uniformly() {
    let (lambda, mu, k) = (2.0 / 3.0, 1.0, 4usize);
    let svc = ServiceDistribution::exponential(mu).unwrap();
    let mut stream = StreamFactory::new(99).stream(0);
    let sojourns = simulate_single_queue(lambda, &svc, 1_250_000, &mut stream).unwrap();
    let empirical = TaskDelayCdf::empirical(sojourns).unwrap();
    let analytic = TaskDelayCdf::analytic_mm1(lambda, mu).unwrap();
    let grid = evaluation_grid(&analytic, k);
    for &tau in &grid {
        let e = independence_ccdf(&empirical, k, tau);
        let a = independence_ccdf(&analytic, k, tau);
        assert!((e - a).abs() < 0.01, "tau {tau}: empirical {e} analytic {a}");
    }
}

#[test]
fn analytic_task_cdf_matches_simulated_queue() {
    let (lambda, mu) = (2.0 / 3.0, 1.0);
    let svc = ServiceDistribution::exponential(mu).unwrap();
    let mut stream = StreamFactory::new(5).stream(0);
    let mut sojourns = simulate_single_queue(lambda, &svc, 1_250_000, &mut stream).unwrap();
    sojourns.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sojourns.len() as f64;
    let analytic = TaskDelayCdf::analytic_mm1(lambda, mu).unwrap();
    let mut ks = 0.0f64;
    for (i, &x) in sojourns.iter().enumerate() {
        let f = analytic.eval(x);
        ks = ks.max((f - i as f64 / n).abs());
        ks = ks.max(((i + 1) as f64 / n - f).abs());
    }
    assert!(ks < 0.005, "Kolmogorov distance {ks}");
}

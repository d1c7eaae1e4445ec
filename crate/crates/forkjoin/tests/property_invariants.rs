//! Property tests for the closed-form layer.

use num::ToPrimitive;
use proptest::prelude::*;

use forkjoin::bounds::{harmonic, independence_ccdf, TaskDelayCdf};
use forkjoin::combinatorics::{
    binomial_exact, lambda_tilde_rational, ln_binomial, p_select_le1, Rational,
};
use forkjoin::metrics::rebatch;

proptest! {
    #[test]
    fn binomial_symmetry_and_pascal(a in 0u64..40, b in 0u64..40) {
        let c = binomial_exact(a, b);
        if b <= a {
            prop_assert_eq!(c.clone(), binomial_exact(a, a - b));
        }
        if a >= 1 && b >= 1 {
            prop_assert_eq!(
                c,
                binomial_exact(a - 1, b - 1) + binomial_exact(a - 1, b)
            );
        }
    }

    #[test]
    fn log_binomial_tracks_exact(a in 0u64..200, b in 0u64..200) {
        let exact = binomial_exact(a, b).to_f64().unwrap();
        let log = ln_binomial(a, b);
        if b > a {
            prop_assert_eq!(log, f64::NEG_INFINITY);
        } else {
            prop_assert!((log.exp() - exact).abs() <= 1e-11 * exact.max(1.0));
        }
    }

    #[test]
    fn selection_probability_is_a_probability(n in 1usize..40, frac in 0.0f64..1.0) {
        let k = (1.0 + frac * (n as f64 - 1.0)).floor() as usize;
        let p = p_select_le1(n, k);
        // p can be exactly 0: with n - k < k - 1 a job cannot place k - 1
        // tasks outside the first k queues.
        prop_assert!(p >= Rational::from_integer(0.into()));
        prop_assert!(p <= Rational::from_integer(1.into()));
        // p = 1 exactly when two hits on the first k are impossible.
        prop_assert_eq!(p == Rational::from_integer(1.into()), k == 1);
    }

    #[test]
    fn thinned_rate_is_dominated(n in 1usize..40, frac in 0.0f64..1.0) {
        let k = (1.0 + frac * (n as f64 - 1.0)).floor() as usize;
        let lambda = Rational::new(2.into(), 3.into());
        let lt = lambda_tilde_rational(n, k, &lambda);
        prop_assert!(lt <= lambda);
        prop_assert!(lt > Rational::from_integer(0.into()));
    }

    #[test]
    fn harmonic_is_increasing_and_bounded(m in 1u64..5_000) {
        let h = harmonic(m);
        prop_assert!(h >= 1.0);
        prop_assert!(h < harmonic(m + 1));
        // ln m < H_m <= ln m + 1
        prop_assert!(h > (m as f64).ln());
        prop_assert!(h <= (m as f64).ln() + 1.0);
    }

    #[test]
    fn bound_ccdf_is_monotone_in_tau_and_k(
        lambda in 0.01f64..0.95,
        k in 1usize..64,
        tau in 0.0f64..50.0,
    ) {
        let f = TaskDelayCdf::analytic_mm1(lambda, 1.0).unwrap();
        let v = independence_ccdf(&f, k, tau);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(v <= independence_ccdf(&f, k, tau * 0.9) + 1e-12);
        prop_assert!(v <= independence_ccdf(&f, k + 1, tau) + 1e-12);
        // union bound
        prop_assert!(v <= k as f64 * (1.0 - f.eval(tau)) + 1e-12);
    }

    #[test]
    fn empirical_cdf_round_trips_quantiles(
        mut xs in prop::collection::vec(0.0f64..100.0, 10..200),
        p in 0.01f64..0.99,
    ) {
        let f = TaskDelayCdf::empirical(xs.clone()).unwrap();
        let q = f.quantile(p);
        prop_assert!(f.eval(q) >= p - 1e-12);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert!(q >= xs[0] && q <= xs[xs.len() - 1]);
    }

    #[test]
    fn rebatch_preserves_every_sample(xs in prop::collection::vec(0.0f64..10.0, 1..5_000)) {
        let batches = rebatch(xs.clone());
        let total: usize = batches.iter().map(Vec::len).sum();
        prop_assert_eq!(total, xs.len());
        prop_assert!(batches.len() <= 30);
        let flat: Vec<f64> = batches.into_iter().flatten().collect();
        prop_assert_eq!(flat, xs);
    }
}

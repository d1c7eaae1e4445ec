//! Exhaustive-enumeration oracles for the closed-form subset probabilities.
//!
//! Every k-subset of n servers is equally likely, so each formula below can
//! be recomputed by walking all C(n, k) subsets and counting in exact
//! rationals. The oracles here are independent of the library's arithmetic
//! path: they touch each subset explicitly.

use num::bigint::BigInt;
use num::{One, ToPrimitive, Zero};

use forkjoin::combinatorics::{
    binomial_exact, lambda_tilde, lambda_tilde_rational, p_select_le1, p_select_ge1, Rational,
};
use forkjoin::rng::StreamFactory;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Visit every k-subset of {0..n-1} as a bitmask.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(u128)) {
    // Gosper's hack; u128 masks so n = 64 fits.
    if k == 0 {
        visit(0);
        return;
    }
    let limit = 1u128 << n;
    let mut mask = (1u128 << k) - 1;
    while mask < limit {
        visit(mask);
        let c = mask & mask.wrapping_neg();
        let r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
}

#[test]
fn subset_walker_counts_match_binomials() {
    for n in 1..=12usize {
        for k in 1..=n {
            let mut count = 0u64;
            for_each_subset(n, k, |_| count += 1);
            assert_eq!(BigInt::from(count), binomial_exact(n as u64, k as u64));
        }
    }
}

#[test]
fn p_select_le1_matches_enumeration_for_all_n_up_to_12() {
    for n in 1..=12usize {
        for k in 1..=n {
            let first_k = (1u128 << k) - 1;
            let mut hits = 0u64;
            let mut total = 0u64;
            for_each_subset(n, k, |mask| {
                total += 1;
                if (mask & first_k).count_ones() <= 1 {
                    hits += 1;
                }
            });
            let oracle = rat(hits as i64, total as i64);
            assert_eq!(p_select_le1(n, k), oracle, "n={n} k={k}");
        }
    }
}

#[test]
fn p_select_le1_example_4_2_is_five_sixths() {
    // Of the 6 pairs from 4 servers only {0,1} hits both of the first two.
    assert_eq!(p_select_le1(4, 2), rat(5, 6));
}

#[test]
fn p_select_le1_16_4_matches_enumeration() {
    let first_k = 0b1111u128;
    let mut hits = 0u64;
    let mut total = 0u64;
    for_each_subset(16, 4, |mask| {
        total += 1;
        if (mask & first_k).count_ones() <= 1 {
            hits += 1;
        }
    });
    assert_eq!(total, 1820);
    assert_eq!(p_select_le1(16, 4), rat(hits as i64, total as i64));
}

#[test]
fn overlap_complement_is_exact() {
    // p + (1 - p) = 1 exactly, and 1 - p equals the enumeration frequency of
    // ">= 2 of the first k selected".
    for n in 1..=12usize {
        for k in 1..=n {
            let p = p_select_le1(n, k);
            let complement = Rational::one() - &p;
            assert_eq!(&p + &complement, Rational::one());
            let first_k = (1u128 << k) - 1;
            let mut overlap2 = 0u64;
            let mut total = 0u64;
            for_each_subset(n, k, |mask| {
                total += 1;
                if (mask & first_k).count_ones() >= 2 {
                    overlap2 += 1;
                }
            });
            assert_eq!(complement, rat(overlap2 as i64, total as i64));
        }
    }
}

/// Rate of surviving tasks at queue 0 in the coupled system, by enumeration:
/// a job keeps its queue-0 task when queue 0 is its only pick among the
/// first k, or with probability 1/m when it picked m >= 2 of them.
fn lambda_tilde_enumeration(n: usize, k: usize, lambda: &Rational) -> Rational {
    let job_rate = Rational::from_integer(BigInt::from(n as u64)) * lambda
        / Rational::from_integer(BigInt::from(k as u64));
    let first_k = (1u128 << k) - 1;
    let mut kept = Rational::zero();
    let mut total = 0u64;
    for_each_subset(n, k, |mask| {
        total += 1;
        if mask & 1 == 1 {
            let m = (mask & first_k).count_ones() as i64;
            kept += rat(1, m.max(1));
        }
    });
    job_rate * kept / Rational::from_integer(BigInt::from(total))
}

#[test]
fn lambda_tilde_matches_enumeration_for_all_n_up_to_12() {
    let lambda = rat(2, 3);
    for n in 1..=12usize {
        for k in 1..=n {
            let formula = lambda_tilde_rational(n, k, &lambda);
            let oracle = lambda_tilde_enumeration(n, k, &lambda);
            assert_eq!(formula, oracle, "n={n} k={k}");
        }
    }
}

#[test]
fn lambda_tilde_64_4_exact_and_monte_carlo() {
    let lambda = rat(2, 3);
    let exact = lambda_tilde_rational(64, 4, &lambda);
    // Exhaustive enumeration of all C(64,4) = 635376 subsets.
    let oracle = lambda_tilde_enumeration(64, 4, &lambda);
    assert_eq!(exact, oracle);
    let exact_f = exact.to_f64().unwrap();
    let formula_f = lambda_tilde(64, 4, 2.0 / 3.0);
    assert!((exact_f - formula_f).abs() < 1e-12 * exact_f);

    // Monte-Carlo thinning: sample subsets, keep-probability of queue 0,
    // times Lambda / k. Statistical tolerance at 4 sigma.
    use rand::Rng;
    let mut rng = StreamFactory::new(123).stream(0);
    let draws = 10_000_000u64;
    let mut kept = 0u64;
    for _ in 0..draws {
        // Sample a 4-subset of 64 by rejection; cheap at k << n.
        let mut picks = [u32::MAX; 4];
        let mut filled = 0;
        while filled < 4 {
            let c = rng.gen_range(0..64u32);
            if !picks[..filled].contains(&c) {
                picks[filled] = c;
                filled += 1;
            }
        }
        if picks.contains(&0) {
            let m = picks.iter().filter(|&&q| q < 4).count() as u64;
            // Keep with probability 1/m: uniform draw over the colliders.
            if m <= 1 || rng.gen_range(0..m) == 0 {
                kept += 1;
            }
        }
    }
    let job_rate = 64.0 * (2.0 / 3.0) / 4.0;
    let mc = job_rate * kept as f64 / draws as f64;
    // kept-fraction variance <= p(1-p)/draws with p ~ k/n.
    let p = kept as f64 / draws as f64;
    let sigma = job_rate * (p * (1.0 - p) / draws as f64).sqrt();
    assert!(
        (mc - exact_f).abs() < 4.0 * sigma,
        "MC {mc} vs exact {exact_f} (sigma {sigma})"
    );
}

#[test]
fn p_select_ge1_is_the_threshold_branch() {
    // For k > n/2 a job always hits the first k.
    for n in 2..=12usize {
        for k in (n / 2 + 1)..=n {
            assert_eq!(p_select_ge1(n, k), Rational::one(), "n={n} k={k}");
        }
    }
    assert_eq!(p_select_ge1(6, 2), rat(3, 5));
}

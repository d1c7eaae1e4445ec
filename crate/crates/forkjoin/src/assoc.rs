//! Exact verification of the association argument behind the independence
//! upper bound.
//!
//! Observing the system at job arrivals plus the jumps of an independent
//! rate-beta Poisson process turns the per-observation arrival indicator of
//! the first k queues into a vector `A` in {0,1}^k. With probability
//! `Lambda / (Lambda + beta)` the observation carries a job whose k-subset
//! of servers is uniform; otherwise nothing arrives. This module builds that
//! distribution in exact rationals, enumerates every monotone boolean
//! function on up to 5 inputs, and brute-forces the association inequality
//! `E[f(A) g(A)] >= E[f(A)] E[g(A)]` over all pairs.

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use rayon::prelude::*;

use crate::combinatorics::{binomial_exact, p_select_ge1, Rational};
use crate::error::Error;

/// Exact law of the arrival-indicator vector under Poisson oversampling.
///
/// Pattern `a` (a k-bit mask, bit i set when queue i receives a task) with
/// `m = |a| > 0` has probability
/// `(Lambda/(Lambda+beta)) * C(n-k, k-m) / C(n, k)`;
/// the all-zero pattern absorbs `beta/(Lambda+beta)` plus the mass of jobs
/// that miss the first k queues entirely.
#[derive(Debug, Clone)]
pub struct ArrivalPatternDist {
    pub n: usize,
    pub k: usize,
    pub job_rate: Rational,
    pub oversampling_rate: Rational,
    /// Integer weights over all 2^k patterns; probability = weight / denom.
    weights: Vec<BigInt>,
    denom: BigInt,
}

impl ArrivalPatternDist {
    pub fn probability(&self, pattern: u32) -> Rational {
        Rational::new(self.weights[pattern as usize].clone(), self.denom.clone())
    }

    /// Exact marginal `P(A_i = 1)`; the same for every i by symmetry.
    pub fn marginal(&self) -> Rational {
        let mut onb = BigInt::zero();
        for (pattern, w) in self.weights.iter().enumerate() {
            if pattern & 1 == 1 {
                onb += w;
            }
        }
        Rational::new(onb, self.denom.clone())
    }

    fn total_weight_of(&self, mask_filter: impl Fn(u32) -> bool) -> BigInt {
        let mut acc = BigInt::zero();
        for (pattern, w) in self.weights.iter().enumerate() {
            if mask_filter(pattern as u32) {
                acc += w;
            }
        }
        acc
    }
}

/// Build the exact pattern distribution for `n, k, Lambda, beta`.
pub fn arrival_pattern_dist(
    n: usize,
    k: usize,
    job_rate: &Rational,
    oversampling_rate: &Rational,
) -> Result<ArrivalPatternDist, Error> {
    if k == 0 || k > n {
        return Err(Error::TaskCountOutOfRange { n, k });
    }
    if job_rate <= &Rational::zero() || oversampling_rate < &Rational::zero() {
        return Err(Error::Invalid(
            "need Lambda > 0 and beta >= 0".to_string(),
        ));
    }
    // r = Lambda / (Lambda + beta) as a reduced fraction rn / rd.
    let r = job_rate.clone() / (job_rate + oversampling_rate);
    let (rn, rd) = (r.numer().clone(), r.denom().clone());
    let total = binomial_exact(n as u64, k as u64);
    // Weight of pattern a with |a| = m: rn * C(n-k, k-m); all-zero adds the
    // no-arrival mass (rd - rn) * C(n, k). Common denominator rd * C(n, k).
    let mut weights = vec![BigInt::zero(); 1 << k];
    for (pattern, w) in weights.iter_mut().enumerate() {
        let m = (pattern as u32).count_ones() as u64;
        *w = &rn * binomial_exact((n - k) as u64, k as u64 - m);
        if pattern == 0 {
            *w += (&rd - &rn) * &total;
        }
    }
    let denom = rd * total;
    debug_assert_eq!(
        weights.iter().sum::<BigInt>(),
        denom,
        "pattern weights must sum to the common denominator"
    );
    Ok(ArrivalPatternDist {
        n,
        k,
        job_rate: job_rate.clone(),
        oversampling_rate: oversampling_rate.clone(),
        weights,
        denom,
    })
}

/// A binary function on {0,1}^k stored as a 2^k-bit truth table, monotone
/// under the entrywise partial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MonotoneBooleanFunction {
    pub k: usize,
    pub table: u32,
}

impl MonotoneBooleanFunction {
    #[inline]
    pub fn eval(&self, pattern: u32) -> bool {
        self.table >> pattern & 1 == 1
    }

    pub fn is_constant(&self) -> bool {
        let full = full_table(self.k);
        self.table == 0 || self.table == full
    }

    pub fn is_monotone(&self) -> bool {
        let points = 1u32 << self.k;
        for a in 0..points {
            for bit in 0..self.k as u32 {
                if a & (1 << bit) == 0 {
                    let b = a | (1 << bit);
                    if self.eval(a) && !self.eval(b) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn full_table(k: usize) -> u32 {
    if 1 << k == 32 {
        u32::MAX
    } else {
        (1u32 << (1 << k)) - 1
    }
}

/// All monotone boolean functions on k inputs, ascending by truth table.
///
/// Built recursively: f on k inputs splits into restrictions (f0, f1) on
/// k - 1 inputs with f0 <= f1 pointwise, so the count is the Dedekind number
/// M(k): 3, 6, 20, 168, 7581 for k = 1..5.
pub fn enumerate_monotone_functions(k: usize) -> Result<Vec<MonotoneBooleanFunction>, Error> {
    if k == 0 || k > 5 {
        return Err(Error::EnumerationTooWide { k });
    }
    let mut tables: Vec<u32> = vec![0b0, 0b1]; // the two functions on 0 inputs
    for level in 1..=k {
        let half_bits = 1u32 << (level - 1);
        let mut next = Vec::new();
        for &low in &tables {
            for &high in &tables {
                // low <= high pointwise
                if low & !high == 0 {
                    next.push(low | (high << half_bits));
                }
            }
        }
        next.sort_unstable();
        tables = next;
    }
    Ok(tables
        .into_iter()
        .map(|table| MonotoneBooleanFunction { k, table })
        .collect())
}

/// Outcome of the exhaustive association check.
#[derive(Debug, Clone)]
pub struct AssociationVerdict {
    pub associated: bool,
    pub counterexample: Option<Counterexample>,
    /// Ordered pairs actually tested.
    pub pairs_checked: u64,
}

/// A violating pair with both sides of the inequality, exact.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub f: MonotoneBooleanFunction,
    pub g: MonotoneBooleanFunction,
    /// `E[f g]`
    pub lhs: Rational,
    /// `E[f] E[g]`
    pub rhs: Rational,
}

impl Counterexample {
    /// `E[f g] - E[f] E[g]`, negative by construction.
    pub fn gap(&self) -> Rational {
        self.lhs.clone() - self.rhs.clone()
    }
}

/// Exhaustively test `E[f g] >= E[f] E[g]` over all pairs of monotone
/// boolean functions on the pattern distribution, in exact arithmetic.
///
/// Constant functions satisfy the inequality with equality and are skipped;
/// the inequality is symmetric in (f, g), so only ordered pairs f <= g are
/// checked. When violations exist, the lexicographically first pair (by
/// truth table) is reported, independent of worker count.
pub fn check_association(dist: &ArrivalPatternDist) -> Result<AssociationVerdict, Error> {
    let functions = enumerate_monotone_functions(dist.k)?;
    let candidates: Vec<MonotoneBooleanFunction> = functions
        .into_iter()
        .filter(|f| !f.is_constant())
        .collect();

    // E[f] = sum of weights where f(a) = 1, over the common denominator D.
    // The inequality E[fg] >= E[f] E[g] becomes D * S_fg >= S_f * S_g in
    // integers.
    let sums: Vec<BigInt> = candidates
        .iter()
        .map(|f| dist.total_weight_of(|a| f.eval(a)))
        .collect();
    let denom = dist.denom.clone();

    let pairs_total: u64 = (candidates.len() as u64) * (candidates.len() as u64 + 1) / 2;
    let first_violation = (0..candidates.len())
        .into_par_iter()
        .filter_map(|i| {
            let f = candidates[i];
            for j in i..candidates.len() {
                let g = candidates[j];
                let s_fg = dist.total_weight_of(|a| f.eval(a) && g.eval(a));
                if &denom * &s_fg < &sums[i] * &sums[j] {
                    return Some((i, j, s_fg));
                }
            }
            None
        })
        .min_by_key(|&(i, j, _)| (i, j));

    match first_violation {
        None => Ok(AssociationVerdict {
            associated: true,
            counterexample: None,
            pairs_checked: pairs_total,
        }),
        Some((i, j, s_fg)) => {
            let lhs = Rational::new(s_fg, denom.clone());
            let rhs = Rational::new(&sums[i] * &sums[j], &denom * &denom);
            debug_assert!(lhs < rhs);
            Ok(AssociationVerdict {
                associated: false,
                counterexample: Some(Counterexample {
                    f: candidates[i],
                    g: candidates[j],
                    lhs,
                    rhs,
                }),
                pairs_checked: pairs_total,
            })
        }
    }
}

/// The oversampling rate that makes the pattern vector associated:
/// `beta >= Lambda (C(n, k) p^2 - 1)` with `p = 1` for `k > n/2` and
/// `p = (C(n,k) - C(n-k,k)) / C(n,k)` otherwise; clamped at zero.
pub fn beta_threshold(n: usize, k: usize, job_rate: &Rational) -> Rational {
    assert!(k >= 1 && k <= n);
    let p = if 2 * k > n {
        Rational::one()
    } else {
        p_select_ge1(n, k)
    };
    let total = Rational::from_integer(binomial_exact(n as u64, k as u64));
    let raw = job_rate * (total * &p * &p - Rational::one());
    if raw.is_negative() {
        Rational::zero()
    } else {
        raw
    }
}

/// Exact pairwise covariances `Cov(A_i, A_j)` for i < j. Nonnegative
/// pairwise covariance is a cheap necessary condition for association.
pub fn covariance_check(dist: &ArrivalPatternDist) -> Vec<((usize, usize), Rational)> {
    let denom = Rational::from_integer(dist.denom.clone());
    let mut out = Vec::new();
    for i in 0..dist.k {
        for j in (i + 1)..dist.k {
            let both = Rational::from_integer(
                dist.total_weight_of(|a| a & (1 << i) != 0 && a & (1 << j) != 0),
            ) / denom.clone();
            let pi = Rational::from_integer(dist.total_weight_of(|a| a & (1 << i) != 0))
                / denom.clone();
            let pj = Rational::from_integer(dist.total_weight_of(|a| a & (1 << j) != 0))
                / denom.clone();
            out.push(((i, j), both - pi * pj));
        }
    }
    out
}

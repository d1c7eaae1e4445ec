//! Binomial coefficients and the subset-overlap probabilities built on them.
//!
//! Everything that feeds an exact verdict (the association checker, the
//! balance probabilities, unit oracles) runs on arbitrary-precision
//! rationals. Large-system sweeps use the log-space path instead, which
//! never overflows.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, ToPrimitive, Zero};

pub type Rational = Ratio<BigInt>;

/// Arithmetic backing for binomial evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithmeticMode {
    Exact,
    LogSpace,
}

/// Shared (n, k) context with a chosen arithmetic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CombinatorialContext {
    pub n: usize,
    pub k: usize,
    pub mode: ArithmeticMode,
}

/// A binomial coefficient in whichever representation the context picked.
#[derive(Debug, Clone, PartialEq)]
pub enum Binomial {
    Exact(BigInt),
    /// Natural log of the coefficient; `f64::NEG_INFINITY` encodes zero.
    Log(f64),
}

impl Binomial {
    pub fn to_f64(&self) -> f64 {
        match self {
            Binomial::Exact(v) => v.to_f64().unwrap_or(f64::INFINITY),
            Binomial::Log(l) => l.exp(),
        }
    }
}

impl CombinatorialContext {
    pub fn new(n: usize, k: usize, mode: ArithmeticMode) -> Self {
        CombinatorialContext { n, k, mode }
    }

    pub fn binomial(&self, a: u64, b: u64) -> Binomial {
        match self.mode {
            ArithmeticMode::Exact => Binomial::Exact(binomial_exact(a, b)),
            ArithmeticMode::LogSpace => Binomial::Log(ln_binomial(a, b)),
        }
    }
}

/// `C(a, b)` as an exact integer; zero when `b > a`.
pub fn binomial_exact(a: u64, b: u64) -> BigInt {
    if b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..b {
        num *= BigInt::from(a - j);
        den *= BigInt::from(j + 1);
    }
    num / den
}

/// `ln C(a, b)`; `NEG_INFINITY` when `b > a`.
///
/// Computed as a compensated sum of `ln((a - j) / (j + 1))` over
/// `min(b, a - b)` terms, so it is O(min(b, a-b)) and accurate to a few ulps
/// per term without ever forming the coefficient itself.
pub fn ln_binomial(a: u64, b: u64) -> f64 {
    if b > a {
        return f64::NEG_INFINITY;
    }
    let b = b.min(a - b);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in 0..b {
        let term = ((a - j) as f64).ln() - ((j + 1) as f64).ln();
        // Neumaier compensation.
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn rational(value: BigInt) -> Rational {
    Ratio::from_integer(value)
}

/// Best small-denominator rational for a float that stands for one (2/3,
/// 1/2, ...): continued-fraction convergents until the value is matched to
/// 1e-12 relative. Falls back to the exact dyadic expansion of the f64.
pub fn rationalize(x: f64) -> Rational {
    assert!(x.is_finite());
    if x == 0.0 {
        return Rational::zero();
    }
    let negative = x < 0.0;
    let target = x.abs();
    let (mut h0, mut h1) = (BigInt::one(), BigInt::zero());
    let (mut k0, mut k1) = (BigInt::zero(), BigInt::one());
    let mut frac = target;
    for _ in 0..64 {
        let a = frac.floor();
        if !(a < 1e18) {
            break;
        }
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h0 + &h1;
        let k2 = &ai * &k0 + &k1;
        let approx = Rational::new(h2.clone(), k2.clone());
        if let Some(v) = approx.to_f64() {
            if (v - target).abs() <= 1e-12 * target {
                let signed = if negative { -approx } else { approx };
                return signed;
            }
        }
        h1 = h0;
        h0 = h2;
        k1 = k0;
        k0 = k2;
        let rem = frac - a;
        if rem <= f64::EPSILON * frac.max(1.0) {
            break;
        }
        frac = 1.0 / rem;
    }
    Rational::from_float(x).expect("finite float")
}

/// Probability that a job's k-subset of n servers hits at most one of the
/// first k queues:
/// `p = [C(n-k, k) + k * C(n-k, k-1)] / C(n, k)`.
pub fn p_select_le1(n: usize, k: usize) -> Rational {
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    let (n64, k64) = (n as u64, k as u64);
    let num = binomial_exact(n64 - k64, k64) + BigInt::from(k64) * binomial_exact(n64 - k64, k64 - 1);
    rational(num) / rational(binomial_exact(n64, k64))
}

pub fn p_select_le1_f64(n: usize, k: usize) -> f64 {
    p_select_le1(n, k).to_f64().unwrap()
}

/// Probability that a job sends at least one task to the first k queues:
/// `[C(n, k) - C(n-k, k)] / C(n, k)`. This is the `p` entering the
/// oversampling-rate threshold (it equals 1 when `k > n/2`).
pub fn p_select_ge1(n: usize, k: usize) -> Rational {
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    let (n64, k64) = (n as u64, k as u64);
    let total = binomial_exact(n64, k64);
    rational(&total - binomial_exact(n64 - k64, k64)) / rational(total)
}

/// Arrival rate of each of the first k queues in the coupled system whose
/// first k queues are independent:
/// `lambda_tilde = (Lambda / k) * (1 - C(n-k, k) / C(n, k))` with
/// `Lambda = n * lambda / k`.
pub fn lambda_tilde_rational(n: usize, k: usize, lambda: &Rational) -> Rational {
    let job_rate = Rational::from_integer(BigInt::from(n as u64)) * lambda
        / Rational::from_integer(BigInt::from(k as u64));
    job_rate / Rational::from_integer(BigInt::from(k as u64)) * p_select_ge1(n, k)
}

pub fn lambda_tilde(n: usize, k: usize, lambda: f64) -> f64 {
    let job_rate = n as f64 * lambda / k as f64;
    let ratio = (ln_binomial((n - k) as u64, k as u64) - ln_binomial(n as u64, k as u64)).exp();
    job_rate / k as f64 * (1.0 - ratio)
}

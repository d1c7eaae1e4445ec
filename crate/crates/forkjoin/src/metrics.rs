//! Statistical estimators over simulation output: tail curves with
//! batch-means confidence intervals, empirical total-variation distance to
//! product form, workload covariance, and the two-queue balance residual.
//!
//! Consecutive delays and snapshots are autocorrelated, so every confidence
//! interval here comes from batch means (independent replications count as
//! batches; a single stream is cut into 30 batches).

use num::bigint::BigInt;
use num::{One, ToPrimitive, Zero};

use crate::combinatorics::{binomial_exact, Rational};
use crate::error::Error;

/// z-score of the two-sided 99% normal interval.
const Z99: f64 = 2.575_829_303_548_900_4;

/// Number of batches a single correlated stream is cut into.
pub const DEFAULT_BATCHES: usize = 30;

/// Empirical tail curve of job delay on a fixed grid.
#[derive(Debug, Clone)]
pub struct CcdfEstimate {
    pub grid: Vec<f64>,
    /// `P(T > tau)` per grid point, pooled over batches.
    pub survival: Vec<f64>,
    /// 99% half-width per grid point from batch means.
    pub ci_halfwidth: Vec<f64>,
    pub sample_count: usize,
}

/// Cut one autocorrelated sample stream into `DEFAULT_BATCHES` consecutive
/// batches for batch-means intervals.
pub fn rebatch(samples: Vec<f64>) -> Vec<Vec<f64>> {
    let per = samples.len().div_ceil(DEFAULT_BATCHES).max(1);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(DEFAULT_BATCHES);
    let mut it = samples.into_iter().peekable();
    while it.peek().is_some() {
        out.push(it.by_ref().take(per).collect());
    }
    // Fold a short trailing remainder into the previous batch.
    if out.len() > 1 && out.last().unwrap().len() < per {
        let tail = out.pop().unwrap();
        out.last_mut().unwrap().extend(tail);
    }
    out
}

/// Pointwise empirical survival over `grid` with batch-means half-widths.
/// Each element of `batches` must be one independent replication or one
/// batch of a stream (see [`rebatch`]).
pub fn estimate_ccdf(batches: &[Vec<f64>], grid: &[f64]) -> Result<CcdfEstimate, Error> {
    let total: usize = batches.iter().map(Vec::len).sum();
    if total < 1_000 {
        return Err(Error::TooFewSamples {
            required: 1_000,
            got: total,
        });
    }
    if grid.is_empty() {
        return Err(Error::Invalid("empty evaluation grid".to_string()));
    }
    let nb = batches.len();
    let mut survival = vec![0.0f64; grid.len()];
    let mut ci_halfwidth = vec![0.0f64; grid.len()];
    // Per batch: sort once, read off all grid points by binary search.
    let sorted: Vec<Vec<f64>> = batches
        .iter()
        .map(|b| {
            let mut s = b.clone();
            s.sort_by(|a, b| a.partial_cmp(b).unwrap());
            s
        })
        .collect();
    for (gi, &tau) in grid.iter().enumerate() {
        let mut fractions = Vec::with_capacity(nb);
        let mut exceed_total = 0usize;
        for s in &sorted {
            let exceed = s.len() - s.partition_point(|&x| x <= tau);
            exceed_total += exceed;
            fractions.push(exceed as f64 / s.len() as f64);
        }
        survival[gi] = exceed_total as f64 / total as f64;
        if nb >= 2 {
            let mean = fractions.iter().sum::<f64>() / nb as f64;
            let var = fractions.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>()
                / (nb - 1) as f64;
            ci_halfwidth[gi] = Z99 * (var / nb as f64).sqrt();
        }
    }
    Ok(CcdfEstimate {
        grid: grid.to_vec(),
        survival,
        ci_halfwidth,
        sample_count: total,
    })
}

/// Grid-wise comparison of an empirical tail curve against a bound curve.
#[derive(Debug, Clone, Copy)]
pub struct SupDistance {
    /// `max |empirical - bound|` over the grid.
    pub sup_abs: f64,
    /// `max (empirical - bound)`: positive means the bound was exceeded.
    pub signed_max: f64,
    /// Grid point attaining `sup_abs`.
    pub argmax_tau: f64,
}

/// Grid-wise test that the empirical tail never exceeds a bound curve by
/// more than statistical noise.
#[derive(Debug, Clone, Copy)]
pub struct DominanceReport {
    pub holds: bool,
    /// Largest `empirical - (bound + tolerance)` over the grid.
    pub worst_excess: f64,
    pub worst_tau: f64,
}

/// Check `empirical <= bound + 3 ci + 3/N` at every grid point. The `3/N`
/// term is the rule-of-three resolution floor of an N-sample proportion:
/// near survival 0 or 1 every batch reports the same degenerate fraction,
/// the batch-means half-width collapses to zero, and without the floor a
/// bound lying within 1/N of the boundary would be judged violated on an
/// expected discrepancy far below one sample.
pub fn dominance_check(ccdf: &CcdfEstimate, bound: impl Fn(f64) -> f64) -> DominanceReport {
    let floor = 3.0 / ccdf.sample_count as f64;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_tau = ccdf.grid[0];
    for (i, &tau) in ccdf.grid.iter().enumerate() {
        let tolerance = 3.0 * ccdf.ci_halfwidth[i] + floor;
        let excess = ccdf.survival[i] - (bound(tau) + tolerance);
        if excess > worst_excess {
            worst_excess = excess;
            worst_tau = tau;
        }
    }
    DominanceReport {
        holds: worst_excess <= 0.0,
        worst_excess,
        worst_tau,
    }
}

pub fn sup_distance(ccdf: &CcdfEstimate, bound: impl Fn(f64) -> f64) -> SupDistance {
    assert!(!ccdf.grid.is_empty());
    let mut sup_abs = -1.0;
    let mut signed_max = f64::NEG_INFINITY;
    let mut argmax_tau = ccdf.grid[0];
    for (i, &tau) in ccdf.grid.iter().enumerate() {
        let diff = ccdf.survival[i] - bound(tau);
        signed_max = signed_max.max(diff);
        if diff.abs() > sup_abs {
            sup_abs = diff.abs();
            argmax_tau = tau;
        }
    }
    SupDistance {
        sup_abs,
        signed_max,
        argmax_tau,
    }
}

/// Joint pmf of the first m queue lengths, truncated to `{0..q_max}^m`,
/// counted per batch.
#[derive(Debug, Clone)]
pub struct JointPmfEstimate {
    pub m: usize,
    pub q_max: u32,
    /// Row-major counts over the box, one vector per batch.
    pub batch_counts: Vec<Vec<u64>>,
    /// Snapshots falling outside the box, per batch.
    pub batch_truncated: Vec<u64>,
    /// Total snapshots (inside + outside), over all batches.
    pub total: u64,
}

impl JointPmfEstimate {
    /// Count pairs of coordinates `(dims.0, dims.1)` of each snapshot.
    pub fn from_snapshots(
        snapshots: &[Vec<u32>],
        dims: (usize, usize),
        q_max: u32,
        num_batches: usize,
    ) -> Self {
        Self::build(snapshots, &[dims], q_max, num_batches)
    }

    /// Pool all ordered pairs (i, j), i != j, of the first `pool` coordinates
    /// of each snapshot. Queue indices are exchangeable in the model, so
    /// pooling estimates the same two-queue joint law with less noise.
    pub fn from_snapshots_pooled(
        snapshots: &[Vec<u32>],
        pool: usize,
        q_max: u32,
        num_batches: usize,
    ) -> Self {
        let mut dims = Vec::new();
        for i in 0..pool {
            for j in 0..pool {
                if i != j {
                    dims.push((i, j));
                }
            }
        }
        Self::build(snapshots, &dims, q_max, num_batches)
    }

    fn build(
        snapshots: &[Vec<u32>],
        dims: &[(usize, usize)],
        q_max: u32,
        num_batches: usize,
    ) -> Self {
        let side = (q_max + 1) as usize;
        let per_batch = (snapshots.len() / num_batches).max(1);
        let mut batch_counts = Vec::new();
        let mut batch_truncated = Vec::new();
        let mut total = 0u64;
        for chunk in snapshots.chunks(per_batch) {
            let mut counts = vec![0u64; side * side];
            let mut truncated = 0u64;
            for snap in chunk {
                for &(i, j) in dims {
                    let (a, b) = (snap[i], snap[j]);
                    if a <= q_max && b <= q_max {
                        counts[a as usize * side + b as usize] += 1;
                    } else {
                        truncated += 1;
                    }
                    total += 1;
                }
            }
            batch_counts.push(counts);
            batch_truncated.push(truncated);
        }
        // Avoid a tiny trailing chunk becoming its own batch.
        if batch_counts.len() > num_batches {
            let extra = batch_counts.pop().unwrap();
            let extra_trunc = batch_truncated.pop().unwrap();
            let last = batch_counts.last_mut().unwrap();
            for (acc, v) in last.iter_mut().zip(extra) {
                *acc += v;
            }
            *batch_truncated.last_mut().unwrap() += extra_trunc;
        }
        JointPmfEstimate {
            m: 2,
            q_max,
            batch_counts,
            batch_truncated,
            total,
        }
    }

    /// Smallest `q_max` leaving less than 1% of coordinate values outside,
    /// judged from the pooled marginal of the snapshot data.
    pub fn suggest_q_max(snapshots: &[Vec<u32>], pool: usize) -> u32 {
        let mut values: Vec<u32> = snapshots
            .iter()
            .flat_map(|s| s[..pool].iter().copied())
            .collect();
        values.sort_unstable();
        let idx = ((values.len() as f64) * 0.995).ceil() as usize;
        values[idx.min(values.len() - 1)].max(2)
    }

    pub fn truncated_mass(&self) -> f64 {
        self.batch_truncated.iter().sum::<u64>() as f64 / self.total as f64
    }

    fn side(&self) -> usize {
        (self.q_max + 1) as usize
    }

    /// Pooled joint probability of the box cell (a, b).
    pub fn probability(&self, a: u32, b: u32) -> f64 {
        let idx = a as usize * self.side() + b as usize;
        let c: u64 = self.batch_counts.iter().map(|bc| bc[idx]).sum();
        c as f64 / self.total as f64
    }
}

/// Empirical total-variation distance between a two-queue joint law and the
/// product of its own marginals.
#[derive(Debug, Clone, Copy)]
pub struct TvEstimate {
    /// Pooled point estimate, `0.5 * sum |joint - marginal product|`.
    pub tv: f64,
    /// Batch-means standard error of the per-batch TV values.
    pub std_error: f64,
    /// Additive error bound from mass outside the box.
    pub truncated_mass: f64,
}

pub fn tv_distance(joint: &JointPmfEstimate) -> Result<TvEstimate, Error> {
    let truncated_mass = joint.truncated_mass();
    if truncated_mass >= 0.01 {
        return Err(Error::ExcessiveTruncation {
            mass: truncated_mass,
            limit: 0.01,
        });
    }
    let side = joint.side();
    let tv_of = |counts: &[u64], total: f64| -> f64 {
        let mut row = vec![0.0; side];
        let mut col = vec![0.0; side];
        for a in 0..side {
            for b in 0..side {
                let p = counts[a * side + b] as f64 / total;
                row[a] += p;
                col[b] += p;
            }
        }
        let mut l1 = 0.0;
        for a in 0..side {
            for b in 0..side {
                let p = counts[a * side + b] as f64 / total;
                l1 += (p - row[a] * col[b]).abs();
            }
        }
        l1 / 2.0
    };

    let pooled: Vec<u64> = (0..side * side)
        .map(|i| joint.batch_counts.iter().map(|bc| bc[i]).sum())
        .collect();
    let tv = tv_of(&pooled, joint.total as f64);

    let nb = joint.batch_counts.len();
    let std_error = if nb >= 2 {
        let per: Vec<f64> = joint
            .batch_counts
            .iter()
            .zip(&joint.batch_truncated)
            .map(|(counts, &tr)| {
                let total = counts.iter().sum::<u64>() + tr;
                tv_of(counts, total as f64)
            })
            .collect();
        let mean = per.iter().sum::<f64>() / nb as f64;
        let var = per.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nb - 1) as f64;
        (var / nb as f64).sqrt()
    } else {
        0.0
    };
    Ok(TvEstimate {
        tv,
        std_error,
        truncated_mass,
    })
}

/// Exact probabilities that one job sends 0, 1, or 2 tasks to the first two
/// queues: `C(n-2,k)/C(n,k)`, `2 C(n-2,k-1)/C(n,k)`, `C(n-2,k-2)/C(n,k)`,
/// converging to `(1-p)^2, 2p(1-p), p^2` for `k = p n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceProbabilities {
    pub p0: Rational,
    pub p1: Rational,
    pub p2: Rational,
}

impl BalanceProbabilities {
    pub fn as_f64(&self) -> (f64, f64, f64) {
        (
            self.p0.to_f64().unwrap(),
            self.p1.to_f64().unwrap(),
            self.p2.to_f64().unwrap(),
        )
    }

    /// The n -> infinity limits for fixed p = k/n.
    pub fn limit(p: &Rational) -> Self {
        let one = Rational::one();
        BalanceProbabilities {
            p0: (&one - p) * (&one - p),
            p1: Rational::from_integer(BigInt::from(2)) * p * (&one - p),
            p2: p * p,
        }
    }
}

pub fn balance_probabilities(n: usize, k: usize) -> BalanceProbabilities {
    assert!(n >= 2 && k >= 2 && k <= n, "need 2 <= k <= n");
    let total = Rational::from_integer(binomial_exact(n as u64, k as u64));
    let c = |b: u64| Rational::from_integer(binomial_exact(n as u64 - 2, b));
    BalanceProbabilities {
        p0: c(k as u64) / total.clone(),
        p1: Rational::from_integer(BigInt::from(2)) * c(k as u64 - 1) / total.clone(),
        p2: c(k as u64 - 2) / total,
    }
}

/// The stationary balance residual of the first two queues at state (1, 1):
///
/// `R = pi(1,1) (p1 L + p2 L + 2 mu) - [ pi(0,1) p1 L / 2 + pi(1,0) p1 L / 2
///      + pi(0,0) p2 L + pi(1,2) mu + pi(2,1) mu ]`
///
/// The true stationary law satisfies `R = 0`; an independent product law
/// does not.
pub fn balance_residual_pmf(
    pi: impl Fn(u32, u32) -> f64,
    probs: (f64, f64),
    job_rate: f64,
    mu: f64,
) -> f64 {
    let (p1, p2) = probs;
    pi(1, 1) * (p1 * job_rate + p2 * job_rate + 2.0 * mu)
        - (0.5 * pi(0, 1) * p1 * job_rate
            + 0.5 * pi(1, 0) * p1 * job_rate
            + pi(0, 0) * p2 * job_rate
            + pi(1, 2) * mu
            + pi(2, 1) * mu)
}

/// Batch-means estimate of the balance residual from an empirical joint pmf.
/// Requires the box to reach queue length 2 in both coordinates.
pub fn balance_residual_empirical(
    joint: &JointPmfEstimate,
    n: usize,
    k: usize,
    lambda: f64,
    mu: f64,
) -> Result<(f64, f64), Error> {
    if joint.q_max < 2 {
        return Err(Error::Invalid(
            "balance residual needs q_max >= 2".to_string(),
        ));
    }
    let bp = balance_probabilities(n, k);
    let (_, p1, p2) = bp.as_f64();
    let job_rate = n as f64 * lambda / k as f64;
    let side = joint.side();
    let per: Vec<f64> = joint
        .batch_counts
        .iter()
        .zip(&joint.batch_truncated)
        .map(|(counts, &tr)| {
            let total = (counts.iter().sum::<u64>() + tr) as f64;
            let pi = |a: u32, b: u32| counts[a as usize * side + b as usize] as f64 / total;
            balance_residual_pmf(pi, (p1, p2), job_rate, mu)
        })
        .collect();
    let nb = per.len();
    if nb < 2 {
        return Err(Error::TooFewSamples {
            required: 2,
            got: nb,
        });
    }
    let mean = per.iter().sum::<f64>() / nb as f64;
    let var = per.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nb - 1) as f64;
    Ok((mean, (var / nb as f64).sqrt()))
}

/// Exact residual of the product of two independent geometric (M/M/1)
/// queue-length laws with load `rho = lambda/mu`, using exact finite-n
/// selection probabilities and `Lambda = n lambda / k`.
pub fn balance_residual_product_exact(
    n: usize,
    k: usize,
    lambda: &Rational,
    mu: &Rational,
) -> Rational {
    let bp = balance_probabilities(n, k);
    let job_rate = Rational::from_integer(BigInt::from(n as u64)) * lambda
        / Rational::from_integer(BigInt::from(k as u64));
    balance_residual_geometric(&bp, &job_rate, lambda, mu)
}

/// Exact residual of the same product law under the limiting selection
/// probabilities for `p = k/n` and `Lambda = lambda / p`. Equals
/// `-p lambda (1 - rho)^4` in closed form.
pub fn balance_residual_product_limit(
    p: &Rational,
    lambda: &Rational,
    mu: &Rational,
) -> Rational {
    let bp = BalanceProbabilities::limit(p);
    let job_rate = lambda / p;
    balance_residual_geometric(&bp, &job_rate, lambda, mu)
}

fn balance_residual_geometric(
    bp: &BalanceProbabilities,
    job_rate: &Rational,
    lambda: &Rational,
    mu: &Rational,
) -> Rational {
    let rho = lambda / mu;
    let one = Rational::one();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let geo = |q1: u32, q2: u32| -> Rational {
        let unit = (&one - &rho) * (&one - &rho);
        let mut v = unit;
        for _ in 0..(q1 + q2) {
            v *= &rho;
        }
        v
    };
    geo(1, 1) * (&bp.p1 * job_rate + &bp.p2 * job_rate + Rational::from_integer(BigInt::from(2)) * mu)
        - (&half * geo(0, 1) * &bp.p1 * job_rate
            + &half * geo(1, 0) * &bp.p1 * job_rate
            + geo(0, 0) * &bp.p2 * job_rate
            + geo(1, 2) * mu
            + geo(2, 1) * mu)
}

/// Theorem separation constant `epsilon = p lambda (1-rho)^2 / (2 (11 Lambda
/// + 8 mu))` with `Lambda = lambda / p`.
pub fn epsilon_theorem3(p: &Rational, lambda: &Rational, mu: &Rational) -> Rational {
    assert!(p > &Rational::zero() && p <= &Rational::one());
    assert!(lambda < mu);
    let rho = lambda / mu;
    let one = Rational::one();
    let job_rate = lambda / p;
    let num = p * lambda * (&one - &rho) * (&one - &rho);
    let den = Rational::from_integer(BigInt::from(2))
        * (Rational::from_integer(BigInt::from(11)) * job_rate
            + Rational::from_integer(BigInt::from(8)) * mu);
    num / den
}

/// Covariance between two coordinates of snapshot vectors, batch by batch.
#[derive(Debug, Clone, Copy)]
pub struct CovEstimate {
    pub pair: (usize, usize),
    pub covariance: f64,
    pub std_error: f64,
}

/// Batch-means covariance estimates between selected snapshot coordinates.
pub fn workload_covariance(
    snapshots: &[Vec<f64>],
    pairs: &[(usize, usize)],
    num_batches: usize,
) -> Result<Vec<CovEstimate>, Error> {
    if snapshots.len() < 10_000 {
        return Err(Error::TooFewSamples {
            required: 10_000,
            got: snapshots.len(),
        });
    }
    let per_batch = (snapshots.len() / num_batches).max(2);
    let mut out = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        let covs: Vec<f64> = snapshots
            .chunks(per_batch)
            .filter(|c| c.len() >= 2)
            .map(|chunk| {
                let nb = chunk.len() as f64;
                let mi = chunk.iter().map(|s| s[i]).sum::<f64>() / nb;
                let mj = chunk.iter().map(|s| s[j]).sum::<f64>() / nb;
                chunk
                    .iter()
                    .map(|s| (s[i] - mi) * (s[j] - mj))
                    .sum::<f64>()
                    / (nb - 1.0)
            })
            .collect();
        let nb = covs.len() as f64;
        let mean = covs.iter().sum::<f64>() / nb;
        let var = covs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nb - 1.0);
        out.push(CovEstimate {
            pair: (i, j),
            covariance: mean,
            std_error: (var / nb).sqrt(),
        });
    }
    Ok(out)
}

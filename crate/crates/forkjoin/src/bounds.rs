//! Closed-form independence upper bound on job delay and the harmonic-number
//! asymptotics that go with it under exponential service.

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The task-delay cdf `F`, either the analytic M/M/1 law or an empirical cdf
/// built from single-queue sojourn samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TaskDelayCdf {
    AnalyticMm1 { lambda: f64, mu: f64 },
    Empirical { samples: Vec<f64> },
}

impl TaskDelayCdf {
    pub fn analytic_mm1(lambda: f64, mu: f64) -> Result<Self, Error> {
        if !(lambda >= 0.0 && lambda < mu) {
            return Err(Error::MM1Unstable { lambda, mu });
        }
        Ok(TaskDelayCdf::AnalyticMm1 { lambda, mu })
    }

    /// Empirical cdf over sojourn samples; sorts them once.
    pub fn empirical(mut samples: Vec<f64>) -> Result<Self, Error> {
        if samples.is_empty() {
            return Err(Error::TooFewSamples {
                required: 1,
                got: 0,
            });
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(TaskDelayCdf::Empirical { samples })
    }

    /// `F(tau)`.
    pub fn eval(&self, tau: f64) -> f64 {
        if tau < 0.0 {
            return 0.0;
        }
        match self {
            TaskDelayCdf::AnalyticMm1 { lambda, mu } => 1.0 - (-(mu - lambda) * tau).exp(),
            TaskDelayCdf::Empirical { samples } => {
                let idx = samples.partition_point(|&x| x <= tau);
                idx as f64 / samples.len() as f64
            }
        }
    }

    /// Generalized inverse `F^{-1}(p)` for `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> f64 {
        debug_assert!((0.0..1.0).contains(&p));
        match self {
            TaskDelayCdf::AnalyticMm1 { lambda, mu } => -(-p).ln_1p() / (mu - lambda),
            TaskDelayCdf::Empirical { samples } => {
                let idx = ((p * samples.len() as f64).ceil() as usize).max(1) - 1;
                samples[idx.min(samples.len() - 1)]
            }
        }
    }
}

/// M/M/1 sojourn-time cdf `F(tau) = 1 - exp(-(mu - lambda) tau)`.
pub fn task_cdf_mm1(lambda: f64, mu: f64, tau: f64) -> Result<f64, Error> {
    if !(lambda >= 0.0 && lambda < mu) {
        return Err(Error::MM1Unstable { lambda, mu });
    }
    Ok(if tau < 0.0 {
        0.0
    } else {
        1.0 - (-(mu - lambda) * tau).exp()
    })
}

/// Tail of the independence upper bound: `P(T_hat > tau) = 1 - F(tau)^k`.
pub fn independence_ccdf(f: &TaskDelayCdf, k: usize, tau: f64) -> f64 {
    assert!(k >= 1);
    1.0 - f.eval(tau).powi(k as i32)
}

/// `H_m`, summed smallest-term-first with Neumaier compensation.
pub fn harmonic(m: u64) -> f64 {
    assert!(m >= 1);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for j in (1..=m).rev() {
        let term = 1.0 / j as f64;
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

/// `H_k / (mu - lambda)`: the exact mean of the independence bound under
/// exponential service (max of k iid rate-(mu - lambda) exponentials), and
/// the scale the true job delay concentrates at as the system grows.
pub fn asymptotic_mean_mm1(k: usize, lambda: f64, mu: f64) -> Result<f64, Error> {
    if !(lambda >= 0.0 && lambda < mu) {
        return Err(Error::MM1Unstable { lambda, mu });
    }
    Ok(harmonic(k as u64) / (mu - lambda))
}

/// 200 geometrically spaced evaluation points covering both the body and the
/// tail of the max-of-k distribution: from `F^{-1}(0.01)` up to the point
/// where the bound's cdf reaches `1 - 1e-4`, i.e. `F^{-1}((1-1e-4)^(1/k))`.
pub fn evaluation_grid(f: &TaskDelayCdf, k: usize) -> Vec<f64> {
    const POINTS: usize = 200;
    let lo = f.quantile(0.01);
    let hi = f.quantile((1.0 - 1e-4f64).powf(1.0 / k as f64));
    debug_assert!(lo > 0.0 && hi > lo);
    let ratio = hi / lo;
    (0..POINTS)
        .map(|i| lo * ratio.powf(i as f64 / (POINTS - 1) as f64))
        .collect()
}

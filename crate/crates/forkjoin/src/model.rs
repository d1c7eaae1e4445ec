//! Domain types: system parameterization and service-time distributions.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rng::Stream;

/// Service-time law `G` with closed-form mean `1/mu` and second moment `g2`.
///
/// All variants sample by inverse CDF so a service draw consumes a fixed
/// number of uniforms (one, except hyperexponential which uses two). That
/// keeps the per-job draw order of the simulator easy to state and
/// reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ServiceDistribution {
    Exponential { rate: f64 },
    Deterministic { value: f64 },
    HyperExponential { weights: Vec<f64>, rates: Vec<f64> },
    TruncatedPareto { shape: f64, lower: f64, upper: f64 },
}

impl ServiceDistribution {
    /// Exponential service with rate `mu`.
    pub fn exponential(rate: f64) -> Result<Self, Error> {
        let d = ServiceDistribution::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn deterministic(value: f64) -> Result<Self, Error> {
        let d = ServiceDistribution::Deterministic { value };
        d.validate()?;
        Ok(d)
    }

    pub fn hyper_exponential(weights: Vec<f64>, rates: Vec<f64>) -> Result<Self, Error> {
        let d = ServiceDistribution::HyperExponential { weights, rates };
        d.validate()?;
        Ok(d)
    }

    pub fn truncated_pareto(shape: f64, lower: f64, upper: f64) -> Result<Self, Error> {
        let d = ServiceDistribution::TruncatedPareto {
            shape,
            lower,
            upper,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let fail = |reason: &str| Error::InvalidService {
            reason: reason.to_string(),
        };
        match self {
            ServiceDistribution::Exponential { rate } => {
                if !(*rate > 0.0) {
                    return Err(fail("exponential rate must be positive"));
                }
            }
            ServiceDistribution::Deterministic { value } => {
                if !(*value > 0.0) {
                    return Err(fail("deterministic service time must be positive"));
                }
            }
            ServiceDistribution::HyperExponential { weights, rates } => {
                if weights.is_empty() || weights.len() != rates.len() {
                    return Err(fail("weights and rates must be nonempty and equal length"));
                }
                if weights.iter().any(|w| !(*w > 0.0)) || rates.iter().any(|r| !(*r > 0.0)) {
                    return Err(fail("all weights and rates must be positive"));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(fail("weights must sum to 1"));
                }
            }
            ServiceDistribution::TruncatedPareto {
                shape,
                lower,
                upper,
            } => {
                if !(*shape > 0.0) {
                    return Err(fail("pareto shape must be positive"));
                }
                if !(*lower > 0.0 && lower < upper) {
                    return Err(fail("pareto bounds must satisfy 0 < lower < upper"));
                }
            }
        }
        Ok(())
    }

    /// `E[S]`, in closed form.
    pub fn mean(&self) -> f64 {
        match self {
            ServiceDistribution::Exponential { rate } => 1.0 / rate,
            ServiceDistribution::Deterministic { value } => *value,
            ServiceDistribution::HyperExponential { weights, rates } => weights
                .iter()
                .zip(rates)
                .map(|(w, r)| w / r)
                .sum(),
            ServiceDistribution::TruncatedPareto {
                shape,
                lower,
                upper,
            } => pareto_moment(*shape, *lower, *upper, 1),
        }
    }

    /// `g2 = E[S^2]`, in closed form.
    pub fn second_moment(&self) -> f64 {
        match self {
            ServiceDistribution::Exponential { rate } => 2.0 / (rate * rate),
            ServiceDistribution::Deterministic { value } => value * value,
            ServiceDistribution::HyperExponential { weights, rates } => weights
                .iter()
                .zip(rates)
                .map(|(w, r)| 2.0 * w / (r * r))
                .sum(),
            ServiceDistribution::TruncatedPareto {
                shape,
                lower,
                upper,
            } => pareto_moment(*shape, *lower, *upper, 2),
        }
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self, ServiceDistribution::Exponential { .. })
    }

    /// Short tag used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            ServiceDistribution::Exponential { .. } => "exponential",
            ServiceDistribution::Deterministic { .. } => "deterministic",
            ServiceDistribution::HyperExponential { .. } => "hyperexponential",
            ServiceDistribution::TruncatedPareto { .. } => "truncated-pareto",
        }
    }

    /// Draw one service time by inverse CDF.
    pub fn sample(&self, rng: &mut Stream) -> f64 {
        use rand::Rng;
        match self {
            ServiceDistribution::Exponential { rate } => {
                let u: f64 = rng.gen();
                -(-u).ln_1p() / rate
            }
            ServiceDistribution::Deterministic { value } => {
                // Consume one uniform anyway so the draw order does not
                // depend on the service variant.
                let _: f64 = rng.gen();
                *value
            }
            ServiceDistribution::HyperExponential { weights, rates } => {
                let pick: f64 = rng.gen();
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut rate = rates[rates.len() - 1];
                for (w, r) in weights.iter().zip(rates) {
                    acc += w;
                    if pick < acc {
                        rate = *r;
                        break;
                    }
                }
                -(-u).ln_1p() / rate
            }
            ServiceDistribution::TruncatedPareto {
                shape,
                lower,
                upper,
            } => {
                let u: f64 = rng.gen();
                let c = 1.0 - (lower / upper).powf(*shape);
                lower * (1.0 - u * c).powf(-1.0 / shape)
            }
        }
    }
}

/// `E[S^m]` of the Pareto(alpha) law truncated to `[lower, upper]`.
///
/// For density proportional to `x^{-alpha-1}` on the interval, the moment is
/// `alpha/(alpha-m) * lower^alpha * (lower^{m-alpha} - upper^{m-alpha}) / c`
/// with `c = 1 - (lower/upper)^alpha`, and a log form when `alpha = m`.
fn pareto_moment(alpha: f64, lower: f64, upper: f64, m: u32) -> f64 {
    let m = m as f64;
    let c = 1.0 - (lower / upper).powf(alpha);
    if (alpha - m).abs() < 1e-12 {
        alpha * lower.powf(alpha) * (upper / lower).ln() / c
    } else {
        alpha / (alpha - m) * lower.powf(alpha) * (lower.powf(m - alpha) - upper.powf(m - alpha))
            / c
    }
}

/// Full parameterization of one `n`-server limited fork-join system.
///
/// `lambda` is the task arrival rate seen by each individual queue; the job
/// arrival rate is derived as `Lambda = n * lambda / k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    pub service: ServiceDistribution,
    pub seed: u64,
    pub warmup_fraction: f64,
    pub horizon_jobs: usize,
}

impl SystemConfig {
    pub fn new(
        n: usize,
        k: usize,
        lambda: f64,
        service: ServiceDistribution,
        seed: u64,
        warmup_fraction: f64,
        horizon_jobs: usize,
    ) -> Result<Self, Error> {
        service.validate()?;
        if n == 0 || k == 0 || k > n {
            return Err(Error::TaskCountOutOfRange { n, k });
        }
        if !(lambda > 0.0) {
            return Err(Error::NonPositiveRate { lambda });
        }
        let rho = lambda * service.mean();
        if !(rho < 1.0) {
            return Err(Error::Unstable { rho });
        }
        if !(0.0..1.0).contains(&warmup_fraction) {
            return Err(Error::WarmupOutOfRange {
                value: warmup_fraction,
            });
        }
        if horizon_jobs == 0 {
            return Err(Error::EmptyHorizon);
        }
        Ok(SystemConfig {
            n,
            k,
            lambda,
            service,
            seed,
            warmup_fraction,
            horizon_jobs,
        })
    }

    /// Load on each queue, `rho = lambda * E[S]`.
    pub fn rho(&self) -> f64 {
        self.lambda * self.service.mean()
    }

    /// Job arrival rate `Lambda = n * lambda / k`.
    pub fn job_arrival_rate(&self) -> f64 {
        self.n as f64 * self.lambda / self.k as f64
    }

    /// Jobs excluded from records at the start of the horizon.
    pub fn warmup_jobs(&self) -> usize {
        (self.warmup_fraction * self.horizon_jobs as f64).floor() as usize
    }
}

//! The coupled pair (S, S~): the real system and the system whose first k
//! queues are made independent by killing colliding tasks.
//!
//! Both systems share arrival epochs, server subsets, and service times.
//! When a job selects m >= 2 queues among the first k, S~ keeps one of those
//! m tasks chosen uniformly at random, kills the other m - 1, and routes the
//! remaining k - m tasks unchanged. The first time that happens is the
//! divergence event; until then the first k workloads of both systems are
//! bitwise identical.
//!
//! Draw order per job extends the simulator contract: gap, subset, service
//! times, then (only when m >= 2) one extra uniform for the kept task.

use rand::Rng;

use crate::combinatorics::p_select_le1_f64;
use crate::error::Error;
use crate::model::SystemConfig;
use crate::rng::Stream;

use super::{exponential_gap, LazyWorkloads, SubsetSampler};

/// What happened to one coupled run over `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTrace {
    pub horizon: f64,
    /// Whether some job selected >= 2 of the first k queues.
    pub diverged: bool,
    pub first_divergence_time: Option<f64>,
    /// Total tasks killed in the independent system.
    pub killed_tasks: u64,
    /// Whether the first k workloads still agree bitwise at the horizon.
    pub first_k_equal: bool,
}

/// Run S and S~ from empty under shared randomness until `horizon`.
pub fn simulate_coupled(
    config: &SystemConfig,
    horizon: f64,
    stream: &mut Stream,
) -> Result<CouplingTrace, Error> {
    if !(horizon > 0.0) {
        return Err(Error::Invalid(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let n = config.n;
    let k = config.k;
    let job_rate = config.job_arrival_rate();

    let mut real = LazyWorkloads::new(n);
    let mut ind = LazyWorkloads::new(n);
    let mut sampler = SubsetSampler::new(n);
    let mut subset: Vec<u32> = Vec::with_capacity(k);
    let mut services: Vec<f64> = Vec::with_capacity(k);

    let mut now = 0.0;
    let mut diverged = false;
    let mut first_divergence_time = None;
    let mut killed_tasks = 0u64;

    loop {
        now += exponential_gap(stream, job_rate);
        if now > horizon {
            break;
        }
        sampler.sample_into(stream, k, &mut subset);
        services.clear();
        for _ in 0..k {
            services.push(config.service.sample(stream));
        }
        // Queues among the first k; subset is sorted, so they are a prefix.
        let m = subset.partition_point(|&q| (q as usize) < k);
        let keep = if m >= 2 {
            if !diverged {
                diverged = true;
                first_divergence_time = Some(now);
            }
            killed_tasks += (m - 1) as u64;
            Some(rng_pick(stream, m))
        } else {
            None
        };
        for (slot, (&q, &s)) in subset.iter().zip(&services).enumerate() {
            real.add_task(q as usize, now, s);
            let kill = match keep {
                Some(keep_slot) => slot < m && slot != keep_slot,
                None => false,
            };
            if !kill {
                ind.add_task(q as usize, now, s);
            }
        }
        if !diverged {
            // Coupling invariant: identical update histories so far.
            for i in 0..k {
                assert_eq!(
                    real.raw(i),
                    ind.raw(i),
                    "coupled systems disagree before any divergence event"
                );
            }
        }
    }

    let first_k_equal = (0..k).all(|i| {
        real.value_at(i, horizon).to_bits() == ind.value_at(i, horizon).to_bits()
    });
    Ok(CouplingTrace {
        horizon,
        diverged,
        first_divergence_time,
        killed_tasks,
        first_k_equal,
    })
}

fn rng_pick(stream: &mut Stream, m: usize) -> usize {
    stream.gen_range(0..m)
}

/// Exact probability of the divergence event over `[0, tau]`:
/// `P(E) = 1 - exp(-Lambda tau (1 - p))` where `p` is the probability a job
/// selects at most one of the first k queues.
pub fn pe_exact(n: usize, k: usize, job_rate: f64, tau: f64) -> f64 {
    assert!(tau >= 0.0);
    let p = p_select_le1_f64(n, k);
    -(-job_rate * tau * (1.0 - p)).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ServiceDistribution;
    use crate::rng::StreamFactory;

    fn config(n: usize, k: usize) -> SystemConfig {
        SystemConfig::new(
            n,
            k,
            2.0 / 3.0,
            ServiceDistribution::exponential(1.0).unwrap(),
            7,
            0.0,
            1,
        )
        .unwrap()
    }

    #[test]
    fn k_one_never_diverges() {
        let cfg = config(8, 1);
        let factory = StreamFactory::new(3);
        for rep in 0..200 {
            let trace = simulate_coupled(&cfg, 10.0, &mut factory.stream(rep)).unwrap();
            assert!(!trace.diverged);
            assert_eq!(trace.killed_tasks, 0);
            assert!(trace.first_k_equal);
        }
    }

    #[test]
    fn undiverged_runs_end_bitwise_equal() {
        let cfg = config(16, 4);
        let factory = StreamFactory::new(10);
        let mut undiverged = 0;
        for rep in 0..500 {
            let trace = simulate_coupled(&cfg, 1.0, &mut factory.stream(rep)).unwrap();
            if !trace.diverged {
                undiverged += 1;
                assert!(trace.first_k_equal);
                assert!(trace.first_divergence_time.is_none());
            } else {
                assert!(trace.first_divergence_time.unwrap() <= 1.0);
            }
        }
        assert!(undiverged > 0, "horizon too long for this check");
    }

    #[test]
    fn pe_exact_closed_forms() {
        assert_eq!(pe_exact(16, 4, 8.0 / 3.0, 0.0), 0.0);
        // p(4, 2) = 5/6, so P(E) = 1 - exp(-Lambda tau / 6).
        let lambda_job: f64 = 1.3;
        let tau = 0.7;
        let expect = 1.0 - (-lambda_job * tau / 6.0).exp();
        assert!((pe_exact(4, 2, lambda_job, tau) - expect).abs() < 1e-15);
        // Monotone nondecreasing in tau.
        let mut prev = 0.0;
        for i in 0..50 {
            let v = pe_exact(16, 4, 8.0 / 3.0, i as f64 * 0.2);
            assert!(v >= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn divergence_frequency_tracks_closed_form() {
        let cfg = config(16, 4);
        let factory = StreamFactory::new(99);
        let tau = 2.0;
        let reps = 20_000u64;
        let mut hits = 0u64;
        for rep in 0..reps {
            if simulate_coupled(&cfg, tau, &mut factory.stream(rep)).unwrap().diverged {
                hits += 1;
            }
        }
        let p = pe_exact(16, 4, cfg.job_arrival_rate(), tau);
        let freq = hits as f64 / reps as f64;
        let se = (p * (1.0 - p) / reps as f64).sqrt();
        assert!(
            (freq - p).abs() < 3.0 * se,
            "freq {freq} vs P(E) {p} (se {se})"
        );
    }
}

//! One M/G/1 queue in isolation, the marginal of any single fork-join queue.

use crate::error::Error;
use crate::model::ServiceDistribution;
use crate::rng::Stream;

use super::exponential_gap;

const WARMUP_FRACTION: f64 = 0.2;

/// Simulate `num_jobs` arrivals to a single M/G/1 queue and return the
/// post-warmup sojourn times (waiting plus own service). This is the
/// empirical estimator of the task-delay cdf `F` when no closed form is
/// used.
pub fn simulate_single_queue(
    lambda: f64,
    service: &ServiceDistribution,
    num_jobs: usize,
    stream: &mut Stream,
) -> Result<Vec<f64>, Error> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveRate { lambda });
    }
    let rho = lambda * service.mean();
    if !(rho < 1.0) {
        return Err(Error::Unstable { rho });
    }
    let warmup = (WARMUP_FRACTION * num_jobs as f64).floor() as usize;
    let mut out = Vec::with_capacity(num_jobs - warmup);
    let mut workload = 0.0f64;
    for job in 0..num_jobs {
        let gap = exponential_gap(stream, lambda);
        workload = (workload - gap).max(0.0);
        let s = service.sample(stream);
        let sojourn = workload + s;
        workload = sojourn;
        if job >= warmup {
            out.push(sojourn);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::task_cdf_mm1;
    use crate::rng::StreamFactory;

    fn kolmogorov_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = samples.len() as f64;
        let mut d = 0.0f64;
        for (i, &x) in samples.iter().enumerate() {
            let f = cdf(x);
            d = d.max((f - i as f64 / n).abs());
            d = d.max(((i + 1) as f64 / n - f).abs());
        }
        d
    }

    #[test]
    fn deterministic_service_floors_every_delay() {
        let svc = ServiceDistribution::deterministic(1.0).unwrap();
        let mut stream = StreamFactory::new(3).stream(0);
        let delays = simulate_single_queue(0.5, &svc, 20_000, &mut stream).unwrap();
        assert!(delays.iter().all(|&d| d >= 1.0));
    }

    #[test]
    fn mm1_sojourn_matches_exponential_law() {
        let svc = ServiceDistribution::exponential(1.0).unwrap();
        let mut stream = StreamFactory::new(11).stream(0);
        let mut delays = simulate_single_queue(2.0 / 3.0, &svc, 1_000_000, &mut stream).unwrap();
        let d = kolmogorov_distance(&mut delays, |x| task_cdf_mm1(2.0 / 3.0, 1.0, x).unwrap());
        assert!(d < 0.005, "Kolmogorov distance {d}");
    }

    #[test]
    fn vanishing_load_reduces_to_the_service_law() {
        let svc = ServiceDistribution::exponential(1.0).unwrap();
        let mut stream = StreamFactory::new(5).stream(0);
        let mut delays = simulate_single_queue(1e-3, &svc, 200_000, &mut stream).unwrap();
        let d = kolmogorov_distance(&mut delays, |x| 1.0 - (-x).exp());
        assert!(d < 0.01, "Kolmogorov distance {d}");
    }

    #[test]
    fn rejects_instability() {
        let svc = ServiceDistribution::deterministic(2.0).unwrap();
        let mut stream = StreamFactory::new(0).stream(0);
        assert!(simulate_single_queue(0.5, &svc, 10, &mut stream).is_err());
    }
}

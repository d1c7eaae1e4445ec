//! Busy periods started from a stationary workload snapshot: warm one M/G/1
//! queue, inspect its workload, then measure the first passage to empty with
//! arrivals still flowing. The mean is `lambda g2 / (2 (1 - rho)^2)`.

use rayon::prelude::*;

use crate::error::Error;
use crate::model::ServiceDistribution;
use crate::rng::{Stream, StreamFactory};

use super::exponential_gap;

/// One inspection: the workload found and the time it took to drain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BusyPeriodSample {
    pub inspection_workload: f64,
    pub passage_time: f64,
}

#[derive(Debug, Clone)]
pub struct BusyPeriodResult {
    pub samples: Vec<BusyPeriodSample>,
    pub mean: f64,
    pub std_error: f64,
}

/// Collect `num_samples` independent busy-period measurements. Sample i
/// draws from stream `stream_base + i`, so the workers can run in parallel
/// without changing the result.
pub fn busy_period_experiment(
    lambda: f64,
    service: &ServiceDistribution,
    num_samples: usize,
    streams: &StreamFactory,
    stream_base: u64,
) -> Result<BusyPeriodResult, Error> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveRate { lambda });
    }
    let rho = lambda * service.mean();
    if !(rho < 1.0) {
        return Err(Error::Unstable { rho });
    }
    // Comfortably past the queue's relaxation window before inspecting.
    let warm_time = 40.0 * service.mean() / ((1.0 - rho) * (1.0 - rho));

    let samples: Vec<BusyPeriodSample> = (0..num_samples as u64)
        .into_par_iter()
        .map(|i| one_sample(lambda, service, warm_time, &mut streams.stream(stream_base + i)))
        .collect();

    let n = samples.len() as f64;
    let mean = samples.iter().map(|s| s.passage_time).sum::<f64>() / n;
    let var = samples
        .iter()
        .map(|s| (s.passage_time - mean) * (s.passage_time - mean))
        .sum::<f64>()
        / (n - 1.0);
    Ok(BusyPeriodResult {
        mean,
        std_error: (var / n).sqrt(),
        samples,
    })
}

fn one_sample(
    lambda: f64,
    service: &ServiceDistribution,
    warm_time: f64,
    stream: &mut Stream,
) -> BusyPeriodSample {
    // Warm phase: run arrivals up to the inspection epoch. The gap that
    // crosses the epoch is discarded, which is exact for Poisson arrivals.
    let mut now = 0.0;
    let mut workload = 0.0f64;
    loop {
        let gap = exponential_gap(stream, lambda);
        if now + gap > warm_time {
            workload = (workload - (warm_time - now)).max(0.0);
            break;
        }
        now += gap;
        workload = (workload - gap).max(0.0) + service.sample(stream);
    }
    let inspection_workload = workload;

    // Drain phase: arrivals keep coming until the queue first empties.
    let mut passage = 0.0;
    while workload > 0.0 {
        let gap = exponential_gap(stream, lambda);
        if gap >= workload {
            passage += workload;
            workload = 0.0;
        } else {
            passage += gap;
            workload = workload - gap + service.sample(stream);
        }
    }
    BusyPeriodSample {
        inspection_workload,
        passage_time: passage,
    }
}

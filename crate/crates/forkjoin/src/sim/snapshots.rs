//! Fixed-interval snapshots of the running system: queue lengths of the
//! first m queues (exponential service only) and raw workloads.
//!
//! Fixed-interval sampling, not arrival sampling, with interval >= 2 mean
//! service times to tame autocorrelation; under Poisson arrivals the two
//! agree in law anyway.

use std::collections::VecDeque;

use crate::error::Error;
use crate::model::SystemConfig;
use crate::rng::Stream;

use super::{exponential_gap, LazyWorkloads, SubsetSampler};

/// Post-warmup queue-length snapshots of the first `m` queues at fixed
/// wall-clock intervals. A task occupies its queue from arrival until its
/// completion epoch (arrival time + waiting + own service), so the length at
/// time t counts completion epochs still in the future.
pub fn sample_queue_lengths(
    config: &SystemConfig,
    sample_interval: f64,
    num_samples: usize,
    m: usize,
    stream: &mut Stream,
) -> Result<Vec<Vec<u32>>, Error> {
    if !config.service.is_exponential() {
        return Err(Error::QueueLengthNeedsExponential {
            got: config.service.kind().to_string(),
        });
    }
    if m == 0 || m > config.k {
        return Err(Error::MarginalWidthOutOfRange { m, k: config.k });
    }
    let mut epochs: Vec<VecDeque<f64>> = vec![VecDeque::new(); m];
    run_snapshots(
        config,
        sample_interval,
        num_samples,
        stream,
        &mut epochs,
        |epochs, q, now, delay| {
            if q < m {
                epochs[q].push_back(now + delay);
            }
        },
        |epochs, _workloads, now| {
            let mut lengths = Vec::with_capacity(m);
            for queue in epochs.iter_mut() {
                while queue.front().is_some_and(|&e| e <= now) {
                    queue.pop_front();
                }
                lengths.push(queue.len() as u32);
            }
            lengths
        },
    )
}

/// Post-warmup workload snapshots of the first `m` queues (any service law).
pub fn sample_workloads(
    config: &SystemConfig,
    sample_interval: f64,
    num_samples: usize,
    m: usize,
    stream: &mut Stream,
) -> Result<Vec<Vec<f64>>, Error> {
    if m == 0 || m > config.n {
        return Err(Error::MarginalWidthOutOfRange { m, k: config.n });
    }
    run_snapshots(
        config,
        sample_interval,
        num_samples,
        stream,
        &mut (),
        |_, _, _, _| {},
        |_, workloads, now| (0..m).map(|i| workloads.value_at(i, now)).collect(),
    )
}

#[allow(clippy::too_many_arguments)]
fn run_snapshots<C, T, A, O>(
    config: &SystemConfig,
    sample_interval: f64,
    num_samples: usize,
    stream: &mut Stream,
    ctx: &mut C,
    mut on_task: A,
    mut observe: O,
) -> Result<Vec<T>, Error>
where
    A: FnMut(&mut C, usize, f64, f64),
    O: FnMut(&mut C, &LazyWorkloads, f64) -> T,
{
    if !(sample_interval > 0.0) {
        return Err(Error::Invalid(format!(
            "sample_interval must be positive, got {sample_interval}"
        )));
    }
    if num_samples == 0 {
        return Err(Error::TooFewSamples {
            required: 1,
            got: 0,
        });
    }
    let wf = config.warmup_fraction;
    let total_snapshots = (num_samples as f64 / (1.0 - wf)).ceil() as usize;
    let warmup_snapshots = total_snapshots - num_samples;
    let job_rate = config.job_arrival_rate();

    let mut workloads = LazyWorkloads::new(config.n);
    let mut sampler = SubsetSampler::new(config.n);
    let mut subset: Vec<u32> = Vec::with_capacity(config.k);
    let mut out = Vec::with_capacity(num_samples);

    let mut next_arrival = exponential_gap(stream, job_rate);
    for snap in 0..total_snapshots {
        let snap_time = (snap + 1) as f64 * sample_interval;
        while next_arrival <= snap_time {
            let now = next_arrival;
            sampler.sample_into(stream, config.k, &mut subset);
            for &q in &subset {
                let s = config.service.sample(stream);
                let delay = workloads.add_task(q as usize, now, s);
                on_task(ctx, q as usize, now, delay);
            }
            next_arrival = now + exponential_gap(stream, job_rate);
        }
        let value = observe(ctx, &workloads, snap_time);
        if snap >= warmup_snapshots {
            out.push(value);
        }
    }
    Ok(out)
}

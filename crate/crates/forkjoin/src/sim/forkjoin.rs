//! The full n-queue limited fork-join simulation.

use crate::error::Error;
use crate::model::SystemConfig;
use crate::rng::Stream;

use super::{exponential_gap, JobRecord, LazyWorkloads, SubsetSampler, WorkloadState};

/// Output of one replication.
#[derive(Debug, Clone)]
pub struct SimRun {
    /// Post-warmup jobs, in arrival order.
    pub records: Vec<JobRecord>,
    pub final_state: WorkloadState,
    /// Set when the post-warmup delay sequence still drifts (second vs
    /// fourth quarter means differ by more than 3 pooled batch-means
    /// standard errors).
    pub stationarity_warning: bool,
}

/// Run the system and keep every post-warmup [`JobRecord`].
pub fn simulate_forkjoin(config: &SystemConfig, stream: &mut Stream) -> Result<SimRun, Error> {
    let mut records = Vec::with_capacity(config.horizon_jobs - config.warmup_jobs());
    let (final_state, stationarity_warning) =
        simulate_forkjoin_observed(config, stream, |record| records.push(record.clone()))?;
    Ok(SimRun {
        records,
        final_state,
        stationarity_warning,
    })
}

/// Run the system, handing each post-warmup job to `observer` instead of
/// storing it. The record reference is reused between jobs; clone what you
/// keep. Warmup jobs shape the state but are not observed.
pub fn simulate_forkjoin_observed<F>(
    config: &SystemConfig,
    stream: &mut Stream,
    mut observer: F,
) -> Result<(WorkloadState, bool), Error>
where
    F: FnMut(&JobRecord),
{
    let rho = config.rho();
    if !(rho < 1.0) {
        return Err(Error::Unstable { rho });
    }
    let n = config.n;
    let k = config.k;
    let job_rate = config.job_arrival_rate();
    let warmup_jobs = config.warmup_jobs();
    let recorded_jobs = config.horizon_jobs - warmup_jobs;

    let mut workloads = LazyWorkloads::new(n);
    let mut sampler = SubsetSampler::new(n);
    let mut record = JobRecord {
        arrival_time: 0.0,
        queues: Vec::with_capacity(k),
        task_delays: Vec::with_capacity(k),
        job_delay: 0.0,
    };
    let mut quarters = QuarterStats::new(recorded_jobs);
    let mut now = 0.0;

    for job in 0..config.horizon_jobs {
        now += exponential_gap(stream, job_rate);
        sampler.sample_into(stream, k, &mut record.queues);
        record.arrival_time = now;
        record.task_delays.clear();
        let mut job_delay = 0.0f64;
        for &q in &record.queues {
            let s = config.service.sample(stream);
            let delay = workloads.add_task(q as usize, now, s);
            record.task_delays.push(delay);
            job_delay = job_delay.max(delay);
        }
        record.job_delay = job_delay;
        if job >= warmup_jobs {
            quarters.push(job_delay);
            observer(&record);
        }
    }

    let final_state = WorkloadState {
        now,
        workloads: workloads.materialize(now),
    };
    Ok((final_state, quarters.drifting()))
}

/// Streaming batch statistics over the four quarters of the recorded delay
/// sequence, 8 batches per quarter.
struct QuarterStats {
    total: usize,
    seen: usize,
    batch_size: usize,
    batch_sum: f64,
    batch_count: usize,
    // batch means, per quarter
    batches: [Vec<f64>; 4],
}

impl QuarterStats {
    fn new(total: usize) -> Self {
        QuarterStats {
            total,
            seen: 0,
            batch_size: (total / 32).max(1),
            batch_sum: 0.0,
            batch_count: 0,
            batches: Default::default(),
        }
    }

    fn push(&mut self, delay: f64) {
        self.batch_sum += delay;
        self.batch_count += 1;
        self.seen += 1;
        if self.batch_count == self.batch_size {
            let quarter = (4 * (self.seen - 1) / self.total.max(1)).min(3);
            self.batches[quarter].push(self.batch_sum / self.batch_count as f64);
            self.batch_sum = 0.0;
            self.batch_count = 0;
        }
    }

    fn drifting(&self) -> bool {
        let stats = |q: &Vec<f64>| -> Option<(f64, f64)> {
            if q.len() < 2 {
                return None;
            }
            let m = q.iter().sum::<f64>() / q.len() as f64;
            let var = q.iter().map(|b| (b - m) * (b - m)).sum::<f64>() / (q.len() - 1) as f64;
            Some((m, var / q.len() as f64))
        };
        match (stats(&self.batches[1]), stats(&self.batches[3])) {
            (Some((m2, v2)), Some((m4, v4))) => (m2 - m4).abs() > 3.0 * (v2 + v4).sqrt(),
            _ => false,
        }
    }
}

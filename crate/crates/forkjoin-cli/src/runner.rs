//! Replication fan-out over a bounded worker pool.
//!
//! Replication r always draws from stream index `base + r`, results are
//! collected in replication order, and floating-point reductions happen
//! sequentially afterwards, so merged statistics are identical for any
//! worker count.

use rayon::prelude::*;

use forkjoin::model::SystemConfig;
use forkjoin::rng::StreamFactory;
use forkjoin::sim::simulate_forkjoin_observed;

/// Stream-index block reserved for one sub-experiment of a scenario, so two
/// sub-experiments never share a stream.
pub fn stream_base(sub_experiment: u64) -> u64 {
    sub_experiment << 32
}

/// Job-delay batches from `reps` independent replications.
pub struct DelayBatches {
    /// One vector of post-warmup job delays per replication.
    pub batches: Vec<Vec<f64>>,
    pub jobs_simulated: u64,
    pub stationarity_warnings: usize,
}

pub fn run_delay_batches(
    config: &SystemConfig,
    reps: usize,
    stream_base: u64,
) -> Result<DelayBatches, forkjoin::Error> {
    let factory = StreamFactory::new(config.seed);
    let results: Vec<Result<(Vec<f64>, bool), forkjoin::Error>> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut delays = Vec::with_capacity(config.horizon_jobs - config.warmup_jobs());
            let mut stream = factory.stream(stream_base + rep);
            let (_, warning) = simulate_forkjoin_observed(config, &mut stream, |record| {
                delays.push(record.job_delay);
            })?;
            Ok((delays, warning))
        })
        .collect();
    let mut batches = Vec::with_capacity(reps);
    let mut warnings = 0;
    for r in results {
        let (delays, warning) = r?;
        warnings += usize::from(warning);
        batches.push(delays);
    }
    let jobs = config.horizon_jobs as u64 * reps as u64;
    Ok(DelayBatches {
        batches,
        jobs_simulated: jobs,
        stationarity_warnings: warnings,
    })
}

/// Build the bounded worker pool for `--threads` / `FORKJOIN_THREADS` and run
/// `body` inside it; `None` uses the default global pool.
pub fn with_worker_pool<T: Send>(threads: Option<usize>, body: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => body(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("worker pool")
            .install(body),
    }
}

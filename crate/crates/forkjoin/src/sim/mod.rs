//! Discrete-event simulation of the limited fork-join system and the
//! auxiliary experiments built on the same dynamics.
//!
//! The event loop is arrival-only: FIFO single-server queues are
//! work-conserving, so between arrivals every busy queue's workload drains at
//! rate exactly 1 and departures never need their own events. Each queue
//! carries `(workload at last touch, touch time)` and is decayed lazily when
//! next observed, which makes a job cost O(k) instead of heap operations per
//! task.
//!
//! Draw order per job, fixed for reproducibility: arrival gap, then the
//! server subset (partial Fisher-Yates), then service times in ascending
//! queue-index order.

mod busy;
mod coupled;
mod forkjoin;
mod single_queue;
mod snapshots;

pub use busy::{busy_period_experiment, BusyPeriodResult, BusyPeriodSample};
pub use coupled::{pe_exact, simulate_coupled, CouplingTrace};
pub use forkjoin::{simulate_forkjoin, simulate_forkjoin_observed, SimRun};
pub use single_queue::simulate_single_queue;
pub use snapshots::{sample_queue_lengths, sample_workloads};

use rand::Rng;

use crate::rng::Stream;

/// Workload vector observed at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadState {
    pub now: f64,
    pub workloads: Vec<f64>,
}

/// One simulated job: when it arrived, where its tasks went, and what each
/// task and the whole job waited.
#[derive(Debug, Clone, PartialEq)]
pub struct JobRecord {
    pub arrival_time: f64,
    /// The k distinct queue indices, ascending.
    pub queues: Vec<u32>,
    /// Task delay per entry of `queues` (workload found plus own service).
    pub task_delays: Vec<f64>,
    /// `max` of the task delays.
    pub job_delay: f64,
}

/// Per-queue remaining work with lazy rate-1 decay.
#[derive(Debug, Clone)]
pub(crate) struct LazyWorkloads {
    work: Vec<f64>,
    touch: Vec<f64>,
}

impl LazyWorkloads {
    pub fn new(n: usize) -> Self {
        LazyWorkloads {
            work: vec![0.0; n],
            touch: vec![0.0; n],
        }
    }

    /// Workload of queue `i` at time `now >= touch[i]`.
    #[inline]
    pub fn value_at(&self, i: usize, now: f64) -> f64 {
        (self.work[i] - (now - self.touch[i])).max(0.0)
    }

    /// Apply a task arrival with service time `s`; returns the task delay.
    #[inline]
    pub fn add_task(&mut self, i: usize, now: f64, s: f64) -> f64 {
        let waiting = self.value_at(i, now);
        let delay = waiting + s;
        self.work[i] = delay;
        self.touch[i] = now;
        delay
    }

    pub fn materialize(&self, now: f64) -> Vec<f64> {
        (0..self.work.len()).map(|i| self.value_at(i, now)).collect()
    }

    /// Raw (work, touch) pair; two histories that applied identical updates
    /// compare bitwise equal here.
    pub fn raw(&self, i: usize) -> (f64, f64) {
        (self.work[i], self.touch[i])
    }
}

/// Uniform k-subsets of `{0, .., n-1}` by partial Fisher-Yates over a
/// persistent index pool, undone after every draw so the cost stays O(k).
#[derive(Debug, Clone)]
pub(crate) struct SubsetSampler {
    pool: Vec<u32>,
    swaps: Vec<usize>,
}

impl SubsetSampler {
    pub fn new(n: usize) -> Self {
        SubsetSampler {
            pool: (0..n as u32).collect(),
            swaps: Vec::new(),
        }
    }

    /// Fill `out` with a uniform k-subset, sorted ascending.
    pub fn sample_into(&mut self, rng: &mut Stream, k: usize, out: &mut Vec<u32>) {
        let n = self.pool.len();
        debug_assert!(k <= n);
        self.swaps.clear();
        for j in 0..k {
            let r = rng.gen_range(j..n);
            self.pool.swap(j, r);
            self.swaps.push(r);
        }
        out.clear();
        out.extend_from_slice(&self.pool[..k]);
        for j in (0..k).rev() {
            self.pool.swap(j, self.swaps[j]);
        }
        out.sort_unstable();
    }
}

/// Exponential gap with the given rate from one uniform draw.
#[inline]
pub(crate) fn exponential_gap(rng: &mut Stream, rate: f64) -> f64 {
    let u: f64 = rng.gen();
    -(-u).ln_1p() / rate
}

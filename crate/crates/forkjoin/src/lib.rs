//! Simulation and verification laboratory for the limited fork-join queueing
//! model: `n` FIFO queues, each arriving job forks into `k <= n` tasks sent to
//! `k` distinct queues chosen uniformly at random, and the job completes when
//! its last task does.
//!
//! The crate provides
//! - a discrete-event simulator for the full system, single queues, the
//!   coupled independent system, busy periods, and queue-length snapshots
//!   ([`sim`]),
//! - the closed-form independence upper bound `1 - F(tau)^k` and harmonic
//!   asymptotics ([`bounds`]),
//! - exact combinatorics shared by everything else ([`combinatorics`]),
//! - an exact association checker for the Poisson-oversampled arrival
//!   pattern, brute-forced over monotone boolean functions ([`assoc`]),
//! - statistical estimators: tail CCDFs with batch-means confidence
//!   intervals, empirical total-variation distance to product form, and the
//!   two-queue balance residual ([`metrics`]).

// Validation guards are written `!(x > 0.0)` on purpose: the negation also
// rejects NaN, which a plain `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assoc;
pub mod bounds;
pub mod combinatorics;
pub mod error;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod sim;

pub use error::Error;
pub use model::{ServiceDistribution, SystemConfig};
pub use rng::StreamFactory;

//! Scenario harness for the fork-join laboratory: configuration files,
//! reproducible replication fan-out, result persistence, and the scenario
//! definitions behind the `forkjoin` binary.

// Validation guards are written `!(x > 0.0)` on purpose: the negation also
// rejects NaN, which a plain `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod manifest;
pub mod output;
pub mod runner;
pub mod scenario;

pub use config::{parse_config, ConfigError, RunSettings, ScenarioKind};
pub use manifest::ResultManifest;
pub use scenario::{run_scenario, ScenarioOutcome};

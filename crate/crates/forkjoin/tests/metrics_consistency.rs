//! Calibration checks for the estimators: repeated-seed CCDF consistency
//! against a closed-form law, and workload covariance across dependence
//! regimes.

use rand::Rng;

use forkjoin::metrics::{estimate_ccdf, rebatch, sup_distance, workload_covariance};
use forkjoin::model::{ServiceDistribution, SystemConfig};
use forkjoin::rng::StreamFactory;
use forkjoin::sim::sample_workloads;

#[test]
fn ccdf_estimator_is_consistent_across_100_seeds() {
    // Exponential oracle: 20k iid Exp(1/3) samples per seed. The sup grid
    // error must stay within 3 maximal CI half-widths in at least 99 of 100
    // seeded runs.
    let grid: Vec<f64> = (1..=60).map(|i| i as f64 * 0.4).collect();
    let mut failures = 0;
    for seed in 0..100u64 {
        let mut rng = StreamFactory::new(seed).stream(0);
        let samples: Vec<f64> = (0..20_000)
            .map(|_| {
                let u: f64 = rng.gen();
                -(-u).ln_1p() * 3.0
            })
            .collect();
        let est = estimate_ccdf(&rebatch(samples), &grid).unwrap();
        let d = sup_distance(&est, |tau| (-tau / 3.0).exp());
        let max_hw = est.ci_halfwidth.iter().cloned().fold(0.0f64, f64::max);
        if d.sup_abs > 3.0 * max_hw {
            failures += 1;
        }
    }
    assert!(failures <= 1, "{failures} of 100 seeds exceeded 3 half-widths");
}

fn workload_config(n: usize, k: usize, seed: u64) -> SystemConfig {
    SystemConfig::new(
        n,
        k,
        2.0 / 3.0,
        ServiceDistribution::exponential(1.0).unwrap(),
        seed,
        0.2,
        1,
    )
    .unwrap()
}

#[test]
fn classic_forkjoin_workloads_are_positively_correlated() {
    // k = n: every job feeds every queue, the classical fork-join case with
    // known positive association.
    let cfg = workload_config(8, 8, 41);
    let mut stream = StreamFactory::new(cfg.seed).stream(0);
    let snaps = sample_workloads(&cfg, 2.0, 40_000, 2, &mut stream).unwrap();
    let est = workload_covariance(&snaps, &[(0, 1)], 30).unwrap();
    assert!(
        est[0].covariance > 3.0 * est[0].std_error,
        "cov {} +- {}",
        est[0].covariance,
        est[0].std_error
    );
}

#[test]
fn wide_system_workloads_are_uncorrelated_at_resolution() {
    // n >> k: the asymptotic-independence regime; the covariance interval
    // must straddle zero.
    let cfg = workload_config(1024, 4, 43);
    let mut stream = StreamFactory::new(cfg.seed).stream(0);
    let snaps = sample_workloads(&cfg, 2.0, 20_000, 2, &mut stream).unwrap();
    let est = workload_covariance(&snaps, &[(0, 1)], 30).unwrap();
    assert!(
        est[0].covariance.abs() <= 3.0 * est[0].std_error,
        "cov {} +- {}",
        est[0].covariance,
        est[0].std_error
    );
}

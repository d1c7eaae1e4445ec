//! `forkjoin`: run limited fork-join simulation scenarios, verify the
//! association oracle, and reshape results for plotting.
//!
//! Exit codes: 0 success, 2 configuration error, 3 failed acceptance check
//! under `--check`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num::bigint::BigInt;
use num::{ToPrimitive, Zero};

use forkjoin::assoc::{arrival_pattern_dist, beta_threshold, check_association};
use forkjoin::combinatorics::Rational;
use forkjoin_cli::config::{default_settings, parse_config, ConfigError, ScenarioKind};
use forkjoin_cli::runner::with_worker_pool;
use forkjoin_cli::scenario::{emit_plotdata, run_scenario};

#[derive(Parser)]
#[command(
    name = "forkjoin",
    about = "Simulation laboratory for the limited fork-join queueing model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write CSVs, summary.json, and manifest.json.
    Run {
        /// figure1 | dominance | coupling | busy | assoc | theorem3 |
        /// scaling | single-queue
        scenario: String,
        /// TOML config with [system], [service], [scenario], [output].
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Replication count override.
        #[arg(long)]
        reps: Option<usize>,
        /// Output directory override.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (falls back to FORKJOIN_THREADS, then all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Exit 3 if any scenario check fails.
        #[arg(long)]
        check: bool,
    },
    /// Exact association verdicts for the oversampled arrival pattern.
    VerifyAssoc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Oversampling rate as a rational multiple of Lambda (e.g. 19/6).
        /// Omitted: report both beta = 0 and beta = threshold.
        #[arg(long)]
        beta: Option<String>,
        /// Permit k = 5 (~29M monotone pairs; minutes, not seconds).
        #[arg(long)]
        slow_exhaustive: bool,
    },
    /// Reshape a manifest's ccdf files into one tidy plotdata.csv.
    Plotdata {
        manifest: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            scenario,
            config,
            seed,
            reps,
            out,
            threads,
            check,
        } => {
            let kind: ScenarioKind = match scenario.parse() {
                Ok(kind) => kind,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return Ok(ExitCode::from(2));
                }
            };
            let mut settings = match config {
                Some(path) => match parse_config(&path, Some(kind)) {
                    Ok(s) => s,
                    Err(e @ (ConfigError::Io { .. }
                    | ConfigError::Syntax { .. }
                    | ConfigError::Value { .. }
                    | ConfigError::UnknownScenario(_)
                    | ConfigError::Model(_))) => {
                        eprintln!("config error: {e}");
                        return Ok(ExitCode::from(2));
                    }
                },
                None => default_settings(kind),
            };
            if let Some(seed) = seed {
                settings.seed = seed;
            }
            if let Some(reps) = reps {
                settings.replications = reps;
            }
            if let Some(out) = out {
                settings.out_dir = out;
            }
            let threads = threads.or_else(|| {
                std::env::var("FORKJOIN_THREADS")
                    .ok()
                    .and_then(|v| v.parse().ok())
            });
            let outcome = with_worker_pool(threads, || run_scenario(&settings))?;
            for c in &outcome.checks {
                println!(
                    "{} {} — {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            println!(
                "wrote {} ({} jobs simulated)",
                outcome.manifest_path.display(),
                outcome.jobs_simulated
            );
            if check && !outcome.all_checks_passed() {
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyAssoc {
            n,
            k,
            beta,
            slow_exhaustive,
        } => {
            if n == 0 || k == 0 || k > n {
                eprintln!("config error: need 1 <= k <= n");
                return Ok(ExitCode::from(2));
            }
            if k > 5 {
                eprintln!("config error: exhaustive check is limited to k <= 5");
                return Ok(ExitCode::from(2));
            }
            if k == 5 && !slow_exhaustive {
                eprintln!(
                    "config error: k = 5 scans ~29M monotone pairs; pass --slow-exhaustive"
                );
                return Ok(ExitCode::from(2));
            }
            let job_rate = Rational::from_integer(BigInt::from(1));
            let betas: Vec<(String, Rational)> = match beta {
                Some(text) => {
                    let v: Rational = match text.parse() {
                        Ok(v) => v,
                        Err(e) => {
                            eprintln!("config error: --beta {text:?}: {e}");
                            return Ok(ExitCode::from(2));
                        }
                    };
                    vec![(text, v)]
                }
                None => vec![
                    ("0".to_string(), Rational::zero()),
                    ("threshold".to_string(), beta_threshold(n, k, &job_rate)),
                ],
            };
            let mut entries = Vec::new();
            for (label, beta) in betas {
                let dist = arrival_pattern_dist(n, k, &job_rate, &beta)?;
                let verdict = check_association(&dist)?;
                entries.push(serde_json::json!({
                    "beta_over_lambda": label,
                    "beta_exact": beta.to_string(),
                    "associated": verdict.associated,
                    "pairs_checked": verdict.pairs_checked,
                    "counterexample_gap": verdict
                        .counterexample
                        .as_ref()
                        .map(|c| c.gap().to_string()),
                    "counterexample_gap_f64": verdict
                        .counterexample
                        .as_ref()
                        .and_then(|c| c.gap().to_f64()),
                }));
            }
            let report = serde_json::json!({
                "n": n,
                "k": k,
                "threshold_beta_over_lambda": beta_threshold(n, k, &job_rate).to_string(),
                "verdicts": entries,
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Plotdata { manifest } => {
            let path = emit_plotdata(&manifest)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

//! Configuration files and resolved run settings.
//!
//! Config files are TOML with four sections, all optional:
//!
//! ```toml
//! [system]
//! n = 64
//! k = 8
//! lambda = 0.6666666666666666
//! seed = 20180607
//! warmup_fraction = 0.2
//! horizon_jobs = 100000
//!
//! [service]
//! kind = "exponential"   # deterministic | hyperexponential | truncated-pareto
//! mu = 1.0
//!
//! [scenario]
//! name = "figure1"
//! replications = 20
//! n_list = [4, 64, 1024]
//! exponent = 0.3333333333333333
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Unknown keys anywhere are hard errors; every diagnostic carries the TOML
//! line and column.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use forkjoin::model::{ServiceDistribution, SystemConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed config {path}: {message}")]
    Syntax { path: PathBuf, message: String },

    #[error("invalid value for {field}: {reason}")]
    Value { field: String, reason: String },

    #[error("unknown scenario {0:?}; expected one of figure1, dominance, coupling, busy, assoc, theorem3, scaling, single-queue")]
    UnknownScenario(String),

    #[error(transparent)]
    Model(#[from] forkjoin::Error),
}

/// The eight scenario families the harness knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Figure1,
    Dominance,
    Coupling,
    Busy,
    Assoc,
    Theorem3,
    Scaling,
    SingleQueue,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Figure1 => "figure1",
            ScenarioKind::Dominance => "dominance",
            ScenarioKind::Coupling => "coupling",
            ScenarioKind::Busy => "busy",
            ScenarioKind::Assoc => "assoc",
            ScenarioKind::Theorem3 => "theorem3",
            ScenarioKind::Scaling => "scaling",
            ScenarioKind::SingleQueue => "single-queue",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "figure1" => ScenarioKind::Figure1,
            "dominance" => ScenarioKind::Dominance,
            "coupling" => ScenarioKind::Coupling,
            "busy" => ScenarioKind::Busy,
            "assoc" => ScenarioKind::Assoc,
            "theorem3" => ScenarioKind::Theorem3,
            "scaling" => ScenarioKind::Scaling,
            "single-queue" => ScenarioKind::SingleQueue,
            other => return Err(ConfigError::UnknownScenario(other.to_string())),
        })
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    system: Option<SystemSection>,
    service: Option<ServiceSection>,
    scenario: Option<ScenarioSection>,
    output: Option<OutputSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    n: Option<usize>,
    k: Option<usize>,
    lambda: Option<f64>,
    seed: Option<u64>,
    warmup_fraction: Option<f64>,
    horizon_jobs: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ServiceSection {
    kind: Option<String>,
    mu: Option<f64>,
    value: Option<f64>,
    weights: Option<Vec<f64>>,
    rates: Option<Vec<f64>>,
    shape: Option<f64>,
    lower: Option<f64>,
    upper: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioSection {
    name: Option<String>,
    replications: Option<usize>,
    n_list: Option<Vec<usize>>,
    k_list: Option<Vec<usize>>,
    exponent: Option<f64>,
    tau: Option<f64>,
    coupling_reps: Option<usize>,
    busy_samples: Option<usize>,
    snapshots: Option<usize>,
    sample_interval: Option<f64>,
    /// Oversampling rate as a rational multiple of Lambda, e.g. "19/6".
    beta_over_lambda: Option<String>,
    /// Permit the k = 5 exhaustive association check (~29M monotone pairs).
    slow_exhaustive: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
}

/// Everything one scenario run needs, after defaults and overrides.
#[derive(Debug, Clone, Serialize)]
pub struct RunSettings {
    pub scenario: ScenarioKind,
    pub n: usize,
    pub k: Option<usize>,
    pub lambda: f64,
    pub service: ServiceDistribution,
    pub seed: u64,
    pub warmup_fraction: f64,
    pub horizon_jobs: usize,
    pub replications: usize,
    pub n_list: Vec<usize>,
    pub k_list: Option<Vec<usize>>,
    pub exponent: f64,
    pub tau: f64,
    pub coupling_reps: usize,
    pub busy_samples: usize,
    pub snapshots: usize,
    pub sample_interval: f64,
    pub beta_over_lambda: Option<String>,
    pub slow_exhaustive: bool,
    pub out_dir: PathBuf,
}

impl RunSettings {
    /// Default parameterization: load 2/3 per queue with unit-rate
    /// exponential service, plus per-scenario shape defaults.
    pub fn defaults(scenario: ScenarioKind) -> Self {
        let mut settings = RunSettings {
            scenario,
            n: 64,
            k: None,
            lambda: 2.0 / 3.0,
            service: ServiceDistribution::Exponential { rate: 1.0 },
            seed: 20180607,
            warmup_fraction: 0.2,
            horizon_jobs: 100_000,
            replications: 20,
            n_list: vec![4, 64, 1024],
            k_list: None,
            exponent: 1.0 / 3.0,
            tau: 5.0,
            coupling_reps: 100_000,
            busy_samples: 100_000,
            snapshots: 2_000_000,
            sample_interval: 5.0,
            beta_over_lambda: None,
            slow_exhaustive: false,
            out_dir: PathBuf::from("out"),
        };
        match scenario {
            ScenarioKind::Assoc => {
                settings.n = 4;
                settings.k = Some(2);
            }
            ScenarioKind::Coupling => {
                settings.n = 16;
                settings.k = Some(4);
            }
            ScenarioKind::Theorem3 => {
                settings.n_list = vec![8, 16, 32];
            }
            ScenarioKind::SingleQueue => {
                settings.horizon_jobs = 1_000_000;
            }
            _ => {}
        }
        settings
    }

    /// The default number of tasks for a given n: an explicit k wins,
    /// otherwise `ceil(n^exponent)` (with a guard against the float sitting
    /// a hair above an exact integer power).
    pub fn k_for(&self, n: usize) -> usize {
        match self.k {
            Some(k) => k,
            None => k_from_exponent(n, self.exponent),
        }
    }

    /// The simulator configuration for one (n, k) pair.
    pub fn system_config(&self, n: usize, k: usize) -> Result<SystemConfig, forkjoin::Error> {
        SystemConfig::new(
            n,
            k,
            self.lambda,
            self.service.clone(),
            self.seed,
            self.warmup_fraction,
            self.horizon_jobs,
        )
    }
}

pub fn k_from_exponent(n: usize, exponent: f64) -> usize {
    let v = (n as f64).powf(exponent);
    ((v - 1e-9).ceil() as usize).max(1)
}

/// Parse a config file into run settings; `scenario_override` (the CLI
/// positional) wins over the file's `[scenario] name`.
pub fn parse_config(
    path: &Path,
    scenario_override: Option<ScenarioKind>,
) -> Result<RunSettings, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: FileConfig = toml::from_str(&text).map_err(|e| ConfigError::Syntax {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    resolve(file, scenario_override)
}

/// Settings when no config file was given.
pub fn default_settings(scenario: ScenarioKind) -> RunSettings {
    RunSettings::defaults(scenario)
}

fn resolve(
    file: FileConfig,
    scenario_override: Option<ScenarioKind>,
) -> Result<RunSettings, ConfigError> {
    let scen = file.scenario.unwrap_or_default();
    let kind = match scenario_override {
        Some(kind) => kind,
        None => match &scen.name {
            Some(name) => name.parse()?,
            None => {
                return Err(ConfigError::Value {
                    field: "scenario.name".to_string(),
                    reason: "missing (give it in the config or on the command line)".to_string(),
                })
            }
        },
    };
    let mut settings = RunSettings::defaults(kind);

    if let Some(sys) = file.system {
        if let Some(n) = sys.n {
            settings.n = n;
        }
        settings.k = sys.k.or(settings.k);
        if let Some(lambda) = sys.lambda {
            settings.lambda = lambda;
        }
        if let Some(seed) = sys.seed {
            settings.seed = seed;
        }
        if let Some(w) = sys.warmup_fraction {
            settings.warmup_fraction = w;
        }
        if let Some(h) = sys.horizon_jobs {
            settings.horizon_jobs = h;
        }
    }
    if let Some(svc) = file.service {
        settings.service = resolve_service(svc)?;
    }
    settings.replications = scen.replications.unwrap_or(settings.replications);
    settings.n_list = scen.n_list.unwrap_or(settings.n_list);
    settings.k_list = scen.k_list.or(settings.k_list);
    settings.exponent = scen.exponent.unwrap_or(settings.exponent);
    settings.tau = scen.tau.unwrap_or(settings.tau);
    settings.coupling_reps = scen.coupling_reps.unwrap_or(settings.coupling_reps);
    settings.busy_samples = scen.busy_samples.unwrap_or(settings.busy_samples);
    settings.snapshots = scen.snapshots.unwrap_or(settings.snapshots);
    settings.sample_interval = scen.sample_interval.unwrap_or(settings.sample_interval);
    settings.beta_over_lambda = scen.beta_over_lambda.or(settings.beta_over_lambda);
    settings.slow_exhaustive = scen.slow_exhaustive.unwrap_or(settings.slow_exhaustive);
    if let Some(out) = file.output {
        if let Some(dir) = out.dir {
            settings.out_dir = dir;
        }
    }
    validate(&settings)?;
    Ok(settings)
}

fn resolve_service(svc: ServiceSection) -> Result<ServiceDistribution, ConfigError> {
    let kind = svc.kind.as_deref().unwrap_or("exponential");
    let value = |field: &str, v: Option<f64>| {
        v.ok_or_else(|| ConfigError::Value {
            field: format!("service.{field}"),
            reason: format!("required for kind = {kind:?}"),
        })
    };
    let dist = match kind {
        "exponential" => ServiceDistribution::exponential(svc.mu.unwrap_or(1.0))?,
        "deterministic" => ServiceDistribution::deterministic(value("value", svc.value)?)?,
        "hyperexponential" => {
            let weights = svc.weights.unwrap_or_else(|| vec![0.5, 0.5]);
            let rates = svc.rates.unwrap_or_else(|| vec![0.5, 2.0]);
            ServiceDistribution::hyper_exponential(weights, rates)?
        }
        "truncated-pareto" => ServiceDistribution::truncated_pareto(
            svc.shape.unwrap_or(2.5),
            svc.lower.unwrap_or(0.25),
            svc.upper.unwrap_or(20.0),
        )?,
        other => {
            return Err(ConfigError::Value {
                field: "service.kind".to_string(),
                reason: format!(
                    "unknown kind {other:?}; expected exponential, deterministic, \
                     hyperexponential, or truncated-pareto"
                ),
            })
        }
    };
    Ok(dist)
}

fn validate(settings: &RunSettings) -> Result<(), ConfigError> {
    let err = |field: &str, reason: String| {
        Err(ConfigError::Value {
            field: field.to_string(),
            reason,
        })
    };
    if let Some(k) = settings.k {
        if k == 0 || k > settings.n {
            return err(
                "system.k",
                format!("k = {k} violates the model constraint 1 <= k <= n (n = {})", settings.n),
            );
        }
    }
    let rho = settings.lambda * settings.service.mean();
    if !(rho < 1.0) {
        return err(
            "system.lambda",
            format!("load rho = lambda * E[S] = {rho} must be < 1"),
        );
    }
    if !(0.0..1.0).contains(&settings.warmup_fraction) {
        return err(
            "system.warmup_fraction",
            format!("{} outside [0, 1)", settings.warmup_fraction),
        );
    }
    if settings.horizon_jobs == 0 {
        return err("system.horizon_jobs", "must be positive".to_string());
    }
    if settings.replications == 0 {
        return err("scenario.replications", "must be positive".to_string());
    }
    if settings.n_list.is_empty() {
        return err("scenario.n_list", "must be nonempty".to_string());
    }
    if let Some(k_list) = &settings.k_list {
        if k_list.len() != settings.n_list.len() {
            return err(
                "scenario.k_list",
                format!(
                    "length {} does not match n_list length {}",
                    k_list.len(),
                    settings.n_list.len()
                ),
            );
        }
        for (&n, &k) in settings.n_list.iter().zip(k_list) {
            if k == 0 || k > n {
                return err("scenario.k_list", format!("k = {k} invalid for n = {n}"));
            }
        }
    }
    if !(settings.exponent > 0.0 && settings.exponent <= 1.0) {
        return err(
            "scenario.exponent",
            format!("{} outside (0, 1]", settings.exponent),
        );
    }
    if !(settings.tau > 0.0) {
        return err("scenario.tau", "must be positive".to_string());
    }
    if !(settings.sample_interval > 0.0) {
        return err("scenario.sample_interval", "must be positive".to_string());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn minimal_config_applies_default_parameterization() {
        let f = write_config("[system]\nn = 16\nk = 2\n[scenario]\nname = \"dominance\"\n");
        let s = parse_config(f.path(), None).unwrap();
        assert_eq!(s.scenario, ScenarioKind::Dominance);
        assert_eq!((s.n, s.k), (16, Some(2)));
        assert!((s.lambda - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.service, ServiceDistribution::Exponential { rate: 1.0 });
        assert!((s.warmup_fraction - 0.2).abs() < 1e-15);
    }

    #[test]
    fn k_above_n_is_rejected_with_the_model_constraint() {
        let f = write_config("[system]\nn = 4\nk = 5\n[scenario]\nname = \"coupling\"\n");
        let e = parse_config(f.path(), None).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("k <= n"), "{msg}");
    }

    #[test]
    fn bad_hyperexponential_weights_are_rejected() {
        let f = write_config(
            "[service]\nkind = \"hyperexponential\"\nweights = [0.4, 0.5]\nrates = [1.0, 2.0]\n\
             [scenario]\nname = \"busy\"\n",
        );
        assert!(parse_config(f.path(), None).is_err());
    }

    #[test]
    fn unknown_keys_are_hard_errors_with_position() {
        let f = write_config("[system]\nn = 8\nbogus_key = 1\n[scenario]\nname = \"busy\"\n");
        let e = parse_config(f.path(), None).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("bogus_key") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn unstable_load_is_rejected_with_the_computed_rho() {
        let f = write_config("[system]\nlambda = 1.5\n[scenario]\nname = \"busy\"\n");
        let e = parse_config(f.path(), None).unwrap_err();
        assert!(e.to_string().contains("rho"), "{e}");
    }

    #[test]
    fn cli_scenario_overrides_file_scenario() {
        let f = write_config("[scenario]\nname = \"busy\"\n");
        let s = parse_config(f.path(), Some(ScenarioKind::Coupling)).unwrap();
        assert_eq!(s.scenario, ScenarioKind::Coupling);
    }

    #[test]
    fn exponent_ceiling_matches_expected_k() {
        assert_eq!(k_from_exponent(4, 1.0 / 3.0), 2);
        assert_eq!(k_from_exponent(64, 1.0 / 3.0), 4);
        assert_eq!(k_from_exponent(1024, 1.0 / 3.0), 11);
        assert_eq!(k_from_exponent(1024, 0.9), 512);
        assert_eq!(k_from_exponent(1024, 0.5), 32);
        assert_eq!(k_from_exponent(1024, 2.0 / 3.0), 102);
    }
}

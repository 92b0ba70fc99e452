//! Experiment configuration: a flat key-value TOML file with a fixed schema.
//!
//! ```toml
//! problem = "boolean-sum"   # boolean-sum | real-sum | integrate-r0 |
//!                           # integrate-r1 | integrate-r2 | path-integrate
//! variant = "both"          # deterministic | randomized | both
//! epsilons = [0.2, 0.1, 0.05]
//! deltas = [0.25]           # probabilistic-error levels (may be empty)
//! omega_samples = 200       # omega draws per cell; omega_samples * min(delta) >= 10
//! seed = 42                 # mandatory master seed; no wall-clock seeding
//! backend = "analytic"      # analytic | statevector
//! table_size = 256          # optional: regenerate the summation suite at this N
//! out_csv = "rows.csv"
//! out_manifest = "manifest.json"
//! ```

use serde::Deserialize;

use qlab::qae::Backend;
use qlab::reductions::QueryVariant;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub problem: String,
    pub variant: String,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub deltas: Vec<f64>,
    pub omega_samples: usize,
    pub seed: Option<u64>,
    #[serde(default = "default_backend")]
    pub backend: String,
    pub table_size: Option<usize>,
    pub out_csv: Option<String>,
    pub out_manifest: Option<String>,
}

fn default_backend() -> String {
    "analytic".into()
}

/// A validated experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: String,
    pub variants: Vec<QueryVariant>,
    pub epsilons: Vec<f64>,
    pub deltas: Vec<f64>,
    pub omega_samples: usize,
    pub seed: u64,
    pub backend: Backend,
    pub table_size: Option<usize>,
    pub out_csv: Option<String>,
    pub out_manifest: Option<String>,
}

/// Configuration problems are reported with the offending field named.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| ConfigError(format!("config parse error: {e}")))?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<ExperimentConfig, ConfigError> {
    if !qlab::catalog::PROBLEM_IDS.contains(&raw.problem.as_str()) {
        return Err(ConfigError(format!(
            "problem: unknown problem '{}'; expected one of {:?}",
            raw.problem,
            qlab::catalog::PROBLEM_IDS
        )));
    }
    let variants = match raw.variant.as_str() {
        "deterministic" => vec![QueryVariant::Deterministic],
        "randomized" => vec![QueryVariant::Randomized],
        "both" => vec![QueryVariant::Deterministic, QueryVariant::Randomized],
        other => {
            return Err(ConfigError(format!(
                "variant: expected deterministic | randomized | both, got '{other}'"
            )))
        }
    };
    if raw.epsilons.is_empty() {
        return Err(ConfigError("epsilons: list must not be empty".into()));
    }
    for &eps in &raw.epsilons {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(ConfigError(format!(
                "epsilons: epsilon must lie in (0, 0.5), got {eps}"
            )));
        }
    }
    for &delta in &raw.deltas {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(ConfigError(format!(
                "deltas: delta must lie in (0, 1), got {delta}"
            )));
        }
        if (raw.omega_samples as f64) * delta < 10.0 {
            return Err(ConfigError(format!(
                "omega_samples: {} draws are too few for delta = {delta} \
                 (need omega_samples * delta >= 10)",
                raw.omega_samples
            )));
        }
    }
    if raw.omega_samples == 0 {
        return Err(ConfigError("omega_samples: must be at least 1".into()));
    }
    let seed = raw
        .seed
        .ok_or_else(|| ConfigError("seed: a master seed is mandatory".into()))?;
    let backend = match raw.backend.as_str() {
        "analytic" => Backend::Analytic,
        "statevector" => Backend::Statevector,
        other => {
            return Err(ConfigError(format!(
                "backend: expected analytic | statevector, got '{other}'"
            )))
        }
    };
    if let Some(n) = raw.table_size {
        if n < 2 || !n.is_power_of_two() {
            return Err(ConfigError(format!(
                "table_size: must be a power of two of at least 2, got {n}"
            )));
        }
    }
    Ok(ExperimentConfig {
        problem: raw.problem,
        variants,
        epsilons: raw.epsilons,
        deltas: raw.deltas,
        omega_samples: raw.omega_samples,
        seed,
        backend,
        table_size: raw.table_size,
        out_csv: raw.out_csv,
        out_manifest: raw.out_manifest,
    })
}

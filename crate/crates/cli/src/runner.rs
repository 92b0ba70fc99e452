//! Experiment runner: fans (variant, epsilon) cells out to a worker pool,
//! measures errors and resources per catalog entry with the inner
//! expectation exact, and emits CSV rows plus a JSON run manifest.
//!
//! Replaying a config with the same seed yields byte-identical CSV: cell
//! seeds are derived from the master seed and the cell key by a fixed hash,
//! and rows are ordered by sorted cell key regardless of worker scheduling.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use qlab::catalog::{entries_for, function_case, generated_summation_entries, CatalogEntry};
use qlab::metrics::{
    delta_key, evaluate_suite, qubit_lower_bound_check, ProblemBound,
};
use qlab::reductions::QueryVariant;
use qlab::Error as QlabError;

use crate::config::ExperimentConfig;

/// CSV schema identifier; bump when the column set changes.
pub const CSV_SCHEMA: &str = "qlab-rows-v1";

#[derive(Debug)]
pub enum RunError {
    Config(String),
    ResourceCap(String),
    Failure(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::ResourceCap(m) => write!(f, "resource cap: {m}"),
            RunError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Failure(_) => 1,
            RunError::Config(_) => 2,
            RunError::ResourceCap(_) => 3,
        }
    }
}

fn classify(e: QlabError) -> RunError {
    match e {
        QlabError::QubitCapExceeded { .. } => RunError::ResourceCap(format!(
            "{e}; switch the config to backend = \"analytic\""
        )),
        QlabError::InvalidArgument(_) | QlabError::BadEpsilon(_) | QlabError::BadDelta { .. } => {
            RunError::Config(e.to_string())
        }
        other => RunError::Failure(other.to_string()),
    }
}

/// Artifacts of one run.
#[derive(Debug)]
pub struct RunArtifacts {
    pub csv: String,
    pub manifest: String,
    pub rows: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    config_hash: &'a str,
    seed: u64,
    package_version: &'static str,
    problem: &'a str,
    rows: usize,
}

fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn config_hash(config_text: &str) -> String {
    let digest = Sha256::digest(config_text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn variant_name(v: QueryVariant) -> &'static str {
    match v {
        QueryVariant::Deterministic => "deterministic",
        QueryVariant::Randomized => "randomized",
    }
}

fn suite_entries(cfg: &ExperimentConfig) -> Result<Vec<CatalogEntry>, RunError> {
    let entries = match cfg.table_size {
        Some(n) => generated_summation_entries(&cfg.problem, n).map_err(classify)?,
        None => entries_for(&cfg.problem),
    };
    if entries.is_empty() {
        return Err(RunError::Config(format!(
            "problem: no catalog entries for '{}'",
            cfg.problem
        )));
    }
    Ok(entries)
}

fn problem_bound(entry: &CatalogEntry) -> ProblemBound {
    match &entry.kind {
        qlab::catalog::ProblemKind::BooleanSum { table } => ProblemBound::BooleanSummation {
            table_size: table.size() as u64,
        },
        qlab::catalog::ProblemKind::RealSum { .. } => ProblemBound::MeanRange { halfwidth: 0.5 },
        _ => ProblemBound::MeanRange { halfwidth: 1.0 },
    }
}

struct CellRow {
    key: String,
    line: String,
}

/// Run one experiment config (already parsed) against the config file bytes
/// used for hashing. Returns the CSV body and the manifest JSON.
pub fn run_experiment(cfg: &ExperimentConfig, config_text: &str) -> Result<RunArtifacts, RunError> {
    let hash = config_hash(config_text);
    let entries = suite_entries(cfg)?;
    let mut deltas = cfg.deltas.clone();
    deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut cells = Vec::new();
    for &variant in &cfg.variants {
        for &eps in &cfg.epsilons {
            cells.push((variant, eps));
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| RunError::Failure(e.to_string()))?;

    let results: Vec<Result<CellRow, RunError>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(variant, eps)| run_cell(cfg, &entries, &deltas, variant, eps, &hash))
            .collect()
    });

    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }
    rows.sort_by(|a, b| a.key.cmp(&b.key));

    let mut csv = String::new();
    csv.push_str("schema,problem,variant,epsilon,entries,queries_mean,qubits,rand_error");
    for d in &deltas {
        csv.push_str(&format!(",prob_error@{d}"));
    }
    csv.push_str(",checks,seed,config_hash\n");
    for row in &rows {
        csv.push_str(&row.line);
        csv.push('\n');
    }

    let manifest = serde_json::to_string_pretty(&Manifest {
        schema: "qlab-run-v1",
        config_hash: &hash,
        seed: cfg.seed,
        package_version: env!("CARGO_PKG_VERSION"),
        problem: &cfg.problem,
        rows: rows.len(),
    })
    .map_err(|e| RunError::Failure(e.to_string()))?;

    Ok(RunArtifacts {
        csv,
        manifest,
        rows: rows.len(),
    })
}

fn worker_count() -> usize {
    std::env::var("QLAB_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(0) // 0 lets the pool pick its default
}

fn run_cell(
    cfg: &ExperimentConfig,
    entries: &[CatalogEntry],
    deltas: &[f64],
    variant: QueryVariant,
    eps: f64,
    hash: &str,
) -> Result<CellRow, RunError> {
    let key = format!("{}|{}|{eps}", cfg.problem, variant_name(variant));
    let cell_seed = cfg.seed ^ fnv1a(&key);
    let randomized = variant == QueryVariant::Randomized;

    let mut queries_acc = 0.0;
    let mut qubits_max = 0u32;
    let mut rand_error_max: f64 = 0.0;
    let mut prob_error_max: BTreeMap<String, f64> = BTreeMap::new();
    let mut checks_merged: BTreeMap<String, bool> = BTreeMap::new();

    for (i, entry) in entries.iter().enumerate() {
        let case = function_case(entry, variant, eps, cfg.backend).map_err(classify)?;
        let suite = evaluate_suite(&[case], cfg.omega_samples, deltas, cell_seed ^ i as u64)
            .map_err(classify)?;
        let f = &suite.per_function[0];
        rand_error_max = rand_error_max.max(f.rand_error);
        for d in deltas {
            let k = delta_key(*d);
            let v = f.prob_error[&k];
            let slot = prob_error_max.entry(k).or_insert(0.0);
            *slot = slot.max(v);
        }
        queries_acc += suite.queries_mean;
        qubits_max = qubits_max.max(suite.qubits);
        let bound = problem_bound(entry);
        for (name, check) in
            qubit_lower_bound_check(suite.qubits, eps, &bound, randomized).map_err(classify)?
        {
            let slot = checks_merged.entry(name).or_insert(true);
            *slot = *slot && check.passed;
        }
    }
    let queries_mean = queries_acc / entries.len() as f64;
    let checks: Vec<String> = checks_merged
        .iter()
        .map(|(name, ok)| format!("{name}={}", if *ok { "pass" } else { "fail" }))
        .collect();

    let mut line = format!(
        "{CSV_SCHEMA},{},{},{eps},{},{queries_mean},{qubits_max},{rand_error_max}",
        cfg.problem,
        variant_name(variant),
        entries.len(),
    );
    for d in deltas {
        line.push_str(&format!(",{}", prob_error_max[&delta_key(*d)]));
    }
    line.push_str(&format!(",{},{cell_seed},{hash}", checks.join(";")));
    Ok(CellRow { key, line })
}

/// The sorted catalog listing for the `catalog` subcommand.
pub fn catalog_listing(filter: Option<&str>) -> String {
    let mut out = String::new();
    for entry in qlab::catalog::all_entries() {
        let line = format!(
            "{}/{}  truth={}  oracle={}  {}",
            entry.problem,
            entry.id,
            entry.truth,
            entry.provenance.label(),
            entry.description
        );
        if filter.map_or(true, |f| line.contains(f)) {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

//! Built-in catalog of problems and test functions with ground-truth
//! provenance, plus the wiring that turns a catalog entry into runnable
//! estimators and exact-law samplers for the error metrics.
//!
//! Every entry records where its ground truth comes from: a closed form, a
//! brute-force computation over the table, or a symmetry argument. The
//! Gauss-Hermite oracle used by the path entries lives here too.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{FunctionCase, LawSampler, OmegaDraw, OutcomeLaw};
use crate::oracles::{BitQueryOracle, BooleanTable, RealTable};
use crate::qae::{
    boolean_summation, budget_phase_qubits, queries_per_repetition,
    randomized_boolean_summation, randomized_query_budget, randomized_subsample_size, Backend,
    Estimate, SummationConfig,
};
use crate::reductions::{
    integrate::{integrate_r0_realize, integrate_rge1_realize},
    integrate_r0, integrate_rge1,
    path::path_realize,
    path_integrate, real_summation, real_summation_det_realize, real_summation_realize,
    PathIntegrand, QueryVariant, SmoothClassDescriptor,
};

/// Where a ground-truth value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    BruteForce,
    Symmetry,
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::BruteForce => "brute-force",
            Provenance::Symmetry => "symmetry",
        }
    }
}

/// The problem family an entry belongs to.
#[derive(Clone)]
pub enum ProblemKind {
    BooleanSum { table: BooleanTable },
    RealSum { table: RealTable },
    IntegrateR0 { f: crate::reductions::integrate::Integrand, dim: usize },
    IntegrateSmooth {
        f: crate::reductions::integrate::Integrand,
        descriptor: SmoothClassDescriptor,
    },
    Path { f: PathIntegrand },
}

/// One catalog entry: a named instance with its exact solution.
#[derive(Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub problem: String,
    pub description: String,
    pub truth: f64,
    pub provenance: Provenance,
    pub kind: ProblemKind,
}

/// Problem identifiers accepted by the experiment runner.
pub const PROBLEM_IDS: [&str; 6] = [
    "boolean-sum",
    "real-sum",
    "integrate-r0",
    "integrate-r1",
    "integrate-r2",
    "path-integrate",
];

fn seeded_real_table(n: usize, seed: u64) -> RealTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RealTable::new((0..n).map(|_| rng.random()).collect()).unwrap()
}

fn seeded_boolean_table(n: usize, ones: usize, seed: u64) -> BooleanTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bits = vec![0u8; n];
    let mut placed = 0;
    while placed < ones {
        let j = rng.random_range(0..n);
        if bits[j] == 0 {
            bits[j] = 1;
            placed += 1;
        }
    }
    BooleanTable::new(bits).unwrap()
}

/// The full built-in catalog, sorted by (problem, id).
pub fn all_entries() -> Vec<CatalogEntry> {
    use std::f64::consts::PI;
    let mut entries = vec![
        CatalogEntry {
            id: "zeros-64".into(),
            problem: "boolean-sum".into(),
            description: "all-zero table, N = 64".into(),
            truth: 0.0,
            provenance: Provenance::BruteForce,
            kind: ProblemKind::BooleanSum {
                table: BooleanTable::zeros(64).unwrap(),
            },
        },
        CatalogEntry {
            id: "ones-64".into(),
            problem: "boolean-sum".into(),
            description: "all-one table, N = 64".into(),
            truth: 1.0,
            provenance: Provenance::BruteForce,
            kind: ProblemKind::BooleanSum {
                table: BooleanTable::ones(64).unwrap(),
            },
        },
        CatalogEntry {
            id: "eleven-of-64".into(),
            problem: "boolean-sum".into(),
            description: "11 scattered ones, N = 64".into(),
            truth: 11.0 / 64.0,
            provenance: Provenance::BruteForce,
            kind: ProblemKind::BooleanSum {
                table: seeded_boolean_table(64, 11, 64011),
            },
        },
        CatalogEntry {
            id: "scattered-256".into(),
            problem: "boolean-sum".into(),
            description: "77 scattered ones, N = 256".into(),
            truth: 77.0 / 256.0,
            provenance: Provenance::BruteForce,
            kind: ProblemKind::BooleanSum {
                table: seeded_boolean_table(256, 77, 25677),
            },
        },
        CatalogEntry {
            id: "half-constant-64".into(),
            problem: "real-sum".into(),
            description: "constant table f = 1/2, N = 64".into(),
            truth: 0.5,
            provenance: Provenance::ClosedForm,
            kind: ProblemKind::RealSum {
                table: RealTable::constant(64, 0.5).unwrap(),
            },
        },
        CatalogEntry {
            id: "uniform-random-256".into(),
            problem: "real-sum".into(),
            description: "seeded uniform random table, N = 256".into(),
            truth: seeded_real_table(256, 77001).mean(),
            provenance: Provenance::BruteForce,
            kind: ProblemKind::RealSum {
                table: seeded_real_table(256, 77001),
            },
        },
        CatalogEntry {
            id: "sin-sin-2d".into(),
            problem: "integrate-r0".into(),
            description: "f(x, y) = sin(pi x) sin(pi y) on [0,1]^2".into(),
            truth: 4.0 / (PI * PI),
            provenance: Provenance::ClosedForm,
            kind: ProblemKind::IntegrateR0 {
                f: Arc::new(|x: &[f64]| (PI * x[0]).sin() * (PI * x[1]).sin()),
                dim: 2,
            },
        },
        CatalogEntry {
            id: "odd-cube-1d".into(),
            problem: "integrate-r0".into(),
            description: "f(x) = (2x - 1)^3 on [0,1]".into(),
            truth: 0.0,
            provenance: Provenance::Symmetry,
            kind: ProblemKind::IntegrateR0 {
                f: Arc::new(|x: &[f64]| (2.0 * x[0] - 1.0).powi(3)),
                dim: 1,
            },
        },
        CatalogEntry {
            id: "sin-over-pi-1d".into(),
            problem: "integrate-r1".into(),
            description: "f(x) = sin(pi x)/pi, |f'| <= 1".into(),
            truth: 2.0 / (PI * PI),
            provenance: Provenance::ClosedForm,
            kind: ProblemKind::IntegrateSmooth {
                f: Arc::new(|x: &[f64]| (PI * x[0]).sin() / PI),
                descriptor: SmoothClassDescriptor::new(1, 1),
            },
        },
        CatalogEntry {
            id: "sin-mix-2d".into(),
            problem: "integrate-r1".into(),
            description: "f(x, y) = (sin(pi x) + sin(pi y)) / (2 pi)".into(),
            truth: 2.0 / (PI * PI),
            provenance: Provenance::ClosedForm,
            kind: ProblemKind::IntegrateSmooth {
                f: Arc::new(|x: &[f64]| ((PI * x[0]).sin() + (PI * x[1]).sin()) / (2.0 * PI)),
                descriptor: SmoothClassDescriptor::new(2, 1),
            },
        },
        CatalogEntry {
            id: "sin-over-pi2-1d".into(),
            problem: "integrate-r2".into(),
            description: "f(x) = sin(pi x)/pi^2, |f''| <= 1".into(),
            truth: 2.0 / (PI * PI * PI),
            provenance: Provenance::ClosedForm,
            kind: ProblemKind::IntegrateSmooth {
                f: Arc::new(|x: &[f64]| (PI * x[0]).sin() / (PI * PI)),
                descriptor: SmoothClassDescriptor::new(1, 2),
            },
        },
        CatalogEntry {
            id: "cos-of-mean".into(),
            problem: "path-integrate".into(),
            description: "f(x) = cos(int_0^1 x(t) dt) under the Wiener measure".into(),
            truth: (-1.0f64 / 6.0).exp(),
            provenance: Provenance::ClosedForm,
            kind: ProblemKind::Path {
                f: PathIntegrand::of_path_mean(|z| z.cos(), 1.0, 1.0).unwrap(),
            },
        },
        CatalogEntry {
            id: "sin-of-mean".into(),
            problem: "path-integrate".into(),
            description: "f(x) = sin(int_0^1 x(t) dt) under the Wiener measure".into(),
            truth: 0.0,
            provenance: Provenance::Symmetry,
            kind: ProblemKind::Path {
                f: PathIntegrand::of_path_mean(|z| z.sin(), 1.0, 1.0).unwrap(),
            },
        },
    ];
    entries.sort_by(|a, b| (a.problem.as_str(), a.id.as_str()).cmp(&(b.problem.as_str(), b.id.as_str())));
    entries
}

/// Entries of one problem family.
pub fn entries_for(problem: &str) -> Vec<CatalogEntry> {
    all_entries()
        .into_iter()
        .filter(|e| e.problem == problem)
        .collect()
}

/// Summation suites regenerated at a requested table size, for experiment
/// configs that pin N. Tables are seeded from N alone, so the same N always
/// names the same functions.
pub fn generated_summation_entries(problem: &str, n: usize) -> Result<Vec<CatalogEntry>> {
    match problem {
        "boolean-sum" => {
            let scattered = seeded_boolean_table(n, (3 * n) / 10, 0xB001 + n as u64);
            let sparse = seeded_boolean_table(n, n / 16, 0xB002 + n as u64);
            Ok(vec![
                CatalogEntry {
                    id: format!("ones-{n}"),
                    problem: "boolean-sum".into(),
                    description: format!("all-one table, N = {n}"),
                    truth: 1.0,
                    provenance: Provenance::BruteForce,
                    kind: ProblemKind::BooleanSum {
                        table: BooleanTable::ones(n)?,
                    },
                },
                CatalogEntry {
                    id: format!("scattered-{n}"),
                    problem: "boolean-sum".into(),
                    description: format!("{} scattered ones, N = {n}", (3 * n) / 10),
                    truth: scattered.mean(),
                    provenance: Provenance::BruteForce,
                    kind: ProblemKind::BooleanSum { table: scattered },
                },
                CatalogEntry {
                    id: format!("sparse-{n}"),
                    problem: "boolean-sum".into(),
                    description: format!("{} scattered ones, N = {n}", n / 16),
                    truth: sparse.mean(),
                    provenance: Provenance::BruteForce,
                    kind: ProblemKind::BooleanSum { table: sparse },
                },
            ])
        }
        "real-sum" => {
            let table = seeded_real_table(n, 0xC001 + n as u64);
            Ok(vec![
                CatalogEntry {
                    id: format!("half-constant-{n}"),
                    problem: "real-sum".into(),
                    description: format!("constant table f = 1/2, N = {n}"),
                    truth: 0.5,
                    provenance: Provenance::ClosedForm,
                    kind: ProblemKind::RealSum {
                        table: RealTable::constant(n, 0.5)?,
                    },
                },
                CatalogEntry {
                    id: format!("uniform-random-{n}"),
                    problem: "real-sum".into(),
                    description: format!("seeded uniform random table, N = {n}"),
                    truth: table.mean(),
                    provenance: Provenance::BruteForce,
                    kind: ProblemKind::RealSum { table },
                },
            ])
        }
        other => Err(Error::InvalidArgument(format!(
            "table_size applies to boolean-sum and real-sum only, not '{other}'"
        ))),
    }
}

/// Run the estimator behind an entry once.
pub fn run_entry(
    entry: &CatalogEntry,
    variant: QueryVariant,
    eps: f64,
    backend: Backend,
    seed: u64,
) -> Result<Estimate> {
    match (&entry.kind, variant) {
        (ProblemKind::BooleanSum { table }, QueryVariant::Randomized) => {
            let cfg = SummationConfig {
                repetitions: 7,
                backend,
            };
            randomized_boolean_summation(table, eps, &cfg, seed)
        }
        (ProblemKind::BooleanSum { table }, QueryVariant::Deterministic) => {
            let cfg = SummationConfig {
                repetitions: 7,
                backend,
            };
            let oracle = BitQueryOracle::from_boolean_table(table);
            boolean_summation(&oracle, randomized_query_budget(eps), &cfg, seed)
        }
        (ProblemKind::RealSum { table }, QueryVariant::Randomized) => {
            real_summation(table, eps, backend, seed)
        }
        (ProblemKind::RealSum { table }, QueryVariant::Deterministic) => {
            let realized = real_summation_det_realize(table, eps)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut est = realized.sample(backend, &mut rng)?;
            est.seed = seed;
            Ok(est)
        }
        (ProblemKind::IntegrateR0 { f, dim }, QueryVariant::Randomized) => {
            integrate_r0(f, *dim, eps, backend, seed)
        }
        (ProblemKind::IntegrateR0 { .. }, QueryVariant::Deterministic) => {
            Err(Error::InvalidArgument(
                "integrate-r0 has no deterministic-query variant: any fixed sample set \
                 admits indistinguishable functions with integrals near +1 and -1"
                    .into(),
            ))
        }
        (ProblemKind::IntegrateSmooth { f, descriptor }, variant) => {
            integrate_rge1(f, descriptor, eps, variant, backend, seed)
        }
        (ProblemKind::Path { f }, QueryVariant::Randomized) => {
            path_integrate(f, eps, backend, seed)
        }
        (ProblemKind::Path { .. }, QueryVariant::Deterministic) => Err(Error::InvalidArgument(
            "path-integrate is implemented with randomized queries only; the \
             deterministic-query register would need eps^-2 log(1/eps) qubits"
                .into(),
        )),
    }
}

/// Exact-law sampler for an entry: one call realizes omega and returns the
/// exact outcome law of the measurement layer, computed by the chosen
/// backend (closed form, or full circuit simulation on the realized
/// subsample).
pub fn law_sampler(
    entry: &CatalogEntry,
    variant: QueryVariant,
    eps: f64,
    backend: Backend,
) -> Result<LawSampler> {
    match (&entry.kind, variant) {
        (ProblemKind::BooleanSum { table }, QueryVariant::Randomized) => {
            let table = table.clone();
            Ok(Box::new(move |rng: &mut ChaCha8Rng| {
                let m = randomized_subsample_size(eps);
                let oracle = crate::oracles::make_randomized_subsample_oracle(&table, m, rng)?;
                let budget = randomized_query_budget(eps);
                let t = budget_phase_qubits(budget, 7)?;
                Ok(OmegaDraw {
                    law: OutcomeLaw::new(boolean_median_law(&oracle, t, backend)?),
                    queries: 7 * queries_per_repetition(t),
                    qubits: oracle.index_width() + 1 + t,
                })
            }))
        }
        (ProblemKind::BooleanSum { table }, QueryVariant::Deterministic) => {
            let table = table.clone();
            Ok(Box::new(move |_| {
                let oracle = BitQueryOracle::from_boolean_table(&table);
                let budget = randomized_query_budget(eps);
                let t = budget_phase_qubits(budget, 7)?;
                Ok(OmegaDraw {
                    law: OutcomeLaw::new(boolean_median_law(&oracle, t, backend)?),
                    queries: 7 * queries_per_repetition(t),
                    qubits: table.index_width() + 1 + t,
                })
            }))
        }
        (ProblemKind::RealSum { table }, QueryVariant::Randomized) => {
            let table = table.clone();
            Ok(Box::new(move |rng: &mut ChaCha8Rng| {
                let realized = real_summation_realize(&table, eps, rng)?;
                Ok(OmegaDraw {
                    law: OutcomeLaw::new(realized.outcome_law_with(backend)?),
                    queries: realized.queries(),
                    qubits: realized.qubits(),
                })
            }))
        }
        (ProblemKind::RealSum { table }, QueryVariant::Deterministic) => {
            let table = table.clone();
            Ok(Box::new(move |_| {
                let realized = real_summation_det_realize(&table, eps)?;
                Ok(OmegaDraw {
                    law: OutcomeLaw::new(realized.outcome_law_with(backend)?),
                    queries: realized.queries(),
                    qubits: realized.qubits(),
                })
            }))
        }
        (ProblemKind::IntegrateR0 { f, dim }, QueryVariant::Randomized) => {
            let f = f.clone();
            let dim = *dim;
            Ok(Box::new(move |rng: &mut ChaCha8Rng| {
                let realized = integrate_r0_realize(f.as_ref(), dim, eps, rng)?;
                Ok(OmegaDraw {
                    law: OutcomeLaw::new(realized.outcome_law_with(backend)?),
                    queries: realized.queries(),
                    qubits: realized.qubits(),
                })
            }))
        }
        (ProblemKind::IntegrateR0 { .. }, QueryVariant::Deterministic) => {
            Err(Error::InvalidArgument(
                "integrate-r0 has no deterministic-query variant".into(),
            ))
        }
        (ProblemKind::IntegrateSmooth { f, descriptor }, variant) => {
            let f = f.clone();
            let descriptor = *descriptor;
            Ok(Box::new(move |rng: &mut ChaCha8Rng| {
                let realized = integrate_rge1_realize(f.as_ref(), &descriptor, eps, variant, rng)?;
                Ok(OmegaDraw {
                    law: OutcomeLaw::new(realized.outcome_law_with(backend)?),
                    queries: realized.queries(),
                    qubits: realized.qubits(),
                })
            }))
        }
        (ProblemKind::Path { f }, QueryVariant::Randomized) => {
            let f = f.clone();
            Ok(Box::new(move |rng: &mut ChaCha8Rng| {
                let realized = path_realize(&f, eps, rng)?;
                Ok(OmegaDraw {
                    law: OutcomeLaw::new(realized.outcome_law_with(backend)?),
                    queries: realized.queries(),
                    qubits: realized.qubits(),
                })
            }))
        }
        (ProblemKind::Path { .. }, QueryVariant::Deterministic) => Err(Error::InvalidArgument(
            "path-integrate is implemented with randomized queries only".into(),
        )),
    }
}

/// Function case (name, truth, law sampler) for the error metrics.
pub fn function_case(
    entry: &CatalogEntry,
    variant: QueryVariant,
    eps: f64,
    backend: Backend,
) -> Result<FunctionCase> {
    Ok(FunctionCase {
        name: entry.id.to_string(),
        truth: entry.truth,
        sampler: law_sampler(entry, variant, eps, backend)?,
    })
}

/// Median-of-7 value law of a Boolean oracle under the chosen backend.
fn boolean_median_law(
    oracle: &BitQueryOracle,
    t: u32,
    backend: Backend,
) -> Result<Vec<(f64, f64)>> {
    let single = match backend {
        Backend::Analytic => crate::qae::single_run_value_law(oracle.boolean_mean(), t),
        Backend::Statevector => {
            let dist = crate::qae::statevector_outcome_distribution(oracle, t)?;
            crate::qae::value_law_from_distribution(&dist, t)
        }
    };
    Ok(crate::qae::median_law_from_values(&single, 7))
}

// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature: the ground-truth oracle for Gaussian moments.
// ---------------------------------------------------------------------------

/// Orthonormal Hermite polynomials p_0..p_n at x (weight e^{-x^2}).
fn hermite_orthonormal(n: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(std::f64::consts::PI.powf(-0.25));
    if n >= 1 {
        p.push(2f64.sqrt() * x * p[0]);
    }
    for k in 1..n {
        let next = x * (2.0 / (k as f64 + 1.0)).sqrt() * p[k]
            - (k as f64 / (k as f64 + 1.0)).sqrt() * p[k - 1];
        p.push(next);
    }
    p
}

/// Nodes and weights of n-point Gauss-Hermite quadrature:
/// int g(x) e^{-x^2} dx ~ sum_i w_i g(x_i).
///
/// Nodes are the roots of the degree-n orthonormal Hermite polynomial, found
/// by interlacing bisection; weights come from the Christoffel function
/// w_i = (sum_{k<n} p_k(x_i)^2)^{-1}.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let eval = |k: usize, x: f64| *hermite_orthonormal(k, x).last().unwrap();
    let mut roots = vec![0.0f64]; // roots of p_1
    for k in 2..=n {
        let bound = (2.0 * k as f64 + 1.0).sqrt() + 1.0;
        let mut cuts = Vec::with_capacity(k + 1);
        cuts.push(-bound);
        cuts.extend(roots.iter().copied());
        cuts.push(bound);
        let mut next = Vec::with_capacity(k);
        for w in cuts.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let flo = eval(k, lo);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (eval(k, mid) > 0.0) == (flo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            next.push(0.5 * (lo + hi));
        }
        roots = next;
    }
    let weights = roots
        .iter()
        .map(|&x| {
            let p = hermite_orthonormal(n - 1, x);
            1.0 / p.iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    (roots, weights)
}

/// E[g(Z)] for Z ~ Normal(0, variance), by Gauss-Hermite quadrature.
pub fn gaussian_expectation(g: &dyn Fn(f64) -> f64, variance: f64, order: usize) -> f64 {
    let (nodes, weights) = gauss_hermite(order);
    let scale = (2.0 * variance).sqrt();
    let norm = std::f64::consts::PI.sqrt();
    nodes
        .iter()
        .zip(&weights)
        .map(|(&x, &w)| w * g(scale * x))
        .sum::<f64>()
        / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_hermite_moments() {
        let (nodes, weights) = gauss_hermite(20);
        assert_eq!(nodes.len(), 20);
        let total: f64 = weights.iter().sum();
        assert!((total - std::f64::consts::PI.sqrt()).abs() <= 1e-12);
        let second: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * x * x)
            .sum();
        assert!((second - std::f64::consts::PI.sqrt() / 2.0).abs() <= 1e-12);
    }

    #[test]
    fn gauss_hermite_cosine_moment() {
        // E[cos Z] = exp(-var/2) for Z ~ N(0, var).
        for &var in &[1.0 / 3.0, 0.5, 2.0] {
            let v = gaussian_expectation(&|z| z.cos(), var, 40);
            assert!((v - (-var / 2.0f64).exp()).abs() <= 1e-12, "var {var}");
        }
    }

    #[test]
    fn catalog_is_sorted_and_complete() {
        let entries = all_entries();
        let mut keys: Vec<(&str, &str)> = entries
            .iter()
            .map(|e| (e.problem.as_str(), e.id.as_str()))
            .collect();
        let sorted = {
            let mut s = keys.clone();
            s.sort();
            s
        };
        assert_eq!(keys, sorted);
        keys.dedup();
        assert_eq!(keys.len(), entries.len());
        for problem in ["boolean-sum", "real-sum", "integrate-r0", "integrate-r1", "path-integrate"]
        {
            assert!(
                entries.iter().any(|e| e.problem == problem),
                "missing {problem}"
            );
        }
    }

    #[test]
    fn catalog_truths_are_consistent_with_tables() {
        for entry in all_entries() {
            match &entry.kind {
                ProblemKind::BooleanSum { table } => {
                    assert!((table.mean() - entry.truth).abs() < 1e-12, "{}", entry.id)
                }
                ProblemKind::RealSum { table } => {
                    assert!((table.mean() - entry.truth).abs() < 1e-12, "{}", entry.id)
                }
                _ => {}
            }
        }
    }

    #[test]
    fn r0_has_no_deterministic_variant() {
        let entry = entries_for("integrate-r0").pop().unwrap();
        assert!(run_entry(
            &entry,
            QueryVariant::Deterministic,
            0.1,
            Backend::Analytic,
            0
        )
        .is_err());
    }

    #[test]
    fn entry_runs_land_near_truth() {
        for entry in all_entries() {
            let est = run_entry(&entry, QueryVariant::Randomized, 0.2, Backend::Analytic, 7)
                .unwrap();
            assert!(
                (est.value - entry.truth).abs() <= 0.25,
                "{}: {} vs {}",
                entry.id,
                est.value,
                entry.truth
            );
        }
    }

    #[test]
    fn law_sampler_matches_estimator_resources() {
        let entry = entries_for("boolean-sum")
            .into_iter()
            .find(|e| e.id == "scattered-256")
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sampler = law_sampler(&entry, QueryVariant::Randomized, 0.1, Backend::Analytic).unwrap();
        let draw = sampler(&mut rng).unwrap();
        let est = run_entry(&entry, QueryVariant::Randomized, 0.1, Backend::Analytic, 3).unwrap();
        assert_eq!(draw.queries, est.queries_used);
        assert_eq!(draw.qubits, est.qubits_used);
    }
}

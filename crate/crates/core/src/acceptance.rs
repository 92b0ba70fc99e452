//! The acceptance suite: one function per shipped guarantee, runnable from
//! `cargo test` (tests/acceptance.rs) and from the command line
//! (`qlab check`). Every tolerance is pinned here.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::{
    entropy_interval, info_complexity_boolean, lipschitz_quadrature, monte_carlo,
    AdversarialPair, PiecewiseLinear,
};
use crate::catalog::{
    all_entries, entries_for, function_case, gaussian_expectation, run_entry,
};
use crate::error::Result;
use crate::metrics::{
    chebyshev_check, delta_key, evaluate_suite, qubit_lower_bound_check, randomized_error,
    separation_check, ChebyshevForm, FunctionCase, OmegaDraw, OutcomeLaw, ProblemBound,
};
use crate::oracles::{BitQueryOracle, BooleanTable};
use crate::qae::{
    boolean_summation, budget_phase_qubits, qae_exact_distribution, randomized_boolean_summation,
    randomized_query_budget, recover_exact_mean_rational, statevector_outcome_distribution,
    worst_case_l2_error, Backend, SummationConfig,
};
use crate::reductions::{
    binary_expand, kl_trace_partial, kl_variance, path::PATH_QUBIT_LOG_FACTOR, QueryVariant,
};

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:2} {:<28} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.details
        )
    }
}

const NAMES: [&str; 12] = [
    "backend-equivalence",
    "query-rate-slope",
    "qubit-separation",
    "exact-recovery",
    "reduction-identity",
    "r0-separation",
    "r1-query-rate",
    "path-integration",
    "kl-trace",
    "chebyshev-relations",
    "lower-bound-consistency",
    "classical-baselines",
];

/// Run every criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    (1..=12).map(run_criterion).collect()
}

/// Run one criterion by number (1..=12).
pub fn run_criterion(id: u32) -> CriterionResult {
    let name = NAMES[(id - 1) as usize];
    let outcome = match id {
        1 => backend_equivalence(),
        2 => query_rate_slope(),
        3 => qubit_separation(),
        4 => exact_recovery(),
        5 => reduction_identity(),
        6 => r0_separation(),
        7 => r1_query_rate(),
        8 => path_integration(),
        9 => kl_trace(),
        10 => chebyshev_relations(),
        11 => lower_bound_consistency(),
        12 => classical_baselines(),
        _ => panic!("criterion id out of range"),
    };
    match outcome {
        Ok((passed, details)) => CriterionResult {
            id,
            name,
            passed,
            details,
        },
        Err(e) => CriterionResult {
            id,
            name,
            passed: false,
            details: format!("error: {e}"),
        },
    }
}

type Check = Result<(bool, String)>;

/// 1. Statevector and analytic outcome distributions agree within 1e-9
/// total variation for every mean k/N, N in {8, 16, 64}, t in 2..=5.
fn backend_equivalence() -> Check {
    let mut worst_tv: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for &n in &[8usize, 16, 64] {
        for t in 2..=5u32 {
            for ones in 0..=n {
                // scattered placement, not just leading blocks
                let mut bits = vec![0u8; n];
                let mut placed = 0;
                while placed < ones {
                    let j = rng.random_range(0..n);
                    if bits[j] == 0 {
                        bits[j] = 1;
                        placed += 1;
                    }
                }
                let table = BooleanTable::new(bits)?;
                let oracle = BitQueryOracle::from_boolean_table(&table);
                let circuit = statevector_outcome_distribution(&oracle, t)?;
                let analytic = qae_exact_distribution(table.mean(), t);
                worst_tv = worst_tv.max(circuit.total_variation(&analytic));
            }
        }
    }
    Ok((
        worst_tv <= 1e-9,
        format!("max total variation {worst_tv:.2e} (tolerance 1e-9)"),
    ))
}

/// 2. Exact worst-case L2 error of the 7-repetition estimator versus every
/// integer query budget n in 16..=1024: log-log slope -1 +- 0.1.
fn query_rate_slope() -> Check {
    let mut per_t: BTreeMap<u32, f64> = BTreeMap::new();
    let mut pts = Vec::new();
    for n in 16u64..=1024 {
        let t = budget_phase_qubits(n, 7)?;
        let e = *per_t.entry(t).or_insert_with(|| worst_case_l2_error(t, 7));
        pts.push(((n as f64).ln(), e.ln()));
    }
    let slope = fit_slope(&pts);
    Ok((
        (slope + 1.0).abs() <= 0.1,
        format!("slope {slope:.4} (required -1 +- 0.1)"),
    ))
}

/// 3. At eps = 0.05, deterministic-query qubits grow by exactly 8 when N
/// goes 2^8 -> 2^16 while randomized-query qubits are exactly equal.
fn qubit_separation() -> Check {
    let eps = 0.05;
    let cfg = SummationConfig::analytic();
    let small = BooleanTable::with_leading_ones(1 << 8, 100)?;
    let large = BooleanTable::with_leading_ones(1 << 16, 30_000)?;
    let budget = randomized_query_budget(eps);
    let det_small = boolean_summation(
        &BitQueryOracle::from_boolean_table(&small),
        budget,
        &cfg,
        301,
    )?;
    let det_large = boolean_summation(
        &BitQueryOracle::from_boolean_table(&large),
        budget,
        &cfg,
        302,
    )?;
    let ran_small = randomized_boolean_summation(&small, eps, &cfg, 303)?;
    let ran_large = randomized_boolean_summation(&large, eps, &cfg, 304)?;
    let det_growth = det_large.qubits_used as i64 - det_small.qubits_used as i64;
    let passed = det_growth == 8 && ran_small.qubits_used == ran_large.qubits_used;
    Ok((
        passed,
        format!(
            "deterministic {} -> {} qubits (+{det_growth}); randomized {} == {}",
            det_small.qubits_used,
            det_large.qubits_used,
            ran_small.qubits_used,
            ran_large.qubits_used
        ),
    ))
}

/// 4. Exact recovery of k/N from any estimate within 1/(2N), exhaustively
/// over N <= 256, all k, and a rational grid of estimates per cell.
fn exact_recovery() -> Check {
    use num_rational::Ratio;
    let grid = 5i64;
    let mut cells = 0u64;
    for n in 1i64..=256 {
        for k in 0..=n {
            for j in -(grid - 1)..=(grid - 1) {
                // A = k/N + j/(2 N grid), strictly inside the cell
                let a = Ratio::new(2 * k * grid + j, 2 * n * grid);
                if a < Ratio::new(0, 1) || a > Ratio::new(1, 1) {
                    continue;
                }
                let recovered = recover_exact_mean_rational(a, n);
                if recovered != Ratio::new(k, n) {
                    return Ok((
                        false,
                        format!("N={n} k={k} offset {j}/{}: got {recovered}", 2 * n * grid),
                    ));
                }
                cells += 1;
            }
        }
    }
    Ok((true, format!("{cells} rational cells recovered exactly")))
}

/// 5. S_K(f) = B over D exactly (integer arithmetic) for N <= 16, K <= 6,
/// 100 random tables, with the truncation bias within 2^-K throughout.
fn reduction_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut checked = 0u64;
    for trial in 0..100 {
        let n = 2 + (trial % 15) as usize;
        let values: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let table = crate::oracles::RealTable::new(values)?;
        for k in 1..=6u32 {
            let e = binary_expand(&table, k)?;
            let mut ones: u128 = 0;
            for flat in 0..e.domain_size() {
                ones += u128::from(e.bit_at_flat(flat));
            }
            let (num, den) = e.truncated_mean_exact();
            if ones != num || den != (n as u128) << k {
                return Ok((false, format!("identity broken at N={n}, K={k}")));
            }
            if (table.mean() - e.truncated_mean()).abs() > 2f64.powi(-(k as i32)) {
                return Ok((false, format!("truncation bound broken at N={n}, K={k}")));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} (table, K) pairs verified by enumeration")))
}

/// 6. r = 0 separation: exact adversarial certification of worst-case error
/// >= 0.8 for 2^k-point deterministic sample sets (k <= 10, d = 1, 2), and
/// measured randomized error of integrate-r0 at eps = 0.1 within eps at
/// 3 sigma over 200 omega draws.
fn r0_separation() -> Check {
    let gamma = 0.2;
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for k in [4u32, 7, 10] {
        let n = 1usize << k;
        // d = 1: uniform grid and a random set
        let grid: Vec<Vec<f64>> = (0..n).map(|i| vec![(i as f64 + 0.5) / n as f64]).collect();
        let random1: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random()]).collect();
        for points in [&grid, &random1] {
            let cert = AdversarialPair::new(points, 1, gamma)?.certify(gamma);
            if !cert.valid || cert.integral_lower_bound < 0.8 {
                return Ok((
                    false,
                    format!("d=1 certification failed at 2^{k} points: {cert:?}"),
                ));
            }
        }
        // d = 2: random set
        let random2: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random(), rng.random()])
            .collect();
        let cert = AdversarialPair::new(&random2, 2, gamma)?.certify(gamma);
        if !cert.valid || cert.integral_lower_bound < 0.8 {
            return Ok((
                false,
                format!("d=2 certification failed at 2^{k} points: {cert:?}"),
            ));
        }
    }
    // randomized route achieves eps on the catalog
    let eps = 0.1;
    let mut details = String::from("certified >= 0.8; ");
    for entry in entries_for("integrate-r0") {
        let case = function_case(&entry, QueryVariant::Randomized, eps, Backend::Analytic)?;
        let suite = randomized_error(&[case], 200, 607)?;
        let f = &suite.per_function[0];
        let bound = f.rand_error + 3.0 * f.std_error;
        details.push_str(&format!("{}: {:.4}+-{:.4} ", entry.id, f.rand_error, f.std_error));
        if bound > eps {
            return Ok((false, format!("{details}; 3-sigma bound {bound:.4} above {eps}")));
        }
    }
    Ok((true, details))
}

/// 7. d = 1, r = 1 query-count slope -0.5 +- 0.15 over
/// eps in {0.2, 0.1, 0.05, 0.025}.
fn r1_query_rate() -> Check {
    let entry = entries_for("integrate-r1")
        .into_iter()
        .find(|e| e.id == "sin-over-pi-1d")
        .unwrap();
    let mut pts = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut detail = String::new();
    for &eps in &[0.2, 0.1, 0.05, 0.025] {
        let sampler = crate::catalog::law_sampler(&entry, QueryVariant::Randomized, eps, Backend::Analytic)?;
        let draw = sampler(&mut rng)?;
        detail.push_str(&format!("({eps}, {}) ", draw.queries));
        pts.push((eps.ln(), (draw.queries as f64).ln()));
    }
    let slope = fit_slope(&pts);
    Ok((
        (slope + 0.5).abs() <= 0.15,
        format!("slope {slope:.4} (required -0.5 +- 0.15); queries {detail}"),
    ))
}

/// 8. Path integration at eps = 0.1: oracle validation (Gauss-Hermite value
/// against 1e7-sample Monte Carlo at 3 sigma), measured randomized error
/// within eps over 100 draws, and the qubit count below the documented
/// log-factor while beating the deterministic-setting requirement.
fn path_integration() -> Check {
    let eps = 0.1;
    let truth = (-1.0f64 / 6.0).exp();
    // oracle validation, run once
    let gh = gaussian_expectation(&|z| z.cos(), 1.0 / 3.0, 40);
    if (gh - truth).abs() > 1e-12 {
        return Ok((false, format!("Gauss-Hermite oracle {gh} vs closed form {truth}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let draws = 10_000_000usize;
    let sigma = (1.0f64 / 3.0).sqrt();
    let mut acc = 0.0;
    let mut acc_sq = 0.0;
    for _ in 0..draws {
        let z: f64 = rand_distr::Distribution::sample(
            &rand_distr::Normal::new(0.0, sigma).unwrap(),
            &mut rng,
        );
        let v = z.cos();
        acc += v;
        acc_sq += v * v;
    }
    let mc = acc / draws as f64;
    let mc_sd = ((acc_sq / draws as f64 - mc * mc) / draws as f64).sqrt();
    if (mc - gh).abs() > 3.0 * mc_sd {
        return Ok((
            false,
            format!("oracle validation: MC {mc:.6} vs GH {gh:.6} beyond 3 sigma {mc_sd:.2e}"),
        ));
    }
    // measured randomized error over 100 omega draws
    let entry = entries_for("path-integrate")
        .into_iter()
        .find(|e| e.id == "cos-of-mean")
        .unwrap();
    let case = function_case(&entry, QueryVariant::Randomized, eps, Backend::Analytic)?;
    let suite = randomized_error(&[case], 100, 809)?;
    let f = &suite.per_function[0];
    if f.rand_error > eps {
        return Ok((false, format!("randomized error {:.4} above {eps}", f.rand_error)));
    }
    // qubit budget: within the documented log factor and strictly below the
    // deterministic-setting requirement eps^-2 log2(1/eps)
    let qubits = suite.qubits as f64;
    let log_cap = PATH_QUBIT_LOG_FACTOR * (1.0 / eps).log2();
    let deterministic_requirement = (1.0 / (eps * eps)) * (1.0 / eps).log2();
    let passed = qubits <= log_cap && qubits < deterministic_requirement;
    Ok((
        passed,
        format!(
            "error {:.4} <= {eps}; qubits {} <= {log_cap:.1} and < {deterministic_requirement:.0}; MC check {mc:.6}",
            f.rand_error, suite.qubits
        ),
    ))
}

/// 9. Karhunen-Loeve eigenvariances and the trace partial sum.
fn kl_trace() -> Check {
    use std::f64::consts::PI;
    let l1_ok = (kl_variance(1)? - 4.0 / (PI * PI)).abs() <= 1e-12;
    let l2_ok = (kl_variance(2)? - 4.0 / (9.0 * PI * PI)).abs() <= 1e-12;
    let partial = kl_trace_partial(1000);
    let trace_ok = (0.5 - 2e-4..=0.5).contains(&partial);
    Ok((
        l1_ok && l2_ok && trace_ok,
        format!("lambda1 ok: {l1_ok}, lambda2 ok: {l2_ok}, partial sum {partial:.6}"),
    ))
}

/// 10. Chebyshev relations at delta in {0.05, 0.25} on every shipped
/// algorithm/problem pair (quantum form), on classical Monte Carlo
/// (classical form), and tightly on the constructed extremal two-point law.
fn chebyshev_relations() -> Check {
    let deltas = [0.05, 0.25];
    let w = 200;
    let eps = 0.2;
    let mut seed = 1000;
    let mut pairs = 0;
    for entry in all_entries() {
        for variant in [QueryVariant::Deterministic, QueryVariant::Randomized] {
            let case = match function_case(&entry, variant, eps, Backend::Analytic) {
                Ok(c) => c,
                Err(_) => continue, // variant not shipped for this problem
            };
            seed += 1;
            let suite = evaluate_suite(&[case], w, &deltas, seed)?;
            let f = &suite.per_function[0];
            for &d in &deltas {
                let out = chebyshev_check(
                    f.rand_error,
                    f.prob_error[&delta_key(d)],
                    d,
                    ChebyshevForm::Quantum,
                );
                if !out.passed {
                    return Ok((
                        false,
                        format!("{} ({variant:?}) fails at delta {d}: {out:?}", entry.id),
                    ));
                }
                pairs += 1;
            }
        }
    }
    // classical Monte Carlo under the delta^-1/2 form
    let truth = 4.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let mc_case = FunctionCase {
        name: "mc-sin-sin".into(),
        truth,
        sampler: Box::new(move |rng| {
            let v = monte_carlo(
                &|x: &[f64]| (std::f64::consts::PI * x[0]).sin() * (std::f64::consts::PI * x[1]).sin(),
                400,
                2,
                rng,
            );
            Ok(OmegaDraw {
                law: OutcomeLaw::point_mass(v),
                queries: 400,
                qubits: 0,
            })
        }),
    };
    let suite = evaluate_suite(&[mc_case], 400, &deltas, 2000)?;
    let f = &suite.per_function[0];
    for &d in &deltas {
        let out = chebyshev_check(
            f.rand_error,
            f.prob_error[&delta_key(d)],
            d,
            ChebyshevForm::Classical,
        );
        if !out.passed {
            return Ok((false, format!("classical MC fails at delta {d}: {out:?}")));
        }
        pairs += 1;
    }
    // extremal two-point law: zero margin up to 1e-9
    let delta = 0.25f64;
    let spike = 0.8;
    let out = chebyshev_check(
        spike * delta.sqrt(),
        spike,
        delta,
        ChebyshevForm::Classical,
    );
    if !out.passed || out.margin.abs() > 1e-9 {
        return Ok((false, format!("extremal law margin {:.2e}", out.margin)));
    }
    Ok((
        true,
        format!("{pairs} algorithm/problem/delta checks passed; extremal margin {:.1e}", out.margin),
    ))
}

/// 11. Lower-bound consistency at desk scale and the qubit separation at
/// N = 2^16, eps = 0.05.
fn lower_bound_consistency() -> Check {
    let cfg = SummationConfig::analytic();
    let mut checked = 0;
    for entry in entries_for("boolean-sum") {
        let table = match &entry.kind {
            crate::catalog::ProblemKind::BooleanSum { table } => table.clone(),
            _ => unreachable!(),
        };
        let problem = ProblemBound::BooleanSummation {
            table_size: table.size() as u64,
        };
        for &eps in &[0.2, 0.1, 0.05] {
            let det = run_entry(&entry, QueryVariant::Deterministic, eps, Backend::Analytic, 42)?;
            for (name, check) in qubit_lower_bound_check(det.qubits_used, eps, &problem, false)? {
                if !check.passed {
                    return Ok((
                        false,
                        format!("{} deterministic {name} fails at eps {eps}", entry.id),
                    ));
                }
                checked += 1;
            }
            let ran = run_entry(&entry, QueryVariant::Randomized, eps, Backend::Analytic, 43)?;
            for (name, check) in qubit_lower_bound_check(ran.qubits_used, eps, &problem, true)? {
                if !check.passed {
                    return Ok((
                        false,
                        format!("{} randomized {name} fails at eps {eps}", entry.id),
                    ));
                }
                checked += 1;
            }
        }
    }
    // The separation the randomized setting exists for, at N = 2^16,
    // eps = 0.05: the randomized query reads 2^m1 = m sample points, which
    // sits strictly below the worst-case information complexity that any
    // deterministic-query run must cover — and the register is smaller than
    // the deterministic one on the same instance.
    let eps = 0.05;
    let big = BooleanTable::with_leading_ones(1 << 16, 11_111)?;
    let ran = randomized_boolean_summation(&big, eps, &cfg, 44)?;
    let sample_points = crate::qae::randomized_subsample_size(eps) as u64;
    let sep = separation_check(sample_points, eps, 1 << 16)?;
    let det = boolean_summation(
        &BitQueryOracle::from_boolean_table(&big),
        randomized_query_budget(eps),
        &cfg,
        45,
    )?;
    let wor = info_complexity_boolean(eps, 1 << 16)?;
    let qubit_gap = ran.qubits_used < det.qubits_used;
    Ok((
        sep.passed && qubit_gap,
        format!(
            "{checked} bound checks passed; at N=2^16: {sample_points} sample points < {wor} \
             = ceil(N(1-2 eps)); registers {} < {} qubits",
            ran.qubits_used, det.qubits_used
        ),
    ))
}

/// 12. Classical baselines: Monte Carlo RMS slope -0.5 +- 0.05 and the
/// Lipschitz quadrature worst-case bound 1/(4n) over 200 certified
/// functions.
fn classical_baselines() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1212);
    let mut pts = Vec::new();
    for &n in &[100usize, 1000, 10_000] {
        let reps = 2000;
        let mut acc = 0.0;
        for _ in 0..reps {
            let v = monte_carlo(&|x: &[f64]| x[0], n, 1, &mut rng);
            acc += (v - 0.5) * (v - 0.5);
        }
        pts.push(((n as f64).ln(), (acc / reps as f64).sqrt().ln()));
    }
    let slope = fit_slope(&pts);
    if (slope + 0.5).abs() > 0.05 {
        return Ok((false, format!("Monte Carlo RMS slope {slope:.4}")));
    }
    let n = 25;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let f = PiecewiseLinear::random(&mut rng);
        let approx = lipschitz_quadrature(&|x| f.evaluate(x), n)?;
        worst = worst.max((approx - f.integral()).abs());
    }
    let bound = 1.0 / (4.0 * n as f64);
    // entropy formula sanity rides along
    let ent = entropy_interval(0.01, 0.5)?;
    let ent_ok = (ent - 50f64.log2()).abs() < 1e-12;
    Ok((
        worst <= bound + 1e-12 && ent_ok,
        format!("MC slope {slope:.4}; quadrature worst {worst:.5} <= {bound}; entropy ok: {ent_ok}"),
    ))
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let sy: f64 = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let num: f64 = pts.iter().map(|p| (p.0 - sx) * (p.1 - sy)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - sx) * (p.0 - sx)).sum();
    num / den
}

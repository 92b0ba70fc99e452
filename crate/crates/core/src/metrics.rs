//! Error functionals, Chebyshev relations, lower-bound consistency checks
//! and resource reporting.
//!
//! The randomized error of an algorithm is measured with the inner
//! expectation over measurement outcomes taken exactly (from the closed-form
//! outcome law of one omega draw) and the outer expectation over omega by
//! Monte Carlo with a reported standard error. The supremum over a function
//! class is approximated by the maximum over a documented finite suite and
//! is always labelled "suite max", never "complexity".

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qae::Estimate;

/// A finite outcome law: atoms (estimate, probability) of one realized run.
#[derive(Clone, Debug)]
pub struct OutcomeLaw {
    atoms: Vec<(f64, f64)>,
}

impl OutcomeLaw {
    pub fn new(atoms: Vec<(f64, f64)>) -> Self {
        let total: f64 = atoms.iter().map(|&(_, p)| p).sum();
        assert!(
            (total - 1.0).abs() <= 1e-9,
            "outcome law sums to {total}, not 1"
        );
        OutcomeLaw { atoms }
    }

    pub fn point_mass(value: f64) -> Self {
        OutcomeLaw {
            atoms: vec![(value, 1.0)],
        }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Exact L2 error against the ground truth:
    /// sqrt(sum_j p_j |truth - v_j|^2).
    pub fn l2_error(&self, truth: f64) -> f64 {
        self.squared_error(truth).sqrt()
    }

    pub fn squared_error(&self, truth: f64) -> f64 {
        self.atoms
            .iter()
            .map(|&(v, p)| p * (truth - v) * (truth - v))
            .sum()
    }
}

/// One omega realization: the exact inner law plus the resources the run
/// would consume.
pub struct OmegaDraw {
    pub law: OutcomeLaw,
    pub queries: u64,
    pub qubits: u32,
}

/// Per-omega law generator of an algorithm applied to one test function.
/// Deterministic-query algorithms ignore the generator and always return the
/// same law.
pub type LawSampler = Box<dyn Fn(&mut ChaCha8Rng) -> Result<OmegaDraw> + Send + Sync>;

/// One test function of a suite: its name, ground truth and law generator.
pub struct FunctionCase {
    pub name: String,
    pub truth: f64,
    pub sampler: LawSampler,
}

/// Measured errors of one function.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionErrors {
    pub name: String,
    pub truth: f64,
    /// sqrt of the omega-average of the exact inner squared error.
    pub rand_error: f64,
    /// Standard error of `rand_error` from the omega sampling (delta
    /// method on the mean of inner squared errors).
    pub std_error: f64,
    /// (1-delta)-quantile of |truth - estimate| under the mixed law,
    /// keyed by the requested delta.
    pub prob_error: BTreeMap<String, f64>,
}

/// Suite-level error measurement.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteErrors {
    pub per_function: Vec<FunctionErrors>,
    /// Max of per-function randomized errors (proxy for the sup over the
    /// class).
    pub suite_max: f64,
    pub queries_mean: f64,
    pub qubits: u32,
}

pub fn delta_key(delta: f64) -> String {
    format!("{delta}")
}

/// Evaluate randomized and probabilistic errors of a suite over `w` omega
/// draws per function, with the inner expectation exact.
pub fn evaluate_suite(
    cases: &[FunctionCase],
    w: usize,
    deltas: &[f64],
    seed: u64,
) -> Result<SuiteErrors> {
    if w < 1 {
        return Err(Error::InvalidArgument("need at least one omega draw".into()));
    }
    for &d in deltas {
        if !(0.0 < d && d < 1.0) {
            return Err(Error::BadDelta {
                delta: d,
                range: "(0, 1)",
            });
        }
        if (w as f64) * d < 10.0 {
            return Err(Error::TooFewOmegaSamples(w, d));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_function = Vec::with_capacity(cases.len());
    let mut queries_acc = 0.0;
    let mut qubits_max = 0u32;
    let mut draws_total = 0usize;
    for case in cases {
        let mut inner_sq = Vec::with_capacity(w);
        let mut abs_atoms: Vec<(f64, f64)> = Vec::new();
        for _ in 0..w {
            let draw = (case.sampler)(&mut rng)?;
            inner_sq.push(draw.law.squared_error(case.truth));
            for &(v, p) in draw.law.atoms() {
                abs_atoms.push(((case.truth - v).abs(), p / w as f64));
            }
            queries_acc += draw.queries as f64;
            qubits_max = qubits_max.max(draw.qubits);
            draws_total += 1;
        }
        let mean_sq = inner_sq.iter().sum::<f64>() / w as f64;
        let rand_error = mean_sq.sqrt();
        let std_error = if w > 1 && rand_error > 0.0 {
            let var = inner_sq
                .iter()
                .map(|&x| (x - mean_sq) * (x - mean_sq))
                .sum::<f64>()
                / (w as f64 - 1.0);
            (var / w as f64).sqrt() / (2.0 * rand_error)
        } else {
            0.0
        };
        abs_atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut prob_error = BTreeMap::new();
        for &d in deltas {
            prob_error.insert(delta_key(d), mixed_quantile(&abs_atoms, d));
        }
        per_function.push(FunctionErrors {
            name: case.name.clone(),
            truth: case.truth,
            rand_error,
            std_error,
            prob_error,
        });
    }
    let suite_max = per_function
        .iter()
        .map(|f| f.rand_error)
        .fold(0.0f64, f64::max);
    Ok(SuiteErrors {
        per_function,
        suite_max,
        queries_mean: queries_acc / draws_total.max(1) as f64,
        qubits: qubits_max,
    })
}

/// Smallest alpha with P(|error| <= alpha) >= 1 - delta over sorted
/// (|error|, probability) atoms.
fn mixed_quantile(sorted_abs_atoms: &[(f64, f64)], delta: f64) -> f64 {
    let mut acc = 0.0;
    for &(err, p) in sorted_abs_atoms {
        acc += p;
        if acc >= 1.0 - delta - 1e-12 {
            return err;
        }
    }
    sorted_abs_atoms.last().map_or(0.0, |&(e, _)| e)
}

/// Randomized error of a suite: per-function values and their max.
pub fn randomized_error(cases: &[FunctionCase], w: usize, seed: u64) -> Result<SuiteErrors> {
    evaluate_suite(cases, w, &[], seed)
}

/// Probabilistic error at level delta: the suite max of the per-function
/// (1-delta)-quantiles. Requires w * delta >= 10.
pub fn probabilistic_error(
    cases: &[FunctionCase],
    delta: f64,
    w: usize,
    seed: u64,
) -> Result<f64> {
    let suite = evaluate_suite(cases, w, &[delta], seed)?;
    Ok(suite
        .per_function
        .iter()
        .map(|f| f.prob_error[&delta_key(delta)])
        .fold(0.0f64, f64::max))
}

/// Which Chebyshev relation applies: quantum-randomized algorithms carry the
/// delta^-1 form, classical randomized ones the delta^-1/2 form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChebyshevForm {
    Quantum,
    Classical,
}

/// Result of one consistency check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub passed: bool,
    /// Bound minus attained value; nonnegative when the check passes.
    pub margin: f64,
}

/// Chebyshev consistency: probabilistic error at delta stays below
/// delta^-1 (quantum) or delta^-1/2 (classical) times the randomized error.
pub fn chebyshev_check(
    rand_error: f64,
    prob_error: f64,
    delta: f64,
    form: ChebyshevForm,
) -> CheckOutcome {
    let factor = match form {
        ChebyshevForm::Quantum => 1.0 / delta,
        ChebyshevForm::Classical => 1.0 / delta.sqrt(),
    };
    let bound = factor * rand_error;
    let margin = bound - prob_error;
    CheckOutcome {
        passed: margin >= -1e-9,
        margin,
    }
}

/// Problems with registered closed-form lower-bound quantities.
#[derive(Clone, Debug)]
pub enum ProblemBound {
    /// Boolean mean over a table of the given size: worst-case information
    /// complexity ceil(N(1-2 eps)), solution range [0, 1].
    BooleanSummation { table_size: u64 },
    /// A problem whose solution set is an interval of the given halfwidth;
    /// only entropy and randomized-information bounds are registered.
    MeanRange { halfwidth: f64 },
}

/// Registered lower bound on the randomized information complexity of the
/// Boolean mean: eps^-2 / 16, capped by the worst-case complexity. The 1/16
/// is a conservative documented constant for the minimax variance bound.
pub fn randomized_info_lower_bound(eps: f64, table_size: u64) -> Result<u64> {
    let variance_bound = (1.0 / (16.0 * eps * eps)).ceil() as u64;
    Ok(variance_bound.min(crate::baselines::info_complexity_boolean(eps, table_size)?))
}

/// Qubit lower-bound consistency: 2^k against the registered
/// information-complexity and entropy quantities.
///
/// Deterministic-query runs must clear the worst-case information bound and
/// the entropy bound; randomized-query runs are checked only against the
/// entropy and randomized-information bounds (they legitimately beat the
/// worst-case one — asserting it would be wrong).
pub fn qubit_lower_bound_check(
    measured_qubits: u32,
    eps: f64,
    problem: &ProblemBound,
    randomized_queries: bool,
) -> Result<BTreeMap<String, CheckOutcome>> {
    let states = 2f64.powi(measured_qubits as i32);
    let mut checks = BTreeMap::new();
    let against = |required: f64| -> CheckOutcome {
        CheckOutcome {
            passed: states >= required,
            margin: states - required,
        }
    };
    match problem {
        ProblemBound::BooleanSummation { table_size } => {
            if !randomized_queries {
                let wor = crate::baselines::info_complexity_boolean(eps, *table_size)?;
                checks.insert("worst_case_info".into(), against(wor as f64));
            }
            let ent = crate::baselines::interval_covering_number(eps, 0.5)?;
            checks.insert("entropy".into(), against(ent as f64));
            let ran = randomized_info_lower_bound(eps, *table_size)?;
            checks.insert("randomized_info".into(), against(ran as f64));
        }
        ProblemBound::MeanRange { halfwidth } => {
            let ent = crate::baselines::interval_covering_number(eps, *halfwidth)?;
            checks.insert("entropy".into(), against(ent as f64));
        }
    }
    Ok(checks)
}

/// The separation a randomized-query run exhibits: the number of sample
/// points its query depends on (2^m1, the information cardinality bounded by
/// the worst-case information complexity for deterministic queries) is
/// strictly below ceil(N(1 - 2 eps)). No deterministic-query algorithm can
/// reach error eps from that little information.
pub fn separation_check(sample_points: u64, eps: f64, table_size: u64) -> Result<CheckOutcome> {
    let wor = crate::baselines::info_complexity_boolean(eps, table_size)? as f64;
    Ok(CheckOutcome {
        passed: (sample_points as f64) < wor,
        margin: wor - sample_points as f64,
    })
}

/// Aggregated resources of a batch of runs: queries are averaged (the
/// randomized query count of an algorithm is the mean of its per-omega
/// counts), qubits are the fixed register width.
#[derive(Clone, Debug, Serialize)]
pub struct ResourceRow {
    pub runs: usize,
    pub queries_mean: f64,
    pub qubits: u32,
}

pub fn resource_report(estimates: &[Estimate]) -> ResourceRow {
    assert!(!estimates.is_empty());
    let queries_mean =
        estimates.iter().map(|e| e.queries_used as f64).sum::<f64>() / estimates.len() as f64;
    let qubits = estimates.iter().map(|e| e.qubits_used).max().unwrap();
    ResourceRow {
        runs: estimates.len(),
        queries_mean,
        qubits,
    }
}

/// The serializable report emitted for one experiment cell.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub problem: String,
    pub algorithm: String,
    pub epsilon: f64,
    pub per_function: Vec<FunctionErrors>,
    pub suite_max: f64,
    pub queries_mean: f64,
    pub qubits: u32,
    pub checks: BTreeMap<String, CheckOutcome>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn constant_case(name: &str, truth: f64, value: f64) -> FunctionCase {
        FunctionCase {
            name: name.into(),
            truth,
            sampler: Box::new(move |_| {
                Ok(OmegaDraw {
                    law: OutcomeLaw::point_mass(value),
                    queries: 8,
                    qubits: 5,
                })
            }),
        }
    }

    #[test]
    fn always_correct_algorithm_has_zero_error() {
        let cases = vec![constant_case("exact", 0.4, 0.4)];
        let suite = randomized_error(&cases, 16, 1).unwrap();
        assert_eq!(suite.per_function[0].rand_error, 0.0);
        assert_eq!(suite.suite_max, 0.0);
    }

    #[test]
    fn constant_offset_has_error_equal_to_offset() {
        let cases = vec![constant_case("offset", 0.4, 0.4 + 0.03)];
        let suite = randomized_error(&cases, 8, 2).unwrap();
        assert!((suite.per_function[0].rand_error - 0.03).abs() < 1e-15);
    }

    #[test]
    fn seven_repetition_error_matches_brute_force_product_law() {
        // Independent oracle for the exact inner error: enumerate the
        // multinomial outcome counts of 7 runs at t = 4 over the collapsed
        // single-run law and take medians by hand.
        let a = 0.5;
        let t = 4;
        let single = crate::qae::single_run_value_law(a, t);
        let k = single.len();
        // all count vectors (c_1..c_k) with sum 7
        fn walk(
            single: &[(f64, f64)],
            idx: usize,
            left: u32,
            counts: &mut Vec<u32>,
            acc_sq: &mut f64,
            truth: f64,
        ) {
            if idx == single.len() - 1 {
                counts.push(left);
                // multinomial probability
                let mut p = 1.0;
                let mut fact = 5040.0; // 7!
                for (c, s) in counts.iter().zip(single) {
                    for i in 1..=*c {
                        fact /= i as f64;
                    }
                    p *= s.1.powi(*c as i32);
                }
                p *= fact;
                if p > 0.0 {
                    // median = value holding the 4th order statistic
                    let mut seen = 0;
                    let mut med = single[0].0;
                    for (c, s) in counts.iter().zip(single) {
                        seen += c;
                        if seen >= 4 {
                            med = s.0;
                            break;
                        }
                    }
                    *acc_sq += p * (med - truth) * (med - truth);
                }
                counts.pop();
                return;
            }
            for c in 0..=left {
                counts.push(c);
                walk(single, idx + 1, left - c, counts, acc_sq, truth);
                counts.pop();
            }
        }
        let mut acc_sq = 0.0;
        let mut counts = Vec::with_capacity(k);
        walk(&single, 0, 7, &mut counts, &mut acc_sq, a);
        let brute = acc_sq.sqrt();
        let direct = crate::qae::exact_l2_error(a, t, 7);
        assert!((brute - direct).abs() <= 1e-12, "{brute} vs {direct}");
        // and the suite evaluator reproduces it through the law path
        let cases = vec![FunctionCase {
            name: "half".into(),
            truth: a,
            sampler: Box::new(move |_| {
                Ok(OmegaDraw {
                    law: OutcomeLaw::new(crate::qae::exact_median_law(a, t, 7)),
                    queries: 7 * crate::qae::queries_per_repetition(t),
                    qubits: 6 + 1 + t,
                })
            }),
        }];
        let suite = randomized_error(&cases, 4, 3).unwrap();
        assert!((suite.per_function[0].rand_error - brute).abs() <= 1e-12);
    }

    #[test]
    fn probabilistic_error_of_constant_law_is_the_constant() {
        let cases = vec![constant_case("c", 0.0, 0.2)];
        for delta in [0.05, 0.25, 0.5] {
            let alpha = probabilistic_error(&cases, delta, 200, 4).unwrap();
            assert!((alpha - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn probabilistic_error_quantiles_of_two_point_law() {
        let cases = vec![FunctionCase {
            name: "two-point".into(),
            truth: 0.0,
            sampler: Box::new(|_| {
                Ok(OmegaDraw {
                    law: OutcomeLaw::new(vec![(0.0, 0.9), (1.0, 0.1)]),
                    queries: 1,
                    qubits: 1,
                })
            }),
        }];
        assert_eq!(probabilistic_error(&cases, 0.25, 100, 5).unwrap(), 0.0);
        assert_eq!(probabilistic_error(&cases, 0.05, 400, 5).unwrap(), 1.0);
    }

    #[test]
    fn probabilistic_error_needs_enough_omega_samples() {
        let cases = vec![constant_case("c", 0.0, 0.0)];
        assert!(matches!(
            probabilistic_error(&cases, 0.05, 100, 0),
            Err(Error::TooFewOmegaSamples(..))
        ));
    }

    #[test]
    fn probabilistic_error_is_nonincreasing_in_delta() {
        let cases = vec![FunctionCase {
            name: "spread".into(),
            truth: 0.0,
            sampler: Box::new(|rng| {
                let shift = rng.random::<f64>() * 0.1;
                Ok(OmegaDraw {
                    law: OutcomeLaw::new(vec![(shift, 0.6), (shift + 0.3, 0.4)]),
                    queries: 1,
                    qubits: 1,
                })
            }),
        }];
        let suite = evaluate_suite(&cases, 400, &[0.05, 0.25, 0.5], 6).unwrap();
        let pf = &suite.per_function[0];
        let a05 = pf.prob_error[&delta_key(0.05)];
        let a25 = pf.prob_error[&delta_key(0.25)];
        let a50 = pf.prob_error[&delta_key(0.5)];
        assert!(a05 >= a25 && a25 >= a50);
    }

    #[test]
    fn chebyshev_passes_on_constant_law() {
        // alpha = e exactly, bound = e / delta > e.
        let out = chebyshev_check(0.2, 0.2, 0.25, ChebyshevForm::Quantum);
        assert!(out.passed);
        assert!(out.margin > 0.0);
    }

    #[test]
    fn chebyshev_extremal_two_point_law_has_zero_margin() {
        // Law {0 w.p. 1-d, E w.p. d}: randomized error E sqrt(d), quantile at
        // level d equals E, so the classical bound is attained exactly.
        let delta = 0.25f64;
        let e = 0.8;
        let rand_error = e * delta.sqrt();
        let prob_error = e;
        let out = chebyshev_check(rand_error, prob_error, delta, ChebyshevForm::Classical);
        assert!(out.passed);
        assert!(out.margin.abs() <= 1e-9, "margin {}", out.margin);
    }

    #[test]
    fn chebyshev_detects_violations() {
        let out = chebyshev_check(0.01, 0.9, 0.25, ChebyshevForm::Quantum);
        assert!(!out.passed);
    }

    #[test]
    fn qubit_bounds_for_deterministic_boolean_summation() {
        // N = 64, eps = 0.1, k = 6 + 1 + t: 2^k >= ceil(64 * 0.8) = 52.
        let problem = ProblemBound::BooleanSummation { table_size: 64 };
        for t in 2..=5u32 {
            let checks = qubit_lower_bound_check(6 + 1 + t, 0.1, &problem, false).unwrap();
            assert!(checks["worst_case_info"].passed);
            assert!(checks["entropy"].passed);
            assert!(checks["randomized_info"].passed);
        }
    }

    #[test]
    fn qubit_bounds_for_randomized_runs_skip_worst_case() {
        let problem = ProblemBound::BooleanSummation {
            table_size: 1 << 16,
        };
        let checks = qubit_lower_bound_check(18, 0.05, &problem, true).unwrap();
        assert!(!checks.contains_key("worst_case_info"));
        assert!(checks["entropy"].passed);
        assert!(checks["randomized_info"].passed);
    }

    #[test]
    fn qubit_bound_fails_below_entropy() {
        // Synthetic report with too few qubits: entropy bound at eps = 0.01
        // needs ceil(0.5/0.01) = 50 > 2^5 states.
        let problem = ProblemBound::MeanRange { halfwidth: 0.5 };
        let checks = qubit_lower_bound_check(5, 0.01, &problem, true).unwrap();
        assert!(!checks["entropy"].passed);
    }

    #[test]
    fn resource_report_examples() {
        let mk = |q: u64| Estimate {
            value: 0.0,
            queries_used: q,
            qubits_used: 9,
            seed: 0,
            trace: vec![],
        };
        let single = resource_report(&[mk(40)]);
        assert_eq!(single.queries_mean, 40.0);
        let constant = resource_report(&[mk(12), mk(12), mk(12)]);
        assert_eq!(constant.queries_mean, 12.0);
        let mixed = resource_report(&[mk(8), mk(16)]);
        assert_eq!(mixed.queries_mean, 12.0);
        assert_eq!(mixed.qubits, 9);
    }

    #[test]
    fn error_report_serializes_with_documented_fields() {
        let report = ErrorReport {
            problem: "boolean-sum".into(),
            algorithm: "randomized".into(),
            epsilon: 0.1,
            per_function: vec![FunctionErrors {
                name: "ones".into(),
                truth: 1.0,
                rand_error: 0.0,
                std_error: 0.0,
                prob_error: BTreeMap::from([("0.25".to_string(), 0.0)]),
            }],
            suite_max: 0.0,
            queries_mean: 450.0,
            qubits: 17,
            checks: BTreeMap::from([(
                "entropy".to_string(),
                CheckOutcome {
                    passed: true,
                    margin: 3.0,
                },
            )]),
        };
        let json = serde_json::to_value(&report).unwrap();
        for field in [
            "problem",
            "algorithm",
            "epsilon",
            "per_function",
            "suite_max",
            "queries_mean",
            "qubits",
            "checks",
        ] {
            assert!(json.get(field).is_some(), "missing field {field}");
        }
        assert_eq!(json["per_function"][0]["prob_error"]["0.25"], 0.0);
    }
}

//! Amplitude estimation and the Boolean summation estimators.
//!
//! The single-run circuit is phase estimation over the Grover iterate
//! G = D S_f, where S_f is the oracle phase flip and D the inversion about
//! the uniform state on the index register. For a table with Boolean mean
//! a = sin^2(theta), G rotates by 2 theta in its invariant plane, so the
//! measured t-qubit phase index y yields the estimate sin^2(pi y / 2^t).
//!
//! Both backends produce the same outcome law: the statevector backend runs
//! the circuit on 2^(m1+1+t) amplitudes, the analytic backend draws directly
//! from the closed form
//!
//!   P(y) = (K_M(y/M - w) + K_M(y/M + w)) / 2,   w = theta/pi, M = 2^t,
//!
//! with the Fejer-type kernel K_M(u) = sin^2(M pi u) / (M sin(pi u))^2.
//! The statevector backend is authoritative for correctness; the analytic
//! backend is authoritative for index registers beyond the simulator cap.
//!
//! One run queries the oracle 2^t - 1 times (one controlled query inside
//! each controlled Grover power; state preparation is query-free since the
//! f-dependence enters only through the phase flip). The Boolean summation
//! estimator repeats the run R = 7 times and returns the median.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracles::BitQueryOracle;
use crate::statevector::{MeasurementDistribution, RegisterLayout, StateVector};

/// Which engine produces measurement outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Full dense simulation; limited by the qubit cap.
    Statevector,
    /// Sampling from the closed-form outcome law; unlimited size.
    Analytic,
}

/// Configuration of the repeated-median estimator.
#[derive(Clone, Copy, Debug)]
pub struct SummationConfig {
    pub repetitions: u32,
    pub backend: Backend,
}

impl SummationConfig {
    pub fn new(repetitions: u32, backend: Backend) -> Result<Self> {
        if repetitions == 0 || repetitions % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "repetition count must be odd and positive, got {repetitions}"
            )));
        }
        Ok(SummationConfig {
            repetitions,
            backend,
        })
    }

    pub fn analytic() -> Self {
        SummationConfig {
            repetitions: 7,
            backend: Backend::Analytic,
        }
    }

    pub fn statevector() -> Self {
        SummationConfig {
            repetitions: 7,
            backend: Backend::Statevector,
        }
    }
}

/// Raw outcome of one amplitude-estimation run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepetitionOutcome {
    pub y: u64,
    pub estimate: f64,
}

/// A numerical result with its resource metadata.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub value: f64,
    pub queries_used: u64,
    pub qubits_used: u32,
    pub seed: u64,
    pub trace: Vec<RepetitionOutcome>,
}

/// Error constant C of the repeated-median estimator: its exact L2 error at
/// query budget n is bounded by C / n. Calibrated by
/// [`calibrate_error_constant`] over a grid of amplitudes and phase widths
/// (see that function for the derivation); a unit test pins this value to the
/// calibration output.
pub const QAE_ERROR_CONSTANT: f64 = 22.5;

/// Fejer-type phase-estimation kernel K_M(u) = sin^2(M pi u) / (M sin(pi u))^2,
/// periodic with period 1 and K_M(0) = 1.
pub fn phase_kernel(u: f64, m: u64) -> f64 {
    let reduced = u - u.round();
    if reduced.abs() < 1e-300 {
        return 1.0;
    }
    let num = (m as f64 * std::f64::consts::PI * reduced).sin();
    let den = m as f64 * (std::f64::consts::PI * reduced).sin();
    (num / den).powi(2)
}

/// Closed-form outcome law of one amplitude-estimation run: the distribution
/// of the measured phase index y in {0, ..., 2^t - 1} when the true
/// amplitude is `a`.
pub fn qae_exact_distribution(a: f64, t: u32) -> MeasurementDistribution {
    assert!((0.0..=1.0).contains(&a), "amplitude {a} outside [0, 1]");
    assert!(t >= 1);
    let m = 1u64 << t;
    let omega = a.sqrt().asin() / std::f64::consts::PI;
    let probs: Vec<f64> = (0..m)
        .map(|y| {
            let u = y as f64 / m as f64;
            0.5 * (phase_kernel(u - omega, m) + phase_kernel(u + omega, m))
        })
        .collect();
    MeasurementDistribution::new(probs)
}

/// Amplitude read off a measured phase index: sin^2(pi y / 2^t).
pub fn phase_index_to_amplitude(y: u64, t: u32) -> f64 {
    let m = (1u64 << t) as f64;
    (std::f64::consts::PI * y as f64 / m).sin().powi(2)
}

/// Oracle queries consumed by one run with t phase qubits: 2^t - 1
/// (one controlled query per controlled Grover power; preparation is free).
pub fn queries_per_repetition(t: u32) -> u64 {
    (1u64 << t) - 1
}

/// Phase-register width from a query budget: t = floor(log2(n / R)).
/// The budget must allow at least one Grover power per repetition (t >= 1).
pub fn budget_phase_qubits(budget: u64, repetitions: u32) -> Result<u32> {
    let per_rep = budget / u64::from(repetitions);
    if per_rep < 2 {
        return Err(Error::BudgetTooSmall {
            budget,
            repetitions,
        });
    }
    Ok(per_rep.ilog2())
}

/// Run the full phase-estimation circuit and return the exact outcome
/// distribution over the phase register.
pub fn statevector_outcome_distribution(
    oracle: &BitQueryOracle,
    t: u32,
) -> Result<MeasurementDistribution> {
    let layout = RegisterLayout::new(oracle.index_width(), 1, t)?;
    let mut state = StateVector::new_basis_state(layout.total(), 0)?;
    // Value qubit to |->; uniform superpositions on index and phase.
    state.apply_x_all(layout.value())?;
    state.apply_hadamard_all(layout.value())?;
    state.apply_hadamard_all(layout.index())?;
    state.apply_hadamard_all(layout.phase())?;
    for p in 0..t {
        let control = layout.phase().offset + p;
        for _ in 0..(1u64 << p) {
            oracle.apply_phase_flip(&mut state, &layout, Some(control))?;
            state.apply_diffusion(layout.index(), Some(control))?;
        }
    }
    state.apply_inverse_qft(layout.phase())?;
    state.measurement_distribution(layout.phase())
}

/// One amplitude-estimation run over a Boolean oracle.
///
/// Returns the measured phase index, the amplitude estimate
/// sin^2(pi y / 2^t), and the queries consumed. With the statevector backend
/// the register is m1 + 1 + t qubits and must fit the cap; the analytic
/// backend samples the closed-form law and charges the same query count to
/// the oracle's counter.
pub fn qae_single_run(
    oracle: &BitQueryOracle,
    t: u32,
    backend: Backend,
    rng: &mut ChaCha8Rng,
) -> Result<RepetitionOutcome> {
    if !oracle.is_boolean() {
        return Err(Error::LayoutMismatch(
            "amplitude estimation requires a Boolean oracle".into(),
        ));
    }
    if t < 1 {
        return Err(Error::EmptyRegister);
    }
    let y = match backend {
        Backend::Statevector => {
            let dist = statevector_outcome_distribution(oracle, t)?;
            dist.sample(rng)
        }
        Backend::Analytic => {
            let dist = qae_exact_distribution(oracle.boolean_mean(), t);
            oracle.charge_queries(queries_per_repetition(t));
            dist.sample(rng)
        }
    };
    Ok(RepetitionOutcome {
        y,
        estimate: phase_index_to_amplitude(y, t),
    })
}

/// Median of a sample; for even sizes, the mean of the two middle values.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// The Boolean summation estimator: median of R amplitude-estimation runs.
///
/// Given a query budget n, every repetition runs with t = floor(log2(n / R))
/// phase qubits and consumes 2^t - 1 queries; the remainder of the budget is
/// left unspent. The exact L2 error over outcomes is bounded by
/// [`QAE_ERROR_CONSTANT`] / n.
pub fn boolean_summation(
    oracle: &BitQueryOracle,
    budget: u64,
    cfg: &SummationConfig,
    seed: u64,
) -> Result<Estimate> {
    let t = budget_phase_qubits(budget, cfg.repetitions)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Vec::with_capacity(cfg.repetitions as usize);
    for _ in 0..cfg.repetitions {
        trace.push(qae_single_run(oracle, t, cfg.backend, &mut rng)?);
    }
    let estimates: Vec<f64> = trace.iter().map(|r| r.estimate).collect();
    Ok(Estimate {
        value: median(&estimates),
        queries_used: u64::from(cfg.repetitions) * queries_per_repetition(t),
        qubits_used: oracle.index_width() + 1 + t,
        seed,
        trace,
    })
}

/// Exact recovery of a Boolean mean from an estimate with error below
/// 1/(2N): B = (ceil(N A + 1/2) - 1) / N. The caller must guarantee the
/// error precondition; nothing is checkable locally.
pub fn recover_exact_mean(approx: f64, n: u64) -> Ratio<u64> {
    let k = (n as f64 * approx + 0.5).ceil() as u64;
    Ratio::new(k.saturating_sub(1).min(n), n)
}

/// Rational-arithmetic form of [`recover_exact_mean`] for exact checks.
pub fn recover_exact_mean_rational(approx: Ratio<i64>, n: i64) -> Ratio<i64> {
    let shifted = approx * Ratio::from_integer(n) + Ratio::new(1, 2);
    Ratio::from_integer(shifted.ceil().to_integer() - 1) / Ratio::from_integer(n)
}

/// Subsample size of the randomized estimator: the next power of two at or
/// above ceil(4 / eps^2).
pub fn randomized_subsample_size(eps: f64) -> usize {
    ((4.0 / (eps * eps)).ceil() as usize).next_power_of_two().max(2)
}

/// Query budget hitting inner error eps/2: n = ceil(2 C / eps).
pub fn randomized_query_budget(eps: f64) -> u64 {
    (2.0 * QAE_ERROR_CONSTANT / eps).ceil() as u64
}

/// Boolean summation with randomized queries.
///
/// Draws a uniform subsample of m = 2^ceil(log2(4 eps^-2)) points, builds the
/// randomized oracle g(l) = f(omega_l), and runs the median estimator at
/// budget n = ceil(2 C / eps). The register is log2(m) + 1 + t qubits —
/// independent of N. For eps below 1/(2N) the run is done at 1/(2N) and the
/// mean recovered exactly.
pub fn randomized_boolean_summation(
    table: &crate::oracles::BooleanTable,
    eps: f64,
    cfg: &SummationConfig,
    seed: u64,
) -> Result<Estimate> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::BadEpsilon(eps));
    }
    let recover_n = table.size() as u64;
    let floor_eps = 1.0 / (2.0 * recover_n as f64);
    let eps_run = eps.max(floor_eps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = randomized_subsample_size(eps_run);
    let oracle = crate::oracles::make_randomized_subsample_oracle(table, m, &mut rng)?;
    let sub_seed: u64 = rng.random();
    let mut estimate = boolean_summation(&oracle, randomized_query_budget(eps_run), cfg, sub_seed)?;
    estimate.seed = seed;
    if eps < floor_eps {
        estimate.value = ratio_to_f64(recover_exact_mean(estimate.value, recover_n));
    }
    Ok(estimate)
}

fn ratio_to_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Median-boosting repetition count for failure probability delta:
/// ceil(8 ln(1/delta)).
pub fn boost_repetitions(delta: f64) -> usize {
    (8.0 * (1.0 / delta).ln()).ceil() as usize
}

/// Boost a 3/4-success estimator to failure probability at most delta by
/// running it ceil(8 ln(1/delta)) times and taking the median. Resources are
/// summed over the runs.
pub fn boost_success<F>(mut run: F, delta: f64, seed: u64) -> Result<Estimate>
where
    F: FnMut(u64) -> Result<Estimate>,
{
    if !(delta > 0.0 && delta <= 0.25) {
        return Err(Error::BadDelta {
            delta,
            range: "(0, 0.25]",
        });
    }
    let reps = boost_repetitions(delta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(reps);
    let mut queries = 0u64;
    let mut qubits = 0u32;
    for _ in 0..reps {
        let est = run(rng.random())?;
        queries += est.queries_used;
        qubits = qubits.max(est.qubits_used);
        values.push(est.value);
    }
    let trace = values
        .iter()
        .enumerate()
        .map(|(i, &v)| RepetitionOutcome {
            y: i as u64,
            estimate: v,
        })
        .collect();
    Ok(Estimate {
        value: median(&values),
        queries_used: queries,
        qubits_used: qubits,
        seed,
        trace,
    })
}

// ---------------------------------------------------------------------------
// Exact outcome laws of the repeated-median estimator.
// ---------------------------------------------------------------------------

/// Collapse a phase-index distribution onto estimate values: sorted
/// (sin^2(pi y / M), probability) pairs with equal estimates merged
/// (y and M - y coincide).
pub fn value_law_from_distribution(dist: &MeasurementDistribution, t: u32) -> Vec<(f64, f64)> {
    let m = 1u64 << t;
    assert_eq!(dist.len() as u64, m);
    let mut law: Vec<(f64, f64)> = Vec::new();
    for y in 0..=(m / 2) {
        let mut p = dist.probabilities()[y as usize];
        let mirror = (m - y) % m;
        if mirror != y {
            p += dist.probabilities()[mirror as usize];
        }
        law.push((phase_index_to_amplitude(y, t), p));
    }
    law.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    law
}

/// Single-run value law of the closed-form distribution at amplitude a.
pub fn single_run_value_law(a: f64, t: u32) -> Vec<(f64, f64)> {
    value_law_from_distribution(&qae_exact_distribution(a, t), t)
}

fn binomial(n: u64, k: u64) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// P(at least ceil((r+1)/2) successes out of r at success probability f).
fn majority_tail(f: f64, r: u32) -> f64 {
    let half = (u64::from(r) + 1) / 2;
    (half..=u64::from(r))
        .map(|k| binomial(u64::from(r), k) * f.powi(k as i32) * (1.0 - f).powi((u64::from(r) - k) as i32))
        .sum()
}

/// Median-of-r law over an arbitrary single-run value law: P(median <= v_i)
/// is the binomial majority tail of the single-run CDF at v_i.
pub fn median_law_from_values(single: &[(f64, f64)], r: u32) -> Vec<(f64, f64)> {
    assert!(r % 2 == 1, "median law needs an odd repetition count");
    let mut law = Vec::with_capacity(single.len());
    let mut cdf = 0.0;
    let mut prev_tail = 0.0;
    for &(value, p) in single {
        cdf += p;
        let tail = majority_tail(cdf.min(1.0), r);
        law.push((value, tail - prev_tail));
        prev_tail = tail;
    }
    law
}

/// Exact law of the median of r independent single runs at amplitude a.
pub fn exact_median_law(a: f64, t: u32, r: u32) -> Vec<(f64, f64)> {
    median_law_from_values(&single_run_value_law(a, t), r)
}

/// Exact L2 error of the median-of-r estimator at amplitude a with t phase
/// qubits: sqrt(sum_v P(v) (v - a)^2).
pub fn exact_l2_error(a: f64, t: u32, r: u32) -> f64 {
    exact_median_law(a, t, r)
        .iter()
        .map(|&(v, p)| p * (v - a) * (v - a))
        .sum::<f64>()
        .sqrt()
}

/// Worst-case exact L2 error over the amplitude grid {k/64} plus the
/// half-phase points sin^2(pi (y + 1/2) / 2^t) (the hardest amplitudes for a
/// t-qubit phase register).
pub fn worst_case_l2_error(t: u32, r: u32) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..=64u64 {
        worst = worst.max(exact_l2_error(k as f64 / 64.0, t, r));
    }
    let m = 1u64 << t;
    for y in 0..m / 2 {
        let a = ((y as f64 + 0.5) * std::f64::consts::PI / m as f64).sin().powi(2);
        worst = worst.max(exact_l2_error(a, t, r));
    }
    worst
}

/// Calibration of [`QAE_ERROR_CONSTANT`].
///
/// For every t in 1..=max_t the worst-case exact L2 error e(t) of the
/// median-of-7 estimator is computed from the closed-form law, and
/// K = max_t 2^t e(t) recorded. A budget n maps to t = floor(log2(n/7)),
/// which gives 2^-t < 14/n and therefore error <= K 2^-t < 14 K / n, so the
/// shipped constant is C = 14 K (rounded up to one decimal).
pub fn calibrate_error_constant(max_t: u32) -> f64 {
    let mut k: f64 = 0.0;
    for t in 1..=max_t {
        k = k.max((1u64 << t) as f64 * worst_case_l2_error(t, 7));
    }
    (14.0 * k * 10.0).ceil() / 10.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::BooleanTable;
    use crate::statevector::DISTRIBUTION_TOL;

    #[test]
    fn exact_distribution_at_zero_amplitude() {
        for t in 1..=5 {
            let d = qae_exact_distribution(0.0, t);
            assert!((d.probabilities()[0] - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn exact_distribution_at_representable_amplitude() {
        // a = sin^2(pi y0 / M) concentrates all mass on {y0, M - y0}.
        let t = 4;
        let m = 1u64 << t;
        for y0 in 1..m / 2 {
            let a = phase_index_to_amplitude(y0, t);
            let d = qae_exact_distribution(a, t);
            let mass = d.probabilities()[y0 as usize] + d.probabilities()[(m - y0) as usize];
            assert!((mass - 1.0).abs() <= 1e-9, "y0 = {y0}: mass {mass}");
            assert!((d.probabilities()[y0 as usize] - 0.5).abs() <= 1e-9);
        }
    }

    #[test]
    fn exact_distribution_sums_to_one() {
        for &a in &[0.1, 0.3, 0.5, 0.77, 1.0] {
            for t in 1..=6 {
                let d = qae_exact_distribution(a, t);
                let sum: f64 = d.probabilities().iter().sum();
                assert!((sum - 1.0).abs() <= 1e-12, "a={a} t={t} sum={sum}");
            }
        }
    }

    #[test]
    fn statevector_matches_analytic_law() {
        // Dual route: circuit simulation against the closed form.
        let table = BooleanTable::with_leading_ones(8, 2).unwrap(); // a = 0.25
        let oracle = BitQueryOracle::from_boolean_table(&table);
        for t in 2..=4 {
            let circuit = statevector_outcome_distribution(&oracle, t).unwrap();
            let analytic = qae_exact_distribution(table.mean(), t);
            let tv = circuit.total_variation(&analytic);
            assert!(tv <= 1e-9, "t = {t}: total variation {tv}");
        }
    }

    #[test]
    fn statevector_matches_analytic_law_at_a_point_three() {
        // N = 8 oracle with mean 0.3 is not constructible (0.3 * 8 is not an
        // integer); the nearest class member 3/8 exercises a generic phase.
        let table = BooleanTable::with_leading_ones(8, 3).unwrap();
        let oracle = BitQueryOracle::from_boolean_table(&table);
        let circuit = statevector_outcome_distribution(&oracle, 3).unwrap();
        let analytic = qae_exact_distribution(0.375, 3);
        assert!(circuit.total_variation(&analytic) <= 1e-9);
    }

    #[test]
    fn single_run_on_zero_function_returns_zero() {
        let table = BooleanTable::zeros(8).unwrap();
        let oracle = BitQueryOracle::from_boolean_table(&table);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for backend in [Backend::Statevector, Backend::Analytic] {
            for _ in 0..8 {
                let run = qae_single_run(&oracle, 3, backend, &mut rng).unwrap();
                assert_eq!(run.y, 0);
                assert_eq!(run.estimate, 0.0);
            }
        }
    }

    #[test]
    fn single_run_on_ones_function_returns_one() {
        // a = 1 has theta = pi/2, exactly representable at y = M/2 for every t.
        let table = BooleanTable::ones(8).unwrap();
        let oracle = BitQueryOracle::from_boolean_table(&table);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for t in 1..=4 {
            let exact = qae_exact_distribution(1.0, t);
            let m = 1u64 << t;
            assert!((exact.probabilities()[(m / 2) as usize] - 1.0).abs() <= 1e-9);
            let run = qae_single_run(&oracle, t, Backend::Statevector, &mut rng).unwrap();
            assert!((run.estimate - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn single_run_empirical_law_matches_exact() {
        // Chi-square at 1e4 samples against the exact distribution for
        // N = 8, mean 0.5, t = 4.
        let table = BooleanTable::with_leading_ones(8, 4).unwrap();
        let oracle = BitQueryOracle::from_boolean_table(&table);
        let t = 4;
        let exact = statevector_outcome_distribution(&oracle, t).unwrap();
        let runs = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = vec![0u64; 1 << t];
        for _ in 0..runs {
            let run = qae_single_run(&oracle, t, Backend::Analytic, &mut rng).unwrap();
            counts[run.y as usize] += 1;
        }
        let mut chi2 = 0.0;
        let mut dof = 0;
        for (c, &p) in counts.iter().zip(exact.probabilities()) {
            let expected = p * runs as f64;
            if expected >= 5.0 {
                chi2 += (*c as f64 - expected).powi(2) / expected;
                dof += 1;
            }
        }
        let dof = (dof - 1) as f64;
        assert!(chi2 <= dof + 3.0 * (2.0 * dof).sqrt(), "chi2 {chi2} dof {dof}");
    }

    #[test]
    fn queries_per_run_match_hand_count_for_two_phase_qubits() {
        // t = 2: controlled G^1 + controlled G^2 = 3 applications.
        let table = BooleanTable::with_leading_ones(4, 1).unwrap();
        let oracle = BitQueryOracle::from_boolean_table(&table);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        qae_single_run(&oracle, 2, Backend::Statevector, &mut rng).unwrap();
        assert_eq!(oracle.query_count(), 3);
        assert_eq!(queries_per_repetition(2), 3);
    }

    #[test]
    fn analytic_backend_charges_identical_queries() {
        let table = BooleanTable::with_leading_ones(4, 1).unwrap();
        let oracle = BitQueryOracle::from_boolean_table(&table);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        qae_single_run(&oracle, 3, Backend::Analytic, &mut rng).unwrap();
        assert_eq!(oracle.query_count(), queries_per_repetition(3));
    }

    #[test]
    fn median_of_seven_examples() {
        assert_eq!(median(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]), 0.4);
        assert_eq!(median(&[0.7, 0.1, 0.5, 0.3, 0.4, 0.6, 0.2]), 0.4);
    }

    #[test]
    fn median_is_robust_to_three_outliers() {
        // Perturbing any 3 of 7 outcomes arbitrarily keeps the median inside
        // the hull of the remaining 4.
        let base = [0.40, 0.41, 0.42, 0.43, 0.44, 0.45, 0.46];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let mut vals = base;
            for _ in 0..3 {
                let idx = rng.random_range(0..7usize);
                vals[idx] = rng.random::<f64>() * 1000.0 - 500.0;
            }
            let med = median(&vals);
            let kept: Vec<f64> = (0..7)
                .filter(|i| vals[*i] == base[*i])
                .map(|i| base[i])
                .collect();
            if kept.len() >= 4 {
                let lo = kept.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = kept.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert!(med >= lo && med <= hi, "median {med} outside [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn boolean_summation_of_zero_table_is_exact() {
        let table = BooleanTable::zeros(16).unwrap();
        let oracle = BitQueryOracle::from_boolean_table(&table);
        let est = boolean_summation(&oracle, 64, &SummationConfig::analytic(), 7).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn boolean_summation_accounting() {
        let table = BooleanTable::with_leading_ones(16, 5).unwrap();
        let oracle = BitQueryOracle::from_boolean_table(&table);
        let budget = 100u64;
        let est = boolean_summation(&oracle, budget, &SummationConfig::analytic(), 8).unwrap();
        let t = budget_phase_qubits(budget, 7).unwrap();
        assert_eq!(t, 3); // floor(log2(100/7)) = floor(log2(14.3))
        assert_eq!(est.queries_used, 7 * queries_per_repetition(t));
        assert_eq!(est.queries_used, oracle.query_count());
        assert_eq!(est.qubits_used, 4 + 1 + t);
        assert!(est.queries_used <= budget);
        assert_eq!(est.trace.len(), 7);
    }

    #[test]
    fn boolean_summation_budget_too_small() {
        let table = BooleanTable::zeros(4).unwrap();
        let oracle = BitQueryOracle::from_boolean_table(&table);
        assert!(matches!(
            boolean_summation(&oracle, 13, &SummationConfig::analytic(), 0),
            Err(Error::BudgetTooSmall { .. })
        ));
    }

    #[test]
    fn exact_error_decreases_with_budget() {
        // Per-amplitude error is NOT monotone in t — how close the phase
        // falls to the t-qubit grid varies with t (at a = 11/64, t = 3 beats
        // t = 5). What does decrease is the class-worst error, and every
        // amplitude obeys the C/n envelope at both budgets.
        let a = 11.0 / 64.0;
        assert!(worst_case_l2_error(5, 7) <= worst_case_l2_error(3, 7));
        for t in [3u32, 5] {
            let n = 7 * (1u64 << t);
            assert!(exact_l2_error(a, t, 7) <= QAE_ERROR_CONSTANT / n as f64);
        }
    }

    #[test]
    fn median_law_sums_to_one_and_bounds_error() {
        for &a in &[0.0, 0.17, 0.5, 0.99, 1.0] {
            for t in 1..=6 {
                let law = exact_median_law(a, t, 7);
                let total: f64 = law.iter().map(|&(_, p)| p).sum();
                assert!((total - 1.0).abs() <= 1e-9, "a={a} t={t} total={total}");
                assert!(law.iter().all(|&(v, _)| (0.0..=1.0).contains(&v)));
            }
        }
    }

    #[test]
    fn median_law_matches_brute_force_enumeration() {
        // Independent oracle: enumerate all 7-tuples of single-run outcomes
        // (collapsed on estimate values) and take medians by hand.
        let a = 0.5;
        let t = 2;
        let single = single_run_value_law(a, t);
        let k = single.len();
        let mut brute: std::collections::BTreeMap<u64, f64> = std::collections::BTreeMap::new();
        let mut stack = vec![0usize; 7];
        'outer: loop {
            let p: f64 = stack.iter().map(|&i| single[i].1).product();
            if p > 0.0 {
                let mut vals: Vec<f64> = stack.iter().map(|&i| single[i].0).collect();
                vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
                let med = vals[3];
                *brute.entry(med.to_bits()).or_insert(0.0) += p;
            }
            // next tuple
            for pos in 0..7 {
                stack[pos] += 1;
                if stack[pos] < k {
                    continue 'outer;
                }
                stack[pos] = 0;
            }
            break;
        }
        let law = exact_median_law(a, t, 7);
        for (value, prob) in law {
            let b = brute.get(&value.to_bits()).copied().unwrap_or(0.0);
            assert!((prob - b).abs() <= 1e-12, "value {value}: {prob} vs {b}");
        }
    }

    #[test]
    fn recover_exact_mean_examples() {
        assert_eq!(recover_exact_mean(0.27, 8), Ratio::new(2, 8));
        assert_eq!(recover_exact_mean(0.24, 8), Ratio::new(2, 8));
        assert_eq!(recover_exact_mean(0.375, 8), Ratio::new(3, 8));
        assert_eq!(recover_exact_mean(0.0, 8), Ratio::new(0, 8));
        assert_eq!(recover_exact_mean(1.0, 8), Ratio::new(8, 8));
    }

    #[test]
    fn recover_exact_mean_fixed_points() {
        for n in [4u64, 16, 100] {
            for k in 0..=n {
                let a = k as f64 / n as f64;
                assert_eq!(recover_exact_mean(a, n), Ratio::new(k, n));
            }
        }
    }

    #[test]
    fn randomized_summation_of_ones_is_exact() {
        let table = BooleanTable::ones(64).unwrap();
        let est =
            randomized_boolean_summation(&table, 0.1, &SummationConfig::analytic(), 11).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn randomized_summation_qubits_independent_of_table_size() {
        let eps = 0.05;
        let cfg = SummationConfig::analytic();
        let small = BooleanTable::with_leading_ones(1 << 8, 77).unwrap();
        let large = BooleanTable::with_leading_ones(1 << 16, 7777).unwrap();
        let e_small = randomized_boolean_summation(&small, eps, &cfg, 1).unwrap();
        let e_large = randomized_boolean_summation(&large, eps, &cfg, 1).unwrap();
        assert_eq!(e_small.qubits_used, e_large.qubits_used);
    }

    #[test]
    fn estimates_stay_in_unit_interval() {
        let table = BooleanTable::with_leading_ones(64, 23).unwrap();
        let cfg = SummationConfig::analytic();
        for seed in 0..20 {
            let est = randomized_boolean_summation(&table, 0.2, &cfg, seed).unwrap();
            assert!((0.0..=1.0).contains(&est.value));
        }
    }

    #[test]
    fn boost_repetition_formula() {
        assert_eq!(boost_repetitions(0.25), 12); // ceil(8 ln 4)
    }

    #[test]
    fn boost_of_deterministic_estimator_is_identity() {
        let run = |seed: u64| {
            Ok(Estimate {
                value: 0.42,
                queries_used: 5,
                qubits_used: 3,
                seed,
                trace: vec![],
            })
        };
        let est = boost_success(run, 0.25, 9).unwrap();
        assert_eq!(est.value, 0.42);
        assert_eq!(est.queries_used, 12 * 5);
    }

    #[test]
    fn boost_rejects_bad_delta() {
        let run = |_| {
            Ok(Estimate {
                value: 0.0,
                queries_used: 1,
                qubits_used: 1,
                seed: 0,
                trace: vec![],
            })
        };
        assert!(boost_success(run, 0.3, 0).is_err());
    }

    #[test]
    fn boost_drives_failure_rate_below_delta() {
        // Synthetic estimator: correct (error 0) with probability exactly
        // 3/4, else error 1. Boosted at delta = 0.05, the empirical failure
        // rate over 1e4 trials must stay at or below delta (Chernoff puts it
        // far below).
        let delta = 0.05;
        let trials = 10_000;
        let mut failures = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..trials {
            let boost_seed: u64 = rng.random();
            let est = boost_success(
                |s| {
                    let mut r = ChaCha8Rng::seed_from_u64(s);
                    let good = r.random::<f64>() < 0.75;
                    Ok(Estimate {
                        value: if good { 0.0 } else { 1.0 },
                        queries_used: 1,
                        qubits_used: 1,
                        seed: s,
                        trace: vec![],
                    })
                },
                delta,
                boost_seed,
            )
            .unwrap();
            if est.value > 0.5 {
                failures += 1;
            }
        }
        let rate = failures as f64 / trials as f64;
        assert!(rate <= delta, "failure rate {rate} above {delta}");
    }

    #[test]
    fn calibration_reproduces_shipped_constant() {
        assert_eq!(calibrate_error_constant(8), QAE_ERROR_CONSTANT);
    }

    #[test]
    fn shipped_constant_bounds_exact_error_for_all_budgets() {
        // e(n) <= C / n across a budget sweep and an amplitude grid.
        for &n in &[14u64, 20, 50, 100, 333, 1000] {
            let t = budget_phase_qubits(n, 7).unwrap();
            for k in 0..=32 {
                let a = k as f64 / 32.0;
                let e = exact_l2_error(a, t, 7);
                assert!(
                    e <= QAE_ERROR_CONSTANT / n as f64 + 1e-12,
                    "a={a} n={n}: e={e} bound={}",
                    QAE_ERROR_CONSTANT / n as f64
                );
            }
        }
    }

    #[test]
    fn backend_equivalence_across_small_tables() {
        // Statevector distribution equals the analytic law for every table
        // size and a sample of means.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for &n in &[8usize, 16, 64] {
            for _ in 0..3 {
                let ones = rng.random_range(0..=n);
                let table = BooleanTable::with_leading_ones(n, ones).unwrap();
                let oracle = BitQueryOracle::from_boolean_table(&table);
                for t in [2u32, 5] {
                    let circuit = statevector_outcome_distribution(&oracle, t).unwrap();
                    let analytic = qae_exact_distribution(table.mean(), t);
                    assert!(
                        circuit.total_variation(&analytic) <= DISTRIBUTION_TOL,
                        "n={n} ones={ones} t={t}"
                    );
                }
            }
        }
    }
}

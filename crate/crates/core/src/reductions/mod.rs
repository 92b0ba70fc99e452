//! Reductions of real summation, multivariate integration and path
//! integration to Boolean summation.
//!
//! Real tables are reduced through their binary expansion: truncating each
//! value to K bits turns the mean SUM_N(f) into an exact Boolean mean over
//! the index set D = {(i, j, p)} of cardinality N (2^K - 1), at the price of
//! a truncation bias of at most 2^-K. The randomized estimators subsample D
//! uniformly and hand the subsample to the median amplitude estimator.

pub mod integrate;
pub mod path;

pub use integrate::{integrate_r0, integrate_rge1, QueryVariant, SmoothClassDescriptor};
pub use path::{
    gaussian_sample_mu_d, kl_eigenpair, kl_trace_partial, kl_variance, path_integrate,
    truncation_dimension, PathIntegrand,
};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracles::{BitQueryOracle, BooleanTable, RealTable};
use crate::qae::{
    boolean_summation, budget_phase_qubits, queries_per_repetition, Backend,
    Estimate, SummationConfig, QAE_ERROR_CONSTANT,
};

/// Binary expansion of a real table truncated to K bits.
///
/// The Boolean map b(i, j, p) is the i-th bit of f(j) (most significant
/// first); it does not depend on p, which only replicates bit i with
/// multiplicity 2^(K-i) so that the plain Boolean mean over D reproduces the
/// weighted bit sum.
#[derive(Clone, Debug)]
pub struct BinaryExpansion {
    table_size: usize,
    bit_depth: u32,
    levels: Vec<u64>,
}

/// Truncate every table value to `bit_depth` bits.
pub fn binary_expand(table: &RealTable, bit_depth: u32) -> Result<BinaryExpansion> {
    if bit_depth < 1 {
        return Err(Error::InvalidArgument("bit depth must be at least 1".into()));
    }
    let levels = table
        .values()
        .iter()
        .map(|&v| crate::oracles::truncate_beta(v, bit_depth))
        .collect::<Result<Vec<_>>>()?;
    Ok(BinaryExpansion {
        table_size: table.size(),
        bit_depth,
        levels,
    })
}

impl BinaryExpansion {
    pub fn table_size(&self) -> usize {
        self.table_size
    }

    pub fn bit_depth(&self) -> u32 {
        self.bit_depth
    }

    /// Truncated levels floor(f(j) 2^K).
    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    /// Bit i of f(j), i = 1 (most significant) ..= K.
    pub fn bit(&self, i: u32, j: u64) -> u8 {
        assert!((1..=self.bit_depth).contains(&i));
        ((self.levels[j as usize] >> (self.bit_depth - i)) & 1) as u8
    }

    /// b(i, j, p): the Boolean map on D. Independent of p.
    pub fn b(&self, i: u32, j: u64, _p: u64) -> u8 {
        self.bit(i, j)
    }

    /// |D| = N (2^K - 1).
    pub fn domain_size(&self) -> u64 {
        self.table_size as u64 * ((1u64 << self.bit_depth) - 1)
    }

    /// Truncated mean S_K(f) = sum_j floor(f(j) 2^K) / (N 2^K).
    pub fn truncated_mean(&self) -> f64 {
        let num: u64 = self.levels.iter().sum();
        num as f64 / (self.table_size as u64 * (1u64 << self.bit_depth)) as f64
    }

    /// Exact numerator/denominator of S_K for integer-arithmetic checks.
    pub fn truncated_mean_exact(&self) -> (u128, u128) {
        let num: u128 = self.levels.iter().map(|&l| u128::from(l)).sum();
        (
            num,
            self.table_size as u128 * (1u128 << self.bit_depth),
        )
    }

    /// Decode a flat index in [0, |D|) to its triple (i, j, p) with
    /// i in 1..=K, j in 0..N, p in 1..=2^(K-i). Flat order is i-major, then
    /// j, then p.
    pub fn decode_flat(&self, mut flat: u64) -> (u32, u64, u64) {
        for i in 1..=self.bit_depth {
            let reps = 1u64 << (self.bit_depth - i);
            let block = self.table_size as u64 * reps;
            if flat < block {
                return (i, flat / reps, flat % reps + 1);
            }
            flat -= block;
        }
        panic!("flat index beyond |D|");
    }

    /// The Boolean value at a flat index of D.
    pub fn bit_at_flat(&self, flat: u64) -> u8 {
        let (i, j, _) = self.decode_flat(flat);
        self.bit(i, j)
    }

    /// Uniform subsample of D: m flat draws resolved to bits.
    pub fn subsample(&self, m: usize, rng: &mut ChaCha8Rng) -> Result<(BooleanTable, Vec<u64>)> {
        let domain = self.domain_size();
        let mut flats = Vec::with_capacity(m);
        let mut bits = Vec::with_capacity(m);
        for _ in 0..m {
            let flat = rng.random_range(0..domain);
            bits.push(self.bit_at_flat(flat));
            flats.push(flat);
        }
        Ok((BooleanTable::new(bits)?, flats))
    }

    /// The padded Boolean table of size N 2^K: all of D in flat order,
    /// followed by N always-zero entries, so that its plain Boolean mean
    /// equals S_K exactly. Used by the deterministic-query route and by
    /// brute-force checks.
    pub fn padded_boolean_table(&self) -> Result<BooleanTable> {
        let total = self.table_size as u64 * (1u64 << self.bit_depth);
        let domain = self.domain_size();
        let mut bits = Vec::with_capacity(total as usize);
        for flat in 0..domain {
            bits.push(self.bit_at_flat(flat));
        }
        bits.resize(total as usize, 0);
        BooleanTable::new(bits)
    }
}

/// A fully drawn summation run: everything random about omega is resolved,
/// leaving the exact measurement-outcome layer. The final estimate is
/// scale * raw + offset, where raw is either an exact classical value or the
/// median of amplitude-estimation runs on the realized subsample.
#[derive(Clone, Debug)]
pub struct RealizedSummation {
    kind: SummationKind,
    scale: f64,
    offset: f64,
    extra_queries: u64,
}

#[derive(Clone, Debug)]
enum SummationKind {
    /// Constant tables are summed directly: the truncated mean is known in
    /// closed form and no quantum resources are spent.
    Exact { value: f64 },
    Quantum {
        subsample: BooleanTable,
        budget: u64,
        phase_qubits: u32,
        repetitions: u32,
    },
}

impl RealizedSummation {
    /// Compose an outer affine map: final = s * current + o.
    pub fn map_affine(&mut self, s: f64, o: f64) {
        self.scale *= s;
        self.offset = s * self.offset + o;
    }

    /// Charge classical function evaluations (interpolation nodes) to the
    /// query budget.
    pub fn add_queries(&mut self, n: u64) {
        self.extra_queries += n;
    }

    /// Amplitude handed to the estimator, when a quantum run happens.
    pub fn amplitude(&self) -> Option<f64> {
        match &self.kind {
            SummationKind::Exact { .. } => None,
            SummationKind::Quantum { subsample, .. } => Some(subsample.mean()),
        }
    }

    pub fn queries(&self) -> u64 {
        self.extra_queries
            + match &self.kind {
                SummationKind::Exact { .. } => 0,
                SummationKind::Quantum {
                    phase_qubits,
                    repetitions,
                    ..
                } => u64::from(*repetitions) * queries_per_repetition(*phase_qubits),
            }
    }

    pub fn qubits(&self) -> u32 {
        match &self.kind {
            SummationKind::Exact { .. } => 0,
            SummationKind::Quantum {
                subsample,
                phase_qubits,
                ..
            } => subsample.index_width() + 1 + phase_qubits,
        }
    }

    /// Exact law of the final estimate over measurement outcomes, from the
    /// closed-form single-run distribution.
    pub fn outcome_law(&self) -> Vec<(f64, f64)> {
        self.outcome_law_with(Backend::Analytic)
            .expect("analytic law cannot fail")
    }

    /// Exact outcome law with the single-run distribution produced by the
    /// chosen backend. The statevector route simulates the full circuit on
    /// the realized subsample and refuses registers beyond the cap.
    pub fn outcome_law_with(&self, backend: Backend) -> Result<Vec<(f64, f64)>> {
        let raw = match &self.kind {
            SummationKind::Exact { value } => vec![(*value, 1.0)],
            SummationKind::Quantum {
                subsample,
                phase_qubits,
                repetitions,
                ..
            } => {
                let single = match backend {
                    Backend::Analytic => {
                        crate::qae::single_run_value_law(subsample.mean(), *phase_qubits)
                    }
                    Backend::Statevector => {
                        let oracle = BitQueryOracle::from_boolean_table(subsample);
                        let dist =
                            crate::qae::statevector_outcome_distribution(&oracle, *phase_qubits)?;
                        crate::qae::value_law_from_distribution(&dist, *phase_qubits)
                    }
                };
                crate::qae::median_law_from_values(&single, *repetitions)
            }
        };
        Ok(raw
            .into_iter()
            .map(|(v, p)| (self.scale * v + self.offset, p))
            .collect())
    }

    /// Run the measurement layer once.
    pub fn sample(&self, backend: Backend, rng: &mut ChaCha8Rng) -> Result<Estimate> {
        match &self.kind {
            SummationKind::Exact { value } => Ok(Estimate {
                value: self.scale * value + self.offset,
                queries_used: self.extra_queries,
                qubits_used: 0,
                seed: 0,
                trace: vec![],
            }),
            SummationKind::Quantum {
                subsample,
                budget,
                repetitions,
                ..
            } => {
                let oracle = BitQueryOracle::from_boolean_table(subsample);
                let cfg = SummationConfig::new(*repetitions, backend)?;
                let mut est = boolean_summation(&oracle, *budget, &cfg, rng.random())?;
                est.value = self.scale * est.value + self.offset;
                est.queries_used += self.extra_queries;
                Ok(est)
            }
        }
    }
}

/// Bit depth of the expansion at accuracy eps: K = ceil(log2(eps^-2)).
pub fn expansion_bit_depth(eps: f64) -> u32 {
    (2.0 * (1.0 / eps).log2()).ceil().max(1.0) as u32
}

/// Draw the randomized part of a real-summation run at accuracy eps.
///
/// Expands to K = ceil(log2 eps^-2) bits, subsamples D uniformly with
/// m = 2^ceil(log2(4 eps^-2)) draws, and budgets ceil(2C/(eps - eps^2))
/// queries for the median estimator. The subsample mean estimates the mean
/// of b over D, which overshoots S_K by the factor 2^K/(2^K - 1) because D
/// omits the N padding slots; the final scale (2^K - 1)/2^K removes that
/// bias exactly.
///
/// Constant tables short-circuit: their truncated mean is exact with no
/// quantum resources.
pub fn real_summation_realize(
    table: &RealTable,
    eps: f64,
    rng: &mut ChaCha8Rng,
) -> Result<RealizedSummation> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::BadEpsilon(eps));
    }
    let k_bits = expansion_bit_depth(eps);
    let expansion = binary_expand(table, k_bits)?;
    if table.is_constant() {
        return Ok(RealizedSummation {
            kind: SummationKind::Exact {
                value: expansion.truncated_mean(),
            },
            scale: 1.0,
            offset: 0.0,
            extra_queries: 0,
        });
    }
    let m = ((4.0 / (eps * eps)).ceil() as usize).next_power_of_two().max(2);
    let (subsample, _) = expansion.subsample(m, rng)?;
    let budget = (2.0 * QAE_ERROR_CONSTANT / (eps - eps * eps)).ceil() as u64;
    let phase_qubits = budget_phase_qubits(budget, 7)?;
    let pow_k = (1u64 << k_bits) as f64;
    Ok(RealizedSummation {
        kind: SummationKind::Quantum {
            subsample,
            budget,
            phase_qubits,
            repetitions: 7,
        },
        scale: (pow_k - 1.0) / pow_k,
        offset: 0.0,
        extra_queries: 0,
    })
}

/// Deterministic-query real summation: the full padded expansion table is
/// handed to the estimator, so the index register width is
/// log2(N) + K qubits and grows with the table.
pub fn real_summation_det_realize(table: &RealTable, eps: f64) -> Result<RealizedSummation> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::BadEpsilon(eps));
    }
    if !table.size().is_power_of_two() || table.size() < 2 {
        return Err(Error::BadTableSize(table.size()));
    }
    let k_bits = expansion_bit_depth(eps);
    let expansion = binary_expand(table, k_bits)?;
    if table.is_constant() {
        return Ok(RealizedSummation {
            kind: SummationKind::Exact {
                value: expansion.truncated_mean(),
            },
            scale: 1.0,
            offset: 0.0,
            extra_queries: 0,
        });
    }
    let padded = expansion.padded_boolean_table()?;
    let budget = (2.0 * QAE_ERROR_CONSTANT / (eps - eps * eps)).ceil() as u64;
    let phase_qubits = budget_phase_qubits(budget, 7)?;
    Ok(RealizedSummation {
        kind: SummationKind::Quantum {
            subsample: padded,
            budget,
            phase_qubits,
            repetitions: 7,
        },
        scale: 1.0,
        offset: 0.0,
        extra_queries: 0,
    })
}

/// Real summation with randomized queries at accuracy eps.
///
/// Truncation contributes at most eps^2, the estimator the remaining
/// eps - eps^2; qubit usage depends on eps only, never on N.
pub fn real_summation(
    table: &RealTable,
    eps: f64,
    backend: Backend,
    seed: u64,
) -> Result<Estimate> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let realized = real_summation_realize(table, eps, &mut rng)?;
    let mut est = realized.sample(backend, &mut rng)?;
    est.seed = seed;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn expansion_of_one_half_at_three_bits() {
        let table = RealTable::constant(4, 0.5).unwrap();
        let e = binary_expand(&table, 3).unwrap();
        assert_eq!(e.bit(1, 0), 1);
        assert_eq!(e.bit(2, 0), 0);
        assert_eq!(e.bit(3, 0), 0);
        assert_eq!(e.truncated_mean(), 0.5);
    }

    #[test]
    fn expansion_of_zero_table() {
        let table = RealTable::constant(4, 0.0).unwrap();
        let e = binary_expand(&table, 5).unwrap();
        assert_eq!(e.domain_size(), 4 * 31);
        for flat in 0..e.domain_size() {
            assert_eq!(e.bit_at_flat(flat), 0);
        }
        assert_eq!(e.truncated_mean(), 0.0);
    }

    #[test]
    fn expansion_identity_against_brute_force() {
        // S_K(f) = B_{N 2^K}(b_f): the bit sum over all of D equals the level
        // sum, exactly in integers.
        let table = RealTable::new(vec![0.1, 0.7, 0.3, 0.9]).unwrap();
        let k = 10;
        let e = binary_expand(&table, k).unwrap();
        let mut ones: u128 = 0;
        for flat in 0..e.domain_size() {
            ones += u128::from(e.bit_at_flat(flat));
        }
        let (num, den) = e.truncated_mean_exact();
        assert_eq!(ones, num);
        assert_eq!(den, 4 * (1u128 << k));
        // truncation bias within 2^-K of the true mean 0.5
        assert!((e.truncated_mean() - 0.5).abs() <= 2f64.powi(-(k as i32)));
    }

    #[test]
    fn expansion_triple_decode_round_trip() {
        let table = RealTable::new(vec![0.23, 0.56, 0.88, 0.02]).unwrap();
        let e = binary_expand(&table, 6).unwrap();
        let mut seen = 0u64;
        for i in 1..=6u32 {
            for j in 0..4u64 {
                for p in 1..=(1u64 << (6 - i)) {
                    let flat = seen;
                    assert_eq!(e.decode_flat(flat), (i, j, p));
                    seen += 1;
                }
            }
        }
        assert_eq!(seen, e.domain_size());
    }

    #[test]
    fn padded_table_mean_is_truncated_mean() {
        let table = RealTable::new(vec![0.11, 0.52, 0.93, 0.34]).unwrap();
        let e = binary_expand(&table, 4).unwrap();
        let padded = e.padded_boolean_table().unwrap();
        assert_eq!(padded.size(), 4 << 4);
        assert!((padded.mean() - e.truncated_mean()).abs() < 1e-15);
    }

    #[test]
    fn truncation_bound_holds_on_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = 1usize << rng.random_range(1..5u32);
            let values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let table = RealTable::new(values).unwrap();
            for k in 1..=6 {
                let e = binary_expand(&table, k).unwrap();
                assert!((table.mean() - e.truncated_mean()).abs() <= 2f64.powi(-(k as i32)));
            }
        }
    }

    #[test]
    fn realize_constant_table_is_exact_with_zero_resources() {
        let table = RealTable::constant(8, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = real_summation_realize(&table, 0.1, &mut rng).unwrap();
        assert_eq!(r.queries(), 0);
        assert_eq!(r.qubits(), 0);
        let law = r.outcome_law();
        assert_eq!(law, vec![(0.5, 1.0)]);
        let est = r.sample(Backend::Analytic, &mut rng).unwrap();
        assert_eq!(est.value, 0.5);
    }

    #[test]
    fn real_summation_of_zero_table_is_exactly_zero() {
        let table = RealTable::constant(16, 0.0).unwrap();
        let est = real_summation(&table, 0.2, Backend::Analytic, 5).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn constant_dyadic_table_is_unbiased() {
        // f = 0.5 exactly: the short-circuit returns 0.5; the quantum path on
        // a perturbed copy must come back near 0.5 as well.
        let mut values = vec![0.5; 64];
        values[0] = 0.5 + 1e-9; // break constancy without moving the mean
        values[1] = 0.5 - 1e-9;
        let table = RealTable::new(values).unwrap();
        let mut acc = 0.0;
        let runs = 200;
        for seed in 0..runs {
            acc += real_summation(&table, 0.2, Backend::Analytic, seed)
                .unwrap()
                .value;
        }
        let mean = acc / runs as f64;
        // tolerance covers the median estimator's small bias, well inside eps
        assert!((mean - 0.5).abs() <= 0.02, "mean {mean}");
    }

    #[test]
    fn real_summation_qubits_independent_of_table_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let small: Vec<f64> = (0..64).map(|_| rng.random()).collect();
        let large: Vec<f64> = (0..(1 << 14)).map(|_| rng.random()).collect();
        let e1 = real_summation(&RealTable::new(small).unwrap(), 0.1, Backend::Analytic, 1).unwrap();
        let e2 = real_summation(&RealTable::new(large).unwrap(), 0.1, Backend::Analytic, 1).unwrap();
        assert_eq!(e1.qubits_used, e2.qubits_used);
    }

    #[test]
    fn deterministic_real_summation_qubits_grow_with_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut mk = |n: usize| {
            let values: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            RealTable::new(values).unwrap()
        };
        let r1 = real_summation_det_realize(&mk(64), 0.1).unwrap();
        let r2 = real_summation_det_realize(&mk(256), 0.1).unwrap();
        assert_eq!(r2.qubits() - r1.qubits(), 2); // log2(256/64)
    }

    #[test]
    fn realized_law_is_a_probability_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let values: Vec<f64> = (0..128).map(|_| rng.random()).collect();
        let table = RealTable::new(values).unwrap();
        let r = real_summation_realize(&table, 0.15, &mut rng).unwrap();
        let law = r.outcome_law();
        let total: f64 = law.iter().map(|&(_, p)| p).sum();
        assert!((total - 1.0).abs() <= 1e-9);
        assert!(law.iter().all(|&(v, _)| (-1e-12..=1.0).contains(&v)));
    }

    #[test]
    fn real_summation_empirical_error_within_eps() {
        // N = 256 random table at eps = 0.1: exact-in-j randomized error over
        // 500 omega draws stays within eps.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let values: Vec<f64> = (0..256).map(|_| rng.random()).collect();
        let table = RealTable::new(values).unwrap();
        let truth = table.mean();
        let eps = 0.1;
        let mut acc = 0.0;
        let draws = 500;
        for _ in 0..draws {
            let r = real_summation_realize(&table, eps, &mut rng).unwrap();
            let inner: f64 = r
                .outcome_law()
                .iter()
                .map(|&(v, p)| p * (v - truth) * (v - truth))
                .sum();
            acc += inner;
        }
        let err = (acc / draws as f64).sqrt();
        assert!(err <= eps, "randomized error {err} above {eps}");
    }
}

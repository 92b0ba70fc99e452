//! Bit-query oracles over Boolean and real tables, deterministic and
//! randomized.
//!
//! A [`BitQueryOracle`] wraps the values f(t_1), ..., f(t_{2^m1}) resolved at
//! its sample points when the oracle is built, so two functions that agree on
//! those points yield literally the same oracle (non-adaptive by
//! construction). Every application of the query unitary — plain, inverse or
//! controlled — bumps the oracle's counter by one; that is the query-count
//! convention used throughout.
//!
//! Randomized queries come from [`RandomizedOracleFactory`]: sample points
//! are drawn from a distribution over a shared probability space and recorded
//! on the realized oracle.

use std::cell::Cell;
use std::io::BufRead;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::statevector::{RegisterLayout, StateVector};

/// A Boolean table f: {0,...,N-1} -> {0,1} with N a power of two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BooleanTable {
    bits: Vec<u8>,
}

impl BooleanTable {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.len() < 2 || !bits.len().is_power_of_two() {
            return Err(Error::BadTableSize(bits.len()));
        }
        for &b in &bits {
            if b > 1 {
                return Err(Error::ValueOutOfRange(f64::from(b)));
            }
        }
        Ok(BooleanTable { bits })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        BooleanTable::new(vec![0; n])
    }

    pub fn ones(n: usize) -> Result<Self> {
        BooleanTable::new(vec![1; n])
    }

    /// Table of size n with exactly `ones` leading ones.
    pub fn with_leading_ones(n: usize, ones: usize) -> Result<Self> {
        let mut bits = vec![0u8; n];
        for b in bits.iter_mut().take(ones) {
            *b = 1;
        }
        BooleanTable::new(bits)
    }

    pub fn size(&self) -> usize {
        self.bits.len()
    }

    pub fn index_width(&self) -> u32 {
        self.bits.len().trailing_zeros()
    }

    pub fn get(&self, j: u64) -> u8 {
        self.bits[j as usize]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Exact Boolean mean: (number of ones) / N.
    pub fn mean(&self) -> f64 {
        self.ones_count() as f64 / self.bits.len() as f64
    }

    pub fn ones_count(&self) -> u64 {
        self.bits.iter().map(|&b| u64::from(b)).sum()
    }

    /// Parse the plain text table format: first line N, then one bit per line.
    pub fn from_text<R: BufRead>(reader: R) -> Result<Self> {
        let values = parse_table_lines(reader)?;
        let bits = values
            .iter()
            .map(|&v| {
                if v == 0.0 {
                    Ok(0u8)
                } else if v == 1.0 {
                    Ok(1u8)
                } else {
                    Err(Error::BadTableFile(format!("entry {v} is not a bit")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        BooleanTable::new(bits)
    }
}

/// A real table f: {0,...,N-1} -> [0,1].
#[derive(Clone, Debug, PartialEq)]
pub struct RealTable {
    values: Vec<f64>,
}

impl RealTable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::BadTableSize(0));
        }
        for &v in &values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ValueOutOfRange(v));
            }
        }
        Ok(RealTable { values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        RealTable::new(vec![c; n])
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, j: u64) -> f64 {
        self.values[j as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    /// Parse the plain text table format: first line N, then one decimal in
    /// [0,1] per line.
    pub fn from_text<R: BufRead>(reader: R) -> Result<Self> {
        RealTable::new(parse_table_lines(reader)?)
    }
}

fn parse_table_lines<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::BadTableFile("empty file".into()))?
        .map_err(|e| Error::BadTableFile(e.to_string()))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::BadTableFile(format!("bad size line '{header}'")))?;
    let mut values = Vec::with_capacity(n);
    for line in lines {
        let line = line.map_err(|e| Error::BadTableFile(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::BadTableFile(format!("bad value line '{line}'")))?;
        values.push(v);
    }
    if values.len() != n {
        return Err(Error::BadTableFile(format!(
            "expected {n} values, found {}",
            values.len()
        )));
    }
    Ok(values)
}

/// Value-coding map beta: [0,1] -> {0, ..., 2^bits - 1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaMode {
    /// floor(value * 2^bits), clamped to 2^bits - 1. Coding error at most
    /// 2^-bits.
    Truncate { bits: u32 },
    /// Table values must already be exact multiples of 2^-bits below 1;
    /// anything else is rejected. Lets tests isolate coding error from
    /// estimation error.
    Exact { bits: u32 },
}

impl BetaMode {
    pub fn bits(&self) -> u32 {
        match *self {
            BetaMode::Truncate { bits } | BetaMode::Exact { bits } => bits,
        }
    }

    pub fn encode(&self, value: f64) -> Result<u64> {
        match *self {
            BetaMode::Truncate { bits } => truncate_beta(value, bits),
            BetaMode::Exact { bits } => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::ValueOutOfRange(value));
                }
                let scaled = value * (1u64 << bits) as f64;
                if scaled.fract() != 0.0 || scaled >= (1u64 << bits) as f64 {
                    return Err(Error::BetaOutOfRange {
                        value: scaled.ceil() as u64,
                        bits,
                    });
                }
                Ok(scaled as u64)
            }
        }
    }
}

/// The m2 most significant bits of a value in [0,1]:
/// floor(value * 2^m2) clamped to 2^m2 - 1, so |value - out / 2^m2| <= 2^-m2.
pub fn truncate_beta(value: f64, m2: u32) -> Result<u64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ValueOutOfRange(value));
    }
    let levels = 1u64 << m2;
    let coded = (value * levels as f64).floor() as u64;
    Ok(coded.min(levels - 1))
}

/// A sample point of an oracle: a table index or a point of the domain.
#[derive(Clone, Debug, PartialEq)]
pub enum SamplePoint {
    Index(u64),
    Coords(Vec<f64>),
}

#[derive(Clone, Debug)]
enum OracleValues {
    Boolean(Vec<u8>),
    Real { levels: Vec<u64>, value_bits: u32 },
}

/// The query unitary Q_f together with its resolved sample values, the sample
/// points t_1, ..., t_{2^m1} they came from, and an application counter.
///
/// Boolean oracles act as Q_f |j>|i> = |j>|i xor f(j)> on a 1-bit value
/// register; real oracles act as |j>|i> -> |j>|(i + beta(f(tau(j)))) mod 2^m2>.
/// Sample points are fixed at construction and never change.
#[derive(Debug)]
pub struct BitQueryOracle {
    values: OracleValues,
    sample_points: Vec<SamplePoint>,
    counter: Cell<u64>,
}

impl BitQueryOracle {
    /// Deterministic Boolean oracle over the full table; tau is the identity.
    pub fn from_boolean_table(table: &BooleanTable) -> Self {
        BitQueryOracle {
            values: OracleValues::Boolean(table.bits().to_vec()),
            sample_points: (0..table.size() as u64).map(SamplePoint::Index).collect(),
            counter: Cell::new(0),
        }
    }

    /// Boolean oracle reading a larger table at explicit sample points.
    pub fn from_boolean_points(table: &BooleanTable, points: &[u64]) -> Result<Self> {
        if points.len() < 2 || !points.len().is_power_of_two() {
            return Err(Error::BadTableSize(points.len()));
        }
        let bits = points.iter().map(|&p| table.get(p)).collect();
        Ok(BitQueryOracle {
            values: OracleValues::Boolean(bits),
            sample_points: points.iter().map(|&p| SamplePoint::Index(p)).collect(),
            counter: Cell::new(0),
        })
    }

    /// Deterministic real oracle over the full table with the given coding.
    pub fn from_real_table(table: &RealTable, beta: BetaMode) -> Result<Self> {
        if table.size() < 2 || !table.size().is_power_of_two() {
            return Err(Error::BadTableSize(table.size()));
        }
        let levels = table
            .values()
            .iter()
            .map(|&v| beta.encode(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(BitQueryOracle {
            values: OracleValues::Real {
                levels,
                value_bits: beta.bits(),
            },
            sample_points: (0..table.size() as u64).map(SamplePoint::Index).collect(),
            counter: Cell::new(0),
        })
    }

    pub fn is_boolean(&self) -> bool {
        matches!(self.values, OracleValues::Boolean(_))
    }

    pub fn size(&self) -> usize {
        match &self.values {
            OracleValues::Boolean(b) => b.len(),
            OracleValues::Real { levels, .. } => levels.len(),
        }
    }

    pub fn index_width(&self) -> u32 {
        self.size().trailing_zeros()
    }

    pub fn value_width(&self) -> u32 {
        match &self.values {
            OracleValues::Boolean(_) => 1,
            OracleValues::Real { value_bits, .. } => *value_bits,
        }
    }

    pub fn sample_points(&self) -> &[SamplePoint] {
        &self.sample_points
    }

    /// Exact mean of the resolved Boolean bits. Panics on a real oracle.
    pub fn boolean_mean(&self) -> f64 {
        match &self.values {
            OracleValues::Boolean(bits) => {
                bits.iter().map(|&b| u64::from(b)).sum::<u64>() as f64 / bits.len() as f64
            }
            OracleValues::Real { .. } => panic!("boolean_mean on a real oracle"),
        }
    }

    fn boolean_bits(&self) -> Result<&[u8]> {
        match &self.values {
            OracleValues::Boolean(bits) => Ok(bits),
            OracleValues::Real { .. } => Err(Error::LayoutMismatch(
                "operation requires a Boolean oracle".into(),
            )),
        }
    }

    /// Number of applications so far (plain, inverse and controlled each
    /// count one).
    pub fn query_count(&self) -> u64 {
        self.counter.get()
    }

    fn bump(&self) {
        self.counter.set(self.counter.get() + 1);
    }

    /// Charge queries without applying the unitary. The analytic backend
    /// uses this so that resource accounting is identical across backends.
    pub fn charge_queries(&self, n: u64) {
        self.counter.set(self.counter.get() + n);
    }

    fn check_layout(&self, layout: &RegisterLayout) -> Result<()> {
        if layout.index_width() != self.index_width() {
            return Err(Error::LayoutMismatch(format!(
                "oracle indexes {} qubit(s), layout has {}",
                self.index_width(),
                layout.index_width()
            )));
        }
        if layout.value_width() != self.value_width() {
            return Err(Error::LayoutMismatch(format!(
                "oracle values need {} qubit(s), layout has {}",
                self.value_width(),
                layout.value_width()
            )));
        }
        Ok(())
    }

    /// Boolean bit query: amplitude at |j>|i> moves to |j>|i xor f(j)>.
    /// Self-inverse; counts one query.
    pub fn apply_bit_query(&self, state: &mut StateVector, layout: &RegisterLayout) -> Result<()> {
        self.apply_bit_query_inner(state, layout, None)
    }

    /// Bit query controlled on one qubit outside the index/value registers.
    pub fn apply_bit_query_controlled(
        &self,
        state: &mut StateVector,
        layout: &RegisterLayout,
        control: u32,
    ) -> Result<()> {
        self.apply_bit_query_inner(state, layout, Some(control))
    }

    fn apply_bit_query_inner(
        &self,
        state: &mut StateVector,
        layout: &RegisterLayout,
        control: Option<u32>,
    ) -> Result<()> {
        let bits = self.boolean_bits()?;
        self.check_layout(layout)?;
        let index_reg = layout.index();
        let value_mask = 1u64 << layout.value().offset;
        let control_mask = control.map(|c| 1u64 << c);
        let n = state.dim() as u64;
        let amps = state.amplitudes_mut();
        for idx in 0..n {
            if idx & value_mask != 0 {
                continue;
            }
            if let Some(cm) = control_mask {
                if idx & cm == 0 {
                    continue;
                }
            }
            if bits[index_reg.extract(idx) as usize] == 1 {
                amps.swap(idx as usize, (idx | value_mask) as usize);
            }
        }
        self.bump();
        Ok(())
    }

    /// Real bit query: the value register is shifted by beta(f(tau(j)))
    /// modulo 2^m2. Counts one query.
    pub fn apply_real_bit_query(
        &self,
        state: &mut StateVector,
        layout: &RegisterLayout,
    ) -> Result<()> {
        self.apply_real_query_signed(state, layout, false)
    }

    /// Inverse real bit query (modular subtraction). Counts one query.
    pub fn apply_real_bit_query_inverse(
        &self,
        state: &mut StateVector,
        layout: &RegisterLayout,
    ) -> Result<()> {
        self.apply_real_query_signed(state, layout, true)
    }

    fn apply_real_query_signed(
        &self,
        state: &mut StateVector,
        layout: &RegisterLayout,
        inverse: bool,
    ) -> Result<()> {
        let (levels, value_bits) = match &self.values {
            OracleValues::Real { levels, value_bits } => (levels.clone(), *value_bits),
            OracleValues::Boolean(_) => {
                return Err(Error::LayoutMismatch(
                    "operation requires a real oracle".into(),
                ))
            }
        };
        self.check_layout(layout)?;
        let index_reg = layout.index();
        let value_reg = layout.value();
        let modulus = 1u64 << value_bits;
        let old = state.amplitudes().to_vec();
        let amps = state.amplitudes_mut();
        for (idx, &amp) in old.iter().enumerate() {
            let idx = idx as u64;
            let j = index_reg.extract(idx);
            let mut shift = levels[j as usize] % modulus;
            if inverse {
                shift = (modulus - shift) % modulus;
            }
            let v = (value_reg.extract(idx) + shift) % modulus;
            amps[value_reg.insert(idx, v) as usize] = amp;
        }
        self.bump();
        Ok(())
    }

    /// The reflection used inside the Grover iterate: amplitudes with
    /// f(j) = 1 change sign. Physically this is one bit query applied with
    /// the value qubit held in |->, so it counts one query; the caller is
    /// responsible for having prepared that qubit.
    pub fn apply_phase_flip(
        &self,
        state: &mut StateVector,
        layout: &RegisterLayout,
        control: Option<u32>,
    ) -> Result<()> {
        let bits = self.boolean_bits()?;
        self.check_layout(layout)?;
        let index_reg = layout.index();
        let control_mask = control.map(|c| 1u64 << c);
        let amps = state.amplitudes_mut();
        for (idx, amp) in amps.iter_mut().enumerate() {
            let idx = idx as u64;
            if let Some(cm) = control_mask {
                if idx & cm == 0 {
                    continue;
                }
            }
            if bits[index_reg.extract(idx) as usize] == 1 {
                *amp = -*amp;
            }
        }
        self.bump();
        Ok(())
    }
}

/// Distribution of the random element omega behind randomized queries.
#[derive(Clone, Debug)]
pub enum OmegaDistribution {
    /// Independent uniform indices over {0, ..., domain-1}.
    UniformIndex { domain: u64 },
    /// Independent Gaussian coordinates with the Karhunen-Loeve variances
    /// lambda_i = 4 / (pi^2 (2i-1)^2); used for path integration.
    GaussianCoefficients { dim: usize },
}

/// Resolves one drawn omega-point to a function value.
#[derive(Clone)]
pub enum OmegaSource {
    Boolean(BooleanTable),
    Real(RealTable, BetaMode),
    /// Coefficient-space evaluator producing values in [0,1].
    Evaluator(Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>, BetaMode),
}

/// One realized draw: the points and, for real sources, the raw values
/// before coding.
pub struct Realization {
    pub points: Vec<SamplePoint>,
    pub raw_values: Vec<f64>,
}

/// Factory for randomized-query oracles Q_{f,omega}.
///
/// The subsample size is rounded up to the next power of two so the index
/// register is full; the padding consists of further independent draws from
/// the same distribution, which keeps the subsample mean unbiased.
pub struct RandomizedOracleFactory {
    source: OmegaSource,
    distribution: OmegaDistribution,
    subsample: usize,
}

impl RandomizedOracleFactory {
    pub fn new(
        source: OmegaSource,
        distribution: OmegaDistribution,
        subsample: usize,
    ) -> Result<Self> {
        if subsample < 1 {
            return Err(Error::EmptySubsample);
        }
        Ok(RandomizedOracleFactory {
            source,
            distribution,
            subsample,
        })
    }

    /// Subsample size after power-of-two rounding (at least 2).
    pub fn effective_size(&self) -> usize {
        self.subsample.next_power_of_two().max(2)
    }

    /// Draw omega and build the oracle over the realized points.
    pub fn realize(&self, rng: &mut ChaCha8Rng) -> Result<(BitQueryOracle, Realization)> {
        let m = self.effective_size();
        let mut points = Vec::with_capacity(m);
        match self.distribution {
            OmegaDistribution::UniformIndex { domain } => {
                for _ in 0..m {
                    points.push(SamplePoint::Index(rng.random_range(0..domain)));
                }
            }
            OmegaDistribution::GaussianCoefficients { dim } => {
                for _ in 0..m {
                    points.push(SamplePoint::Coords(
                        crate::reductions::path::gaussian_sample_mu_d(dim, rng),
                    ));
                }
            }
        }
        self.realize_at(points)
    }

    /// Build the oracle at explicit points (test hook; also realizes the
    /// degenerate identity subsample).
    pub fn realize_at(&self, points: Vec<SamplePoint>) -> Result<(BitQueryOracle, Realization)> {
        if points.len() < 2 || !points.len().is_power_of_two() {
            return Err(Error::BadTableSize(points.len()));
        }
        let resolve_index = |p: &SamplePoint| -> u64 {
            match p {
                SamplePoint::Index(j) => *j,
                SamplePoint::Coords(_) => panic!("index source fed a coordinate point"),
            }
        };
        let (values, raw_values) = match &self.source {
            OmegaSource::Boolean(table) => {
                let bits: Vec<u8> = points.iter().map(|p| table.get(resolve_index(p))).collect();
                let raw = bits.iter().map(|&b| f64::from(b)).collect();
                (OracleValues::Boolean(bits), raw)
            }
            OmegaSource::Real(table, beta) => {
                let raw: Vec<f64> = points.iter().map(|p| table.get(resolve_index(p))).collect();
                let levels = raw.iter().map(|&v| beta.encode(v)).collect::<Result<Vec<_>>>()?;
                (
                    OracleValues::Real {
                        levels,
                        value_bits: beta.bits(),
                    },
                    raw,
                )
            }
            OmegaSource::Evaluator(f, beta) => {
                let raw: Vec<f64> = points
                    .iter()
                    .map(|p| match p {
                        SamplePoint::Coords(c) => f(c),
                        SamplePoint::Index(_) => panic!("coefficient source fed an index point"),
                    })
                    .collect();
                let levels = raw.iter().map(|&v| beta.encode(v)).collect::<Result<Vec<_>>>()?;
                (
                    OracleValues::Real {
                        levels,
                        value_bits: beta.bits(),
                    },
                    raw,
                )
            }
        };
        Ok((
            BitQueryOracle {
                values,
                sample_points: points.clone(),
                counter: Cell::new(0),
            },
            Realization { points, raw_values },
        ))
    }
}

/// Uniform-subsample Boolean oracle over m points of a table: the randomized
/// query with g(l) = f(omega_l). m is rounded up to the next power of two.
pub fn make_randomized_subsample_oracle(
    table: &BooleanTable,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<BitQueryOracle> {
    let factory = RandomizedOracleFactory::new(
        OmegaSource::Boolean(table.clone()),
        OmegaDistribution::UniformIndex {
            domain: table.size() as u64,
        },
        m,
    )?;
    Ok(factory.realize(rng)?.0)
}

//! Dense statevector simulation over a partitioned qubit register.
//!
//! A [`StateVector`] holds all 2^k complex amplitudes of a k-qubit state.
//! Gates are structured operations on amplitude indices (bit masks); no
//! 2^k x 2^k matrix is ever materialized. The register is partitioned by a
//! [`RegisterLayout`] into an index part, a value part and a phase part,
//! matching the shape of the query-based pipelines built on top.
//!
//! Norm drift is treated as a bug, never silently repaired: built-in gates
//! assert unit norm after application, and user-supplied gates report
//! [`Error::NormDrift`].

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Hard ceiling on the register width of the dense backend (26 qubits = 1 GiB
/// of amplitudes). Wider registers must use the analytic backend.
pub const QUBIT_CAP: u32 = 26;

/// Tolerance for exact algebraic identities on amplitudes.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Norm tolerance for composed gate pipelines.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance for probability distributions.
pub const DISTRIBUTION_TOL: f64 = 1e-9;

/// A contiguous block of qubits inside a state.
///
/// Qubit `offset + i` carries weight `2^i` in the register's value, i.e. the
/// register reads out little-endian with respect to the global basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Register {
    pub offset: u32,
    pub width: u32,
}

impl Register {
    pub fn new(offset: u32, width: u32) -> Self {
        Register { offset, width }
    }

    /// Number of basis states of this register.
    pub fn dim(&self) -> u64 {
        1u64 << self.width
    }

    /// Bit mask selecting this register inside a global basis index.
    pub fn mask(&self) -> u64 {
        (self.dim() - 1) << self.offset
    }

    /// Read the register's value out of a global basis index.
    pub fn extract(&self, basis: u64) -> u64 {
        (basis >> self.offset) & (self.dim() - 1)
    }

    /// Replace the register's bits of `basis` with `value`.
    pub fn insert(&self, basis: u64, value: u64) -> u64 {
        (basis & !self.mask()) | (value << self.offset)
    }
}

/// Partition of the simulated qubits into index, value and phase registers.
///
/// The index register holds oracle sample indices (m1 qubits), the value
/// register holds oracle outputs (m2 qubits) and the phase register drives
/// phase estimation (t qubits). Total width is capped at [`QUBIT_CAP`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    index_width: u32,
    value_width: u32,
    phase_width: u32,
}

impl RegisterLayout {
    pub fn new(index_width: u32, value_width: u32, phase_width: u32) -> Result<Self> {
        let total = index_width + value_width + phase_width;
        if total > QUBIT_CAP {
            return Err(Error::QubitCapExceeded {
                requested: total,
                cap: QUBIT_CAP,
            });
        }
        Ok(RegisterLayout {
            index_width,
            value_width,
            phase_width,
        })
    }

    pub fn total(&self) -> u32 {
        self.index_width + self.value_width + self.phase_width
    }

    pub fn index_width(&self) -> u32 {
        self.index_width
    }

    pub fn value_width(&self) -> u32 {
        self.value_width
    }

    pub fn phase_width(&self) -> u32 {
        self.phase_width
    }

    /// Index register occupies the low bits.
    pub fn index(&self) -> Register {
        Register::new(0, self.index_width)
    }

    /// Value register sits above the index register.
    pub fn value(&self) -> Register {
        Register::new(self.index_width, self.value_width)
    }

    /// Phase register occupies the high bits.
    pub fn phase(&self) -> Register {
        Register::new(self.index_width + self.value_width, self.phase_width)
    }
}

/// Structured gates accepted by [`StateVector::apply_unitary`].
#[derive(Clone, Debug)]
pub enum Gate {
    Identity,
    /// Arbitrary single-qubit gate given by its 2x2 matrix rows
    /// [[u00, u01], [u10, u11]].
    SingleQubit { qubit: u32, matrix: [[Complex64; 2]; 2] },
    Hadamard { qubit: u32 },
    PauliX { qubit: u32 },
    /// diag(1, e^{i angle}) on one qubit.
    PhaseShift { qubit: u32, angle: f64 },
    /// Phase e^{i angle} when both qubits are 1.
    ControlledPhase { control: u32, target: u32, angle: f64 },
}

/// Exact marginal measurement probabilities over one register.
#[derive(Clone, Debug)]
pub struct MeasurementDistribution {
    probabilities: Vec<f64>,
}

impl MeasurementDistribution {
    /// Wraps raw probabilities, checking nonnegativity and normalization.
    pub fn new(probabilities: Vec<f64>) -> Self {
        let sum: f64 = probabilities.iter().sum();
        assert!(
            (sum - 1.0).abs() <= DISTRIBUTION_TOL,
            "distribution sums to {sum}, not 1"
        );
        assert!(
            probabilities.iter().all(|&p| (-DISTRIBUTION_TOL..=1.0 + DISTRIBUTION_TOL).contains(&p)),
            "probability outside [0, 1]"
        );
        MeasurementDistribution { probabilities }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Total-variation distance to another distribution on the same support.
    pub fn total_variation(&self, other: &MeasurementDistribution) -> f64 {
        assert_eq!(self.len(), other.len());
        0.5 * self
            .probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// Draw one outcome index by inverse-CDF sampling.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in self.probabilities.iter().enumerate() {
            acc += p;
            if u < acc {
                return i as u64;
            }
        }
        (self.probabilities.len() - 1) as u64
    }
}

/// A k-qubit pure state stored as 2^k complex amplitudes.
#[derive(Clone, Debug)]
pub struct StateVector {
    num_qubits: u32,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state |basis_index> on k qubits.
    pub fn new_basis_state(num_qubits: u32, basis_index: u64) -> Result<Self> {
        if num_qubits > QUBIT_CAP {
            return Err(Error::QubitCapExceeded {
                requested: num_qubits,
                cap: QUBIT_CAP,
            });
        }
        let dim = 1usize << num_qubits;
        if basis_index >= dim as u64 {
            return Err(Error::IndexOutOfRange {
                index: basis_index,
                qubits: num_qubits,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[basis_index as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Raw mutable amplitudes for the oracle kernels in this crate. Callers
    /// must leave the state unit-norm.
    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_register(&self, reg: Register) -> Result<()> {
        if reg.width == 0 {
            return Err(Error::EmptyRegister);
        }
        if reg.offset + reg.width > self.num_qubits {
            return Err(Error::RegisterOutOfBounds {
                offset: reg.offset,
                width: reg.width,
                qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: u32) -> Result<()> {
        self.check_register(Register::new(qubit, 1))
    }

    /// Unit-norm assertion after built-in gates. Drift means a bug in the
    /// gate, so this panics rather than returning an error.
    fn assert_norm(&self) {
        let norm = self.norm();
        assert!(
            (norm - 1.0).abs() <= NORM_TOL,
            "state norm drifted to {norm}"
        );
    }

    fn butterfly_h(&mut self, qubit: u32) {
        let step = 1usize << qubit;
        let f = std::f64::consts::FRAC_1_SQRT_2;
        let n = self.amps.len();
        let mut i = 0;
        while i < n {
            for offset in 0..step {
                let j = i + offset;
                let l = j + step;
                let a = self.amps[j];
                let b = self.amps[l];
                self.amps[j] = f * (a + b);
                self.amps[l] = f * (a - b);
            }
            i += 2 * step;
        }
    }

    fn pauli_x(&mut self, qubit: u32) {
        let step = 1usize << qubit;
        let n = self.amps.len();
        let mut i = 0;
        while i < n {
            for offset in 0..step {
                self.amps.swap(i + offset, i + offset + step);
            }
            i += 2 * step;
        }
    }

    fn single_qubit(&mut self, qubit: u32, m: [[Complex64; 2]; 2]) {
        let step = 1usize << qubit;
        let n = self.amps.len();
        let mut i = 0;
        while i < n {
            for offset in 0..step {
                let j = i + offset;
                let l = j + step;
                let a = self.amps[j];
                let b = self.amps[l];
                self.amps[j] = m[0][0] * a + m[0][1] * b;
                self.amps[l] = m[1][0] * a + m[1][1] * b;
            }
            i += 2 * step;
        }
    }

    fn phase_shift(&mut self, qubit: u32, angle: f64) {
        let phase = Complex64::from_polar(1.0, angle);
        let mask = 1u64 << qubit;
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx as u64 & mask != 0 {
                *amp *= phase;
            }
        }
    }

    fn controlled_phase(&mut self, control: u32, target: u32, angle: f64) {
        let phase = Complex64::from_polar(1.0, angle);
        let mask = (1u64 << control) | (1u64 << target);
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if idx as u64 & mask == mask {
                *amp *= phase;
            }
        }
    }

    fn swap_qubits(&mut self, a: u32, b: u32) {
        let mask_a = 1u64 << a;
        let mask_b = 1u64 << b;
        for idx in 0..self.amps.len() as u64 {
            let bit_a = idx & mask_a != 0;
            let bit_b = idx & mask_b != 0;
            if bit_a && !bit_b {
                let other = (idx ^ mask_a) | mask_b;
                self.amps.swap(idx as usize, other as usize);
            }
        }
    }

    /// Hadamard on every qubit of `reg` (Walsh-Hadamard transform).
    pub fn apply_hadamard_all(&mut self, reg: Register) -> Result<()> {
        self.check_register(reg)?;
        for q in reg.offset..reg.offset + reg.width {
            self.butterfly_h(q);
        }
        self.assert_norm();
        Ok(())
    }

    /// X on every qubit of `reg`.
    pub fn apply_x_all(&mut self, reg: Register) -> Result<()> {
        self.check_register(reg)?;
        for q in reg.offset..reg.offset + reg.width {
            self.pauli_x(q);
        }
        self.assert_norm();
        Ok(())
    }

    /// Apply a sequence of structured gates. Norm drift beyond [`NORM_TOL`]
    /// reports [`Error::NormDrift`] (the gate was not unitary).
    pub fn apply_unitary(&mut self, gates: &[Gate]) -> Result<()> {
        for gate in gates {
            match *gate {
                Gate::Identity => {}
                Gate::SingleQubit { qubit, matrix } => {
                    self.check_qubit(qubit)?;
                    self.single_qubit(qubit, matrix);
                }
                Gate::Hadamard { qubit } => {
                    self.check_qubit(qubit)?;
                    self.butterfly_h(qubit);
                }
                Gate::PauliX { qubit } => {
                    self.check_qubit(qubit)?;
                    self.pauli_x(qubit);
                }
                Gate::PhaseShift { qubit, angle } => {
                    self.check_qubit(qubit)?;
                    self.phase_shift(qubit, angle);
                }
                Gate::ControlledPhase {
                    control,
                    target,
                    angle,
                } => {
                    self.check_qubit(control)?;
                    self.check_qubit(target)?;
                    self.controlled_phase(control, target, angle);
                }
            }
            let norm = self.norm();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::NormDrift { norm });
            }
        }
        Ok(())
    }

    /// Quantum Fourier transform on `reg`:
    /// |j> -> M^{-1/2} sum_y exp(2 pi i j y / M) |y> with M = 2^width.
    pub fn apply_qft(&mut self, reg: Register) -> Result<()> {
        self.check_register(reg)?;
        let t = reg.width;
        for i in (0..t).rev() {
            self.butterfly_h(reg.offset + i);
            for j in 0..i {
                let angle = std::f64::consts::PI / (1u64 << (i - j)) as f64;
                self.controlled_phase(reg.offset + j, reg.offset + i, angle);
            }
        }
        for i in 0..t / 2 {
            self.swap_qubits(reg.offset + i, reg.offset + t - 1 - i);
        }
        self.assert_norm();
        Ok(())
    }

    /// Inverse quantum Fourier transform on `reg`. On one qubit this is a
    /// plain Hadamard.
    pub fn apply_inverse_qft(&mut self, reg: Register) -> Result<()> {
        self.check_register(reg)?;
        let t = reg.width;
        for i in 0..t / 2 {
            self.swap_qubits(reg.offset + i, reg.offset + t - 1 - i);
        }
        for i in 0..t {
            for j in 0..i {
                let angle = -std::f64::consts::PI / (1u64 << (i - j)) as f64;
                self.controlled_phase(reg.offset + j, reg.offset + i, angle);
            }
            self.butterfly_h(reg.offset + i);
        }
        self.assert_norm();
        Ok(())
    }

    /// Inversion about the uniform state on `reg`: a -> 2*mean - a within
    /// every slice of the other qubits. With `control` set, only slices with
    /// that qubit at 1 are touched.
    pub fn apply_diffusion(&mut self, reg: Register, control: Option<u32>) -> Result<()> {
        self.check_register(reg)?;
        if let Some(c) = control {
            self.check_qubit(c)?;
            if reg.offset <= c && c < reg.offset + reg.width {
                return Err(Error::InvalidArgument(
                    "control qubit lies inside the diffusion register".into(),
                ));
            }
        }
        let dim = reg.dim();
        let n = self.amps.len() as u64;
        for base in 0..n {
            if base & reg.mask() != 0 {
                continue;
            }
            if let Some(c) = control {
                if base & (1u64 << c) == 0 {
                    continue;
                }
            }
            let mut mean = Complex64::new(0.0, 0.0);
            for v in 0..dim {
                mean += self.amps[reg.insert(base, v) as usize];
            }
            mean /= dim as f64;
            for v in 0..dim {
                let idx = reg.insert(base, v) as usize;
                self.amps[idx] = 2.0 * mean - self.amps[idx];
            }
        }
        self.assert_norm();
        Ok(())
    }

    /// Exact marginal probabilities of measuring `reg` in the computational
    /// basis (squared moduli summed over the other registers).
    pub fn measurement_distribution(&self, reg: Register) -> Result<MeasurementDistribution> {
        self.check_register(reg)?;
        let mut probs = vec![0.0; reg.dim() as usize];
        for (idx, amp) in self.amps.iter().enumerate() {
            probs[reg.extract(idx as u64) as usize] += amp.norm_sqr();
        }
        Ok(MeasurementDistribution::new(probs))
    }

    /// Measure `reg` once. The draw is the only randomness in a simulation
    /// run and is fully determined by the caller's seeded generator.
    pub fn sample_measurement(&self, reg: Register, rng: &mut ChaCha8Rng) -> Result<u64> {
        Ok(self.measurement_distribution(reg)?.sample(rng))
    }
}

use thiserror::Error;

/// Errors reported by the simulator and the estimation pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("basis index {index} out of range for {qubits} qubit(s)")]
    IndexOutOfRange { index: u64, qubits: u32 },

    #[error("register width {requested} exceeds simulator cap of {cap} qubits")]
    QubitCapExceeded { requested: u32, cap: u32 },

    #[error("register [{offset}, {offset}+{width}) is outside a {qubits}-qubit state")]
    RegisterOutOfBounds { offset: u32, width: u32, qubits: u32 },

    #[error("register has width zero")]
    EmptyRegister,

    #[error("gate is not unitary: norm drifted to {norm}")]
    NormDrift { norm: f64 },

    #[error("oracle layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("table size {0} is not a power of two of at least 2")]
    BadTableSize(usize),

    #[error("table value {0} lies outside [0, 1]")]
    ValueOutOfRange(f64),

    #[error("integrand value {0} lies outside [-1, 1]")]
    IntegrandOutOfRange(f64),

    #[error("coded value {value} does not fit in {bits} value bit(s)")]
    BetaOutOfRange { value: u64, bits: u32 },

    #[error("subsample size must be at least 1")]
    EmptySubsample,

    #[error("query budget {budget} is too small for {repetitions} repetitions")]
    BudgetTooSmall { budget: u64, repetitions: u32 },

    #[error("epsilon must lie in (0, 0.5), got {0}")]
    BadEpsilon(f64),

    #[error("delta must lie in {range}, got {delta}")]
    BadDelta { delta: f64, range: &'static str },

    #[error("smoothness r = {0} is not supported (calibrated for r in {{1, 2}})")]
    UnsupportedSmoothness(u32),

    #[error("sampled residual {residual} exceeds the interpolation bound {bound}")]
    ResidualBoundExceeded { residual: f64, bound: f64 },

    #[error("{0} omega samples are too few for delta = {1} (need W * delta >= 10)")]
    TooFewOmegaSamples(usize, f64),

    #[error("no registered lower-bound formula for problem '{0}'")]
    UnknownProblemBound(String),

    #[error("gap parameter gamma leaves no room for tents: required radius {0} is below the numeric floor")]
    GapTooSmall(f64),

    #[error("malformed table file: {0}")]
    BadTableFile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

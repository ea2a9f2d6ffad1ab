use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("order alpha = {alpha} is not admissible: {reason}")]
    NonAdmissibleAlpha { alpha: f64, reason: String },

    #[error("logarithm base must exceed 1, got {0}")]
    InvalidBase(f64),

    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix support digraph is not strongly connected")]
    Reducible,

    #[error("chain is periodic with period {0}")]
    Periodic(usize),

    #[error("power iteration stopped after {iterations} iterations; eigenvalue bracketed in [{lower}, {upper}]")]
    NoConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("vector must be strictly positive")]
    NonPositiveVector,

    #[error("symbol {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },

    #[error("history has zero probability")]
    ZeroHistory,

    #[error("history {history:?} has zero probability; approximation row undefined")]
    ZeroHistoryProbability { history: Vec<u8> },

    #[error("enumeration of {count} sequences exceeds the cap of {cap}")]
    EnumerationTooLarge { count: f64, cap: u64 },

    #[error("width mismatch: {0}")]
    WidthMismatch(String),

    #[error("supports overlap: {0}")]
    OverlappingSupports(String),

    #[error("gadget columns do not share one height")]
    NonUniformHeight,

    #[error("gadget measure is {0}, expected 1")]
    NonUnitMeasure(String),

    #[error("block length {k} exceeds column height {height}")]
    BlockTooLong { k: usize, height: usize },

    #[error("invalid gadget: {0}")]
    InvalidGadget(String),

    #[error("no feasible parameters up to l1 = {max_l1}")]
    NoFeasibleParams { max_l1: usize },

    #[error("height search exceeded multiplier cap {cap} at level {level}")]
    SearchCapExceeded { level: usize, cap: u64 },

    #[error("property ({property}) violated: {detail}")]
    PropertyViolated { property: String, detail: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

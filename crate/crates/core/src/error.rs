use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid range: start {start} exceeds end {end}")]
    InvalidRange { start: u64, end: u64 },

    #[error("word length {len} exceeds the enumeration limit {max}")]
    LengthExceeded { len: usize, max: usize },

    #[error("ratio undefined at prefix length 0")]
    ZeroLength,

    #[error("index set `{set}` is exhausted at horizon {horizon}")]
    ExhaustedAtHorizon { set: String, horizon: u64 },

    #[error("preimage of {value} has more than {bound} elements")]
    PreimageBoundExceeded { value: u64, bound: usize },

    #[error("position {n} lies below the first admissible boundary")]
    BelowFirstBoundary { n: u64 },

    #[error("horizon too deep: {0}")]
    HorizonTooDeep(String),

    #[error("unsatisfiable requirement bank: {0}")]
    UnsatisfiableBank(String),

    #[error("use violation: computing bit {n} queried oracle index {index} (bound {bound})")]
    UseViolation { n: u64, index: u64, bound: u64 },

    #[error("complexity tables built by different machines ({ours} vs {theirs})")]
    MachineMismatch { ours: String, theirs: String },

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

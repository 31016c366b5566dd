use thiserror::Error;

/// Errors raised by the library. Each variant corresponds to a violated
/// precondition or a failed internal consistency check.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(usize),

    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid coordinates: {0}")]
    InvalidCoordinates(Invalid),

    #[error("coordinates lie in different twist-sign orthants at cuff {cuff}")]
    MixedOrthants { cuff: usize },

    #[error("cuff index {index} out of range (surface has {count} cuffs)")]
    CuffOutOfRange { index: usize, count: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("train track is not maximal: {0}")]
    NotMaximal(String),

    #[error("weight vector has {got} entries but the track has {expected} branches")]
    WeightLength { expected: usize, got: usize },

    #[error("invalid Fenchel-Nielsen data: {0}")]
    InvalidMetric(String),

    #[error("non-hyperbolic holonomy (|trace| = {trace}) for a curve component")]
    NonHyperbolic { trace: f64 },

    #[error("length of the empty multicurve is undefined")]
    EmptyMultiCurve,

    #[error("fit rejected: {0}")]
    Fit(String),

    #[error("torus count mismatch at L={norm}: sieve {sieve}, mobius {mobius}")]
    TorusMismatch { norm: u64, sieve: u64, mobius: u64 },

    #[error("invalid sector: {0}")]
    Sector(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Reason a coordinate vector fails validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invalid {
    /// Some pants has an odd total number of boundary crossings.
    Parity { pants: usize },
    /// An uncrossed cuff carries a negative twist.
    NegativeTwist { cuff: usize },
}

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Invalid::Parity { pants } => write!(f, "parity: odd crossing sum in pants {pants}"),
            Invalid::NegativeTwist { cuff } => {
                write!(f, "negative twist on uncrossed cuff {}", cuff + 1)
            }
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

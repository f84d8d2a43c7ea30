use thiserror::Error;

/// Errors raised by field construction, operators and experiments.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("frequency {index:?} lies outside the lattice |j|_inf <= {extent}")]
    OutOfLattice { index: Vec<i64>, extent: usize },

    #[error("frequency {index:?} has dimension {got}, lattice has dimension {expected}")]
    DimensionMismatch {
        index: Vec<i64>,
        got: usize,
        expected: usize,
    },

    #[error("lattice specs differ: {left} vs {right}")]
    SpecMismatch { left: String, right: String },

    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),

    #[error("product of extent {extent} exceeds the padded budget {budget}; pad_factor >= {required_pad} required")]
    PaddingShortfall {
        extent: usize,
        budget: usize,
        required_pad: usize,
    },

    #[error("symbol is not finite at frequency {index:?}")]
    NonFiniteSymbol { index: Vec<i64> },

    #[error("cutoff parameters out of range: {0}")]
    InvalidCutoff(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Neumann series not contractive: estimated factor {factor:.6} >= 1 (raise N above the current {threshold})")]
    NonContractive { factor: f64, threshold: f64 },

    #[error("Neumann series did not reach tolerance {tol:e} after {terms} terms (last term ratio {ratio:e})")]
    NeumannNotConverged { tol: f64, terms: usize, ratio: f64 },

    #[error("initial data is not admissible: {0}")]
    Inadmissible(String),

    #[error("unknown registry id {0:?}")]
    UnknownId(String),

    #[error("missing telemetry column {0:?}")]
    MissingTelemetry(String),

    #[error("malformed serialized field: {0}")]
    Format(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

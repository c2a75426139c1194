use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or type invariant violation.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Value outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Gent model chain extensibility limit reached (I1 - 3 >= Jm).
    #[error("Gent locking at stretch {stretch:.6}: I1 - 3 = {i1m3:.6} >= Jm = {jm:.6}")]
    GentLocking { stretch: f64, i1m3: f64, jm: f64 },

    /// Requested abscissa outside the data range.
    #[error("out of range: {0}")]
    Range(String),

    /// Geometry problem (degenerate polygon, non-elliptic fit, ...).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Missing or unusable configuration (e.g. empty calibration table).
    #[error("configuration error: {0}")]
    Config(String),

    /// G-code text that does not tokenize.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Not enough structure in the data to run the analysis.
    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

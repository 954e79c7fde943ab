use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("line {line}: period {period} s does not increase on the previous row")]
    UnsortedPeriods { line: usize, period: f64 },

    #[error("noise table has no segment rows")]
    EmptyTable,

    #[error("noise table is missing its terminating single-value period row")]
    MissingTableEnd,

    #[error("period {period} s is outside the tabulated range [{min}, {max}] s")]
    PeriodOutOfRange { period: f64, min: f64, max: f64 },

    #[error("frequency {freq} Hz is outside the band [{min}, {max}] Hz")]
    FrequencyOutOfBand { freq: f64, min: f64, max: f64 },

    #[error("spectral density must be non-negative, got {0}")]
    NegativeDensity(f64),

    #[error("expected an {expected} spectral density, got {found}")]
    WrongPsdKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "harmonic sum not converged after {terms} terms (last doubling changed it by {change:.3e})"
    )]
    NotConverged { terms: usize, change: f64 },

    #[error("record covers [{start}, {end}] s but [{need_start}, {need_end}] s is required")]
    RecordTooShort {
        start: f64,
        end: f64,
        need_start: f64,
        need_end: f64,
    },

    #[error("sample rate {fs} Hz is below the required {required} Hz")]
    SampleRateTooLow { fs: f64, required: f64 },

    #[error("non-uniform sampling at sample {index}")]
    NonUniformSampling { index: usize },

    #[error("minimum not bracketed: {0}")]
    NotBracketed(String),

    #[error("non-finite value in cycle {cycle}")]
    NonFinite { cycle: usize },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}

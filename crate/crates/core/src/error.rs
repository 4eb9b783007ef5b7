use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    /// A parameter-set invariant does not hold; the message names the constraint.
    #[error("invalid parameter set: {0}")]
    InvalidParams(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("mismatched parameters: {0}")]
    Mismatch(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("support bound exceeded: smaller support has {size} elements, limit is {limit}")]
    SupportBound { size: usize, limit: usize },
    #[error("weights do not sum to one (deviation {deviation:e})")]
    Normalization { deviation: f64 },
    #[error("target failure rate 2^{target_log2} unreachable even with t = n")]
    Unreachable { target_log2: f64 },
    #[error("no admissible BCH length <= {n_max} over GF({q_alphabet}) for designed distance {d}")]
    NoAdmissibleLength { n_max: usize, q_alphabet: u32, d: usize },
    #[error("no BCH code of length <= {n_max} reaches rate {rate}")]
    RateUnreachable { n_max: usize, rate: f64 },
    #[error("alphabet size {0} is not a prime power")]
    NotPrimePower(u32),
    #[error("no GV dimension k >= 1 exists for n = {n}, d = {d}, Q = {q_alphabet}")]
    NoGvDimension { n: usize, d: usize, q_alphabet: u32 },
    #[error("input optimisation did not converge after {iterations} iterations (best {best_bits} bits, gap {gap:e})")]
    NotConverged {
        iterations: usize,
        best_bits: f64,
        gap: f64,
    },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

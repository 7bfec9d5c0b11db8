use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("even characteristic is not supported")]
    EvenCharacteristic,
    #[error("field of order {p}^{f} exceeds the table budget of {budget} elements")]
    TableBudget { p: u64, f: u32, budget: usize },
    #[error("extension degree {0} is outside the supported range 1..=4")]
    Degree(u32),
    #[error("prime {0} is ramified in the base field")]
    Ramified(u64),
    #[error("bad prime for this surface: {0}")]
    BadPrime(u64),
    #[error("polynomial is not homogeneous of degree 6")]
    NotHomogeneous,
    #[error("polynomial is not squarefree over the residue field (bad prime {0})")]
    NotSquarefree(u64),
    #[error("no node model for {0}")]
    NoNodeModel(String),
    #[error("unknown catalog entry {0}")]
    UnknownEntry(String),
    #[error("inconsistent counts: s1^2 - s2 is odd")]
    Parity,
    #[error("predictor applies to CM only ({0} has real multiplication)")]
    NotCm(String),
    #[error("value {value} outside the support of {model}")]
    OutsideSupport { model: &'static str, value: f64 },
    #[error("parameter m = {0} outside the domain")]
    Domain(f64),
    #[error("need at least {need} nonzero samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("corrupt cache {path} at line {line}: {reason}")]
    CorruptCache {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

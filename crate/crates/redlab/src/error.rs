use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input distribution is empty")]
    EmptyInput,

    #[error("negative probability: {0}")]
    NegativeProbability(f64),

    #[error("probabilities sum to {sum}, not 1 (|sum-1| > {tol})")]
    SumNotOne { sum: f64, tol: f64 },

    #[error("radix must be >= 2, got {0}")]
    BadRadix(u32),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("node {0} is not an internal node")]
    NotInternal(String),

    #[error("decomposition at the root is the identity and is not allowed")]
    RootNode,

    #[error("distribution contains no symbol within {tol} of {p}")]
    MissingSymbol { p: f64, tol: f64 },

    #[error("leaf index {index} out of range for {len} symbols")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("cannot split a zero-probability leaf")]
    ZeroLeaf,

    #[error("search rejected: {0}")]
    GridTooFine(String),

    #[error("minimizer did not converge: {0}")]
    NoConvergence(String),

    #[error("tree is not in canonical (backbone) shape: {0}")]
    NotCanonical(String),

    #[error("{0}")]
    BadConstraint(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

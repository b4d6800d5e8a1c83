//! Huffman codes and their redundancy.
//!
//! `redlab` builds binary and D-ary Huffman codes, measures their redundancy
//! (average codeword length minus source entropy), evaluates the tight
//! closed-form upper and lower redundancy bounds for sources known to contain
//! a symbol of probability `p`, and constructs the extremal distributions that
//! achieve or approach those bounds.
//!
//! The crate is organized around a handful of small modules:
//!
//! * [`dist`]: the probability-multiset data model and entropy.
//! * [`huffman`]: D-ary Huffman tree construction, codeword lengths,
//!   average length, and redundancy.
//! * [`decompose`]: splitting a Huffman tree at an internal node,
//!   canonicalization toward the backbone shape, and leaf splitting.
//! * [`bounds`]: the closed-form redundancy bounds and their constants.
//! * [`extremal`]: generators for the bound-achieving distribution families.
//! * [`oracle`]: independent brute-force and numerical verifiers
//!   (exhaustive grid search, projected-gradient cross-check, sweeps).
//! * [`cli`]: the `redlab` command-line front end.

pub mod bounds;
pub mod cli;
pub mod decompose;
pub mod dist;
mod error;
pub mod extremal;
pub mod huffman;
pub mod oracle;

pub use bounds::{BoundId, BoundValue, Constants};
pub use decompose::Decomposition;
pub use dist::ProbabilityMultiset;
pub use error::Error;
pub use extremal::ExtremalFamily;
pub use huffman::{CodeLengths, CodeTree};
pub use oracle::{
    EqualizeOutcome, JohnsenReport, KktReport, SearchConstraint, SearchLimits, SearchMode,
    SearchReport,
};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

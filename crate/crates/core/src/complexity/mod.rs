//! Complexity estimation: an exact toy machine for short words, an embedded
//! compressor for long ones, staged approximations, and a persistent table.

pub mod compressor;
pub mod estimator;
pub mod machine;
pub mod table;

pub use estimator::{
    estimator_by_name, ratio, staged_k, CeilingEstimator, ComplexityEstimator,
    CompressorEstimator, ExactEstimator, IdentityEstimator, PrefixScanner, Ratio,
};
pub use machine::{Enumeration, KValue, ToyPrefixMachine};
pub use table::{ComplexityTable, TableEntry};

use crate::bits::BitWord;
use crate::error::Result;

/// Exact complexity of `word` on the enumerated machine, within `budget` dovetailer steps.
pub fn exact_k(word: &BitWord, enumeration: &Enumeration, budget: Option<u64>) -> Result<KValue> {
    enumeration.exact_k(word, budget)
}

/// Compressed size of `word` in bits, header included.
pub fn compressor_k(word: &BitWord) -> u64 {
    compressor::compressed_bits(word)
}

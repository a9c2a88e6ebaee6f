//! Computable stand-ins for prefix complexity and their staged approximations.
//!
//! Every estimator shares the stage-0 ceiling `2|σ| + c`; staged values only
//! move down from there and settle at the final estimate at a known stage.

use std::sync::Arc;

use super::compressor::{self, OnlineCompressor, HEADER_BITS};
use super::machine::{Enumeration, STEPS_PER_STAGE};
use crate::bits::{BitSource, BitWord};
use crate::error::{Error, Result};

pub trait ComplexityEstimator: Send + Sync {
    fn id(&self) -> String;

    /// The additive constant `c` in the ceiling `2|σ| + c`.
    fn ceiling_constant(&self) -> u64;

    fn ceiling(&self, len: usize) -> u64 {
        2 * len as u64 + self.ceiling_constant()
    }

    fn estimate(&self, word: &BitWord) -> u64;

    /// Stage-`stage` approximation; nonincreasing in `stage`, equal to the
    /// ceiling at stage 0 and to [`estimate`](Self::estimate) from [`settle_stage`](Self::settle_stage) on.
    fn staged_estimate(&self, word: &BitWord, stage: u64) -> u64;

    fn settle_stage(&self, word: &BitWord) -> u64;

    /// `estimate` of every prefix of `word`, index `n` holding the value for `word[..n]`.
    fn prefix_estimates(&self, word: &BitWord) -> Vec<u64> {
        (0..=word.len())
            .map(|n| self.estimate(&word.prefix(n)))
            .collect()
    }

    /// Incremental view over the prefixes of a growing word.
    fn scanner(&self) -> Box<dyn PrefixScanner + '_>;
}

/// Staged estimates for all prefixes of a word that grows one bit at a time.
pub trait PrefixScanner {
    fn push(&mut self, bit: bool);

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Staged estimate of the prefix of length `n ≤ len()`.
    fn staged(&mut self, n: usize, stage: u64) -> u64;
}

/// Generic scanner: recomputes prefixes on demand and caches values once settled.
pub struct CachingScanner<'a, E: ComplexityEstimator + ?Sized> {
    est: &'a E,
    word: BitWord,
    settled: Vec<Option<(u64, u64)>>,
}

impl<'a, E: ComplexityEstimator + ?Sized> CachingScanner<'a, E> {
    pub fn new(est: &'a E) -> Self {
        CachingScanner {
            est,
            word: BitWord::new(),
            settled: vec![None],
        }
    }
}

impl<E: ComplexityEstimator + ?Sized> PrefixScanner for CachingScanner<'_, E> {
    fn push(&mut self, bit: bool) {
        self.word.push(bit);
        self.settled.push(None);
    }

    fn len(&self) -> usize {
        self.word.len()
    }

    fn staged(&mut self, n: usize, stage: u64) -> u64 {
        if self.settled[n].is_none() {
            let p = self.word.prefix(n);
            self.settled[n] = Some((self.est.settle_stage(&p), self.est.estimate(&p)));
        }
        let (at, value) = self.settled[n].expect("filled above");
        if stage >= at {
            value
        } else {
            self.est.staged_estimate(&self.word.prefix(n), stage)
        }
    }
}

/// `K̂(σ) = |σ|`. Ratios are identically 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityEstimator;

impl ComplexityEstimator for IdentityEstimator {
    fn id(&self) -> String {
        "identity".into()
    }

    fn ceiling_constant(&self) -> u64 {
        0
    }

    fn estimate(&self, word: &BitWord) -> u64 {
        word.len() as u64
    }

    fn staged_estimate(&self, word: &BitWord, stage: u64) -> u64 {
        if stage == 0 {
            self.ceiling(word.len())
        } else {
            self.estimate(word)
        }
    }

    fn settle_stage(&self, _word: &BitWord) -> u64 {
        1
    }

    fn prefix_estimates(&self, word: &BitWord) -> Vec<u64> {
        (0..=word.len() as u64).collect()
    }

    fn scanner(&self) -> Box<dyn PrefixScanner + '_> {
        Box::new(CachingScanner::new(self))
    }
}

/// Never improves on the ceiling: `K̂_s(σ) = 2|σ| + c` at every stage.
#[derive(Debug, Clone, Copy)]
pub struct CeilingEstimator {
    pub constant: u64,
}

impl Default for CeilingEstimator {
    fn default() -> Self {
        CeilingEstimator {
            constant: HEADER_BITS,
        }
    }
}

impl ComplexityEstimator for CeilingEstimator {
    fn id(&self) -> String {
        format!("ceiling(c={})", self.constant)
    }

    fn ceiling_constant(&self) -> u64 {
        self.constant
    }

    fn estimate(&self, word: &BitWord) -> u64 {
        self.ceiling(word.len())
    }

    fn staged_estimate(&self, word: &BitWord, _stage: u64) -> u64 {
        self.ceiling(word.len())
    }

    fn settle_stage(&self, _word: &BitWord) -> u64 {
        0
    }

    fn prefix_estimates(&self, word: &BitWord) -> Vec<u64> {
        (0..=word.len()).map(|n| self.ceiling(n)).collect()
    }

    fn scanner(&self) -> Box<dyn PrefixScanner + '_> {
        Box::new(CachingScanner::new(self))
    }
}

/// Compressed size under the embedded compressor, capped by the ceiling.
/// Stage `s` may compress words of length at most `s`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompressorEstimator;

impl ComplexityEstimator for CompressorEstimator {
    fn id(&self) -> String {
        "compressor-cm-v1".into()
    }

    fn ceiling_constant(&self) -> u64 {
        HEADER_BITS
    }

    fn estimate(&self, word: &BitWord) -> u64 {
        compressor::compressed_bits(word).min(self.ceiling(word.len()))
    }

    fn staged_estimate(&self, word: &BitWord, stage: u64) -> u64 {
        if stage >= self.settle_stage(word) {
            self.estimate(word)
        } else {
            self.ceiling(word.len())
        }
    }

    fn settle_stage(&self, word: &BitWord) -> u64 {
        (word.len() as u64).max(1)
    }

    fn prefix_estimates(&self, word: &BitWord) -> Vec<u64> {
        compressor::prefix_compressed_bits(word)
            .into_iter()
            .enumerate()
            .map(|(n, v)| v.min(self.ceiling(n)))
            .collect()
    }

    fn scanner(&self) -> Box<dyn PrefixScanner + '_> {
        Box::new(CompressorScanner {
            est: *self,
            online: OnlineCompressor::new(),
            sizes: vec![HEADER_BITS],
        })
    }
}

struct CompressorScanner {
    est: CompressorEstimator,
    online: OnlineCompressor,
    sizes: Vec<u64>,
}

impl PrefixScanner for CompressorScanner {
    fn push(&mut self, bit: bool) {
        let n = self.sizes.len();
        let v = HEADER_BITS + self.online.push(bit);
        self.sizes.push(v.min(self.est.ceiling(n)));
    }

    fn len(&self) -> usize {
        self.sizes.len() - 1
    }

    fn staged(&mut self, n: usize, stage: u64) -> u64 {
        if stage >= (n as u64).max(1) {
            self.sizes[n]
        } else {
            self.est.ceiling(n)
        }
    }
}

/// Exact complexity on the toy machine for short words; the ceiling beyond `L_max`.
/// Stage `s` grants the dovetailer `s · 10⁴` steps.
#[derive(Debug, Clone)]
pub struct ExactEstimator {
    enumeration: Arc<Enumeration>,
}

impl ExactEstimator {
    pub fn new(enumeration: Arc<Enumeration>) -> Self {
        ExactEstimator { enumeration }
    }

    pub fn enumeration(&self) -> &Enumeration {
        &self.enumeration
    }
}

impl ComplexityEstimator for ExactEstimator {
    fn id(&self) -> String {
        format!("toy-machine({})", self.enumeration.machine.identity())
    }

    /// The literal program `(0b|1b)* 10` costs `2|σ| + 2`.
    fn ceiling_constant(&self) -> u64 {
        2
    }

    fn estimate(&self, word: &BitWord) -> u64 {
        match self.enumeration.exact_k(word, None) {
            Ok(k) => k.value,
            Err(_) => self.ceiling(word.len()),
        }
    }

    fn staged_estimate(&self, word: &BitWord, stage: u64) -> u64 {
        match self
            .enumeration
            .exact_k(word, Some(stage.saturating_mul(STEPS_PER_STAGE)))
        {
            Ok(k) => k.value,
            Err(_) => self.ceiling(word.len()),
        }
    }

    fn settle_stage(&self, word: &BitWord) -> u64 {
        let target = self.estimate(word);
        if target == self.ceiling(word.len()) {
            return 0;
        }
        self.enumeration
            .first_discovery(word)
            .map_or(0, |(_, at)| at.div_ceil(STEPS_PER_STAGE))
    }

    fn scanner(&self) -> Box<dyn PrefixScanner + '_> {
        Box::new(CachingScanner::new(self))
    }
}

/// `staged_K(σ, s)`.
pub fn staged_k(word: &BitWord, stage: u64, est: &dyn ComplexityEstimator) -> u64 {
    est.staged_estimate(word, stage)
}

/// `K̂(A↾n) / n` as an exact fraction.
pub fn ratio(source: &dyn BitSource, n: u64, est: &dyn ComplexityEstimator) -> Result<Ratio> {
    if n == 0 {
        return Err(Error::ZeroLength);
    }
    Ok(Ratio::new(est.estimate(&source.prefix(n)), n))
}

/// Nonnegative fraction compared exactly by cross-multiplication.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "ratio with zero denominator");
        Ratio { num, den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for Ratio {}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.6}", self.to_f64())
    }
}

/// Estimator by name: `identity`, `ceiling`, `compressor`, or `exact`.
pub fn estimator_by_name(name: &str) -> Result<Arc<dyn ComplexityEstimator>> {
    Ok(match name {
        "identity" => Arc::new(IdentityEstimator),
        "ceiling" => Arc::new(CeilingEstimator::default()),
        "compressor" => Arc::new(CompressorEstimator),
        "exact" => Arc::new(ExactEstimator::new(Arc::new(
            super::machine::ToyPrefixMachine::default().enumerate(),
        ))),
        other => return Err(Error::Parse(format!("unknown estimator `{other}`"))),
    })
}

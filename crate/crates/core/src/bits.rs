//! Finite words, infinite bit sources, joins and guide sets.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kv::KvSpec;

/// A finite binary string.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitWord {
    bits: Vec<bool>,
}

impl BitWord {
    pub fn new() -> Self {
        BitWord { bits: Vec::new() }
    }

    pub fn zeros(n: usize) -> Self {
        BitWord {
            bits: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn prefix(&self, n: usize) -> BitWord {
        BitWord {
            bits: self.bits[..n.min(self.bits.len())].to_vec(),
        }
    }

    pub fn concat(&self, other: &BitWord) -> BitWord {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitWord { bits }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Numeral `1σ` read in base 2. `None` once the value no longer fits in 64 bits.
    pub fn code(&self) -> Option<u64> {
        encode_word(self)
    }

    /// Inverse of [`BitWord::code`].
    pub fn from_code(code: u64) -> Option<BitWord> {
        if code == 0 {
            return None;
        }
        let len = 63 - code.leading_zeros() as usize;
        Some((0..len).rev().map(|i| code >> i & 1 == 1).collect())
    }
}

impl From<Vec<bool>> for BitWord {
    fn from(bits: Vec<bool>) -> Self {
        BitWord { bits }
    }
}

impl FromIterator<bool> for BitWord {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitWord {
            bits: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord(\"{self}\")")
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("not a bit: `{other}`"))),
            })
            .collect()
    }
}

/// Value of the numeral `1σ`: injective on words, and strictly increasing along the
/// prefixes of any fixed sequence.
pub fn encode_word(word: &BitWord) -> Option<u64> {
    if word.len() >= 64 {
        return None;
    }
    Some(word.iter().fold(1u64, |acc, b| acc << 1 | b as u64))
}

/// A total, deterministic map from positions to bits.
pub trait BitSource: Send + Sync + fmt::Debug {
    fn bit(&self, n: u64) -> bool;

    /// Replayable description of the source.
    fn describe(&self) -> String;

    /// Exclusive bound on the parent indices consulted to produce bit `n`.
    /// Root sources have no parents and report 0.
    fn use_bound(&self, _n: u64) -> u64 {
        0
    }

    fn prefix(&self, n: u64) -> BitWord {
        (0..n).map(|i| self.bit(i)).collect()
    }
}

pub type Source = Arc<dyn BitSource>;

pub fn prefix(source: &dyn BitSource, n: u64) -> BitWord {
    source.prefix(n)
}

/// `A(m) A(m+1) … A(n-1)`.
pub fn slice(source: &dyn BitSource, m: u64, n: u64) -> Result<BitWord> {
    if m > n {
        return Err(Error::InvalidRange { start: m, end: n });
    }
    if m == 0 {
        return Ok(source.prefix(n));
    }
    Ok((m..n).map(|i| source.bit(i)).collect())
}

#[derive(Debug, Clone, Copy)]
pub struct Constant(pub bool);

impl BitSource for Constant {
    fn bit(&self, _n: u64) -> bool {
        self.0
    }

    fn describe(&self) -> String {
        format!("kind=constant bit={}", self.0 as u8)
    }
}

#[derive(Debug, Clone)]
pub struct Periodic {
    pattern: BitWord,
}

impl Periodic {
    pub fn new(pattern: BitWord) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::Parse("periodic pattern must be nonempty".into()));
        }
        Ok(Periodic { pattern })
    }
}

impl BitSource for Periodic {
    fn bit(&self, n: u64) -> bool {
        self.pattern.as_slice()[(n % self.pattern.len() as u64) as usize]
    }

    fn describe(&self) -> String {
        format!("kind=periodic pattern={}", self.pattern)
    }
}

/// Seeded ChaCha8 keystream read as bits, least significant bit of each word first.
#[derive(Debug, Clone, Copy)]
pub struct Pseudorandom {
    seed: u64,
}

impl Pseudorandom {
    pub fn new(seed: u64) -> Self {
        Pseudorandom { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl BitSource for Pseudorandom {
    fn bit(&self, n: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos((n / 32) as u128);
        rng.next_u32() >> (n % 32) & 1 == 1
    }

    fn describe(&self) -> String {
        format!("kind=pseudorandom seed={}", self.seed)
    }

    fn prefix(&self, n: u64) -> BitWord {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(n as usize);
        while (out.len() as u64) < n {
            let w = rng.next_u32();
            let take = (n - out.len() as u64).min(32);
            out.extend((0..take).map(|i| w >> i & 1 == 1));
        }
        BitWord::from(out)
    }
}

/// ASCII bit file; positions past the end of the file read as 0.
#[derive(Debug, Clone)]
pub struct FileBacked {
    path: PathBuf,
    bits: Arc<BitWord>,
}

impl FileBacked {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let bits: BitWord = text.split_whitespace().collect::<String>().parse()?;
        Ok(FileBacked {
            path: path.as_ref().to_path_buf(),
            bits: Arc::new(bits),
        })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl BitSource for FileBacked {
    fn bit(&self, n: u64) -> bool {
        usize::try_from(n)
            .ok()
            .and_then(|i| self.bits.get(i))
            .unwrap_or(false)
    }

    fn describe(&self) -> String {
        format!("kind=file path={}", self.path.display())
    }
}

/// `A0 ⊕ A1`: even positions from `A0`, odd positions from `A1`.
#[derive(Debug, Clone)]
pub struct Join2 {
    pub even: Source,
    pub odd: Source,
}

impl BitSource for Join2 {
    fn bit(&self, n: u64) -> bool {
        if n % 2 == 0 {
            self.even.bit(n / 2)
        } else {
            self.odd.bit(n / 2)
        }
    }

    fn describe(&self) -> String {
        format!("join2({} | {})", self.even.describe(), self.odd.describe())
    }

    fn use_bound(&self, n: u64) -> u64 {
        n / 2 + 1
    }
}

pub fn join2(even: Source, odd: Source) -> Source {
    Arc::new(Join2 { even, odd })
}

/// Splits `A0 ⊕ A1` back into its halves.
pub fn deinterleave(word: &BitWord) -> (BitWord, BitWord) {
    let even = word.iter().step_by(2).collect();
    let odd = word.iter().skip(1).step_by(2).collect();
    (even, odd)
}

/// Builds a root source from a spec such as `kind=pseudorandom seed=7`.
pub fn source_from_spec(spec: &str) -> Result<Source> {
    let mut kv = KvSpec::parse(spec)?;
    let kind = kv.require_str("kind")?;
    let source: Source = match kind.as_str() {
        "constant" => {
            let bit: u8 = kv.require("bit")?;
            if bit > 1 {
                return Err(Error::Parse(format!("constant bit must be 0 or 1, got {bit}")));
            }
            Arc::new(Constant(bit == 1))
        }
        "zeros" => Arc::new(Constant(false)),
        "ones" => Arc::new(Constant(true)),
        "periodic" => Arc::new(Periodic::new(kv.require_str("pattern")?.parse()?)?),
        "pseudorandom" => Arc::new(Pseudorandom::new(kv.require("seed")?)),
        "file" => Arc::new(FileBacked::open(kv.require_str("path")?)?),
        other => return Err(Error::Parse(format!("unknown source kind `{other}`"))),
    };
    kv.finish()?;
    Ok(source)
}

/// A total membership predicate on the naturals.
#[derive(Debug, Clone)]
pub enum GuideSet {
    Empty,
    All,
    Evens,
    Odds,
    /// Finite set, listed in any order.
    Finite(Arc<[u64]>),
    /// Membership read off a bit source: `n ∈ X` iff `X(n) = 1`.
    FromSource(Source),
    /// Codes of all finite prefixes of a source, `{code(A↾n) : n ∈ ℕ}`.
    PrefixCodes(Source),
    /// `X0 ⊕ X0`: `n ∈ X` iff `⌊n/2⌋ ∈ X0`.
    Double(Arc<GuideSet>),
    /// `{3k+j : k ∈ A_j}`.
    Join3(Arc<[GuideSet; 3]>),
    Complement(Arc<GuideSet>),
}

impl GuideSet {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            GuideSet::Empty => false,
            GuideSet::All => true,
            GuideSet::Evens => n % 2 == 0,
            GuideSet::Odds => n % 2 == 1,
            GuideSet::Finite(xs) => xs.contains(&n),
            GuideSet::FromSource(s) => s.bit(n),
            GuideSet::PrefixCodes(s) => match BitWord::from_code(n) {
                Some(w) => w == s.prefix(w.len() as u64),
                None => false,
            },
            GuideSet::Double(x) => x.contains(n / 2),
            GuideSet::Join3(parts) => parts[(n % 3) as usize].contains(n / 3),
            GuideSet::Complement(x) => !x.contains(n),
        }
    }

    pub fn double(inner: GuideSet) -> GuideSet {
        GuideSet::Double(Arc::new(inner))
    }

    pub fn complement(inner: GuideSet) -> GuideSet {
        GuideSet::Complement(Arc::new(inner))
    }

    pub fn describe(&self) -> String {
        match self {
            GuideSet::Empty => "empty".into(),
            GuideSet::All => "all".into(),
            GuideSet::Evens => "evens".into(),
            GuideSet::Odds => "odds".into(),
            GuideSet::Finite(xs) => {
                let items: Vec<String> = xs.iter().map(u64::to_string).collect();
                format!("finite({})", items.join(","))
            }
            GuideSet::FromSource(s) => format!("bits({})", s.describe()),
            GuideSet::PrefixCodes(s) => format!("prefix-codes({})", s.describe()),
            GuideSet::Double(x) => format!("double({})", x.describe()),
            GuideSet::Join3(p) => format!(
                "join3({}; {}; {})",
                p[0].describe(),
                p[1].describe(),
                p[2].describe()
            ),
            GuideSet::Complement(x) => format!("complement({})", x.describe()),
        }
    }
}

pub fn join3(a0: GuideSet, a1: GuideSet, a2: GuideSet) -> GuideSet {
    GuideSet::Join3(Arc::new([a0, a1, a2]))
}

/// `1_X(n)`.
pub fn indicator(set: &GuideSet, n: u64) -> u8 {
    set.contains(n) as u8
}

/// Guide set from a spec such as `kind=evens` or `kind=prefix-codes seed=11`.
pub fn guide_from_spec(spec: &str) -> Result<GuideSet> {
    let mut kv = KvSpec::parse(spec)?;
    let kind = kv.require_str("kind")?;
    let guide = match kind.as_str() {
        "empty" => GuideSet::Empty,
        "all" => GuideSet::All,
        "evens" => GuideSet::Evens,
        "odds" => GuideSet::Odds,
        "finite" => {
            let list = kv.take_str("elements").unwrap_or_default();
            let xs = list
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad element `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            GuideSet::Finite(xs.into())
        }
        "prefix-codes" => GuideSet::PrefixCodes(Arc::new(Pseudorandom::new(kv.require("seed")?))),
        "bits" => GuideSet::FromSource(Arc::new(Pseudorandom::new(kv.require("seed")?))),
        other => return Err(Error::Parse(format!("unknown guide kind `{other}`"))),
    };
    kv.finish()?;
    Ok(guide)
}

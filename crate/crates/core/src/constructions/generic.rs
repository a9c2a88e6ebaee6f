//! Finite-extension builder meeting a bank of requirements round-robin.
//!
//! Each requirement names an index set and a polarity. Meeting it means extending
//! the word to a length in the set, filling the new block from the low source
//! (compressible) or the high source (incompressible). Each new block has length
//! at least `max(min_block, growth·L)`, where `L` is the current length, so the
//! block dominates the prefix that ends at the meeting point.

use serde::Serialize;

use crate::bits::{BitSource, BitWord, Source};
use crate::error::{Error, Result};
use crate::families::{IndexFamily, IndexSet, Lookup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    Compressible,
    Incompressible,
}

impl std::str::FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compressible" | "low" => Ok(Polarity::Compressible),
            "incompressible" | "high" => Ok(Polarity::Incompressible),
            other => Err(Error::Parse(format!("unknown polarity `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Requirement {
    pub set: IndexSet,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenericParams {
    pub horizon: u64,
    pub min_block: u64,
    pub growth: u64,
}

impl Default for GenericParams {
    fn default() -> Self {
        GenericParams {
            horizon: 1 << 13,
            min_block: 1,
            growth: 0,
        }
    }
}

/// One extension step: requirement `requirement` met by the block `[from, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Meet {
    pub requirement: usize,
    pub from: u64,
    pub to: u64,
}

/// The built sequence: the constructed word, continued by the low source.
#[derive(Debug, Clone)]
pub struct GenericBuild {
    built: BitWord,
    low: Source,
    high: Source,
    bank: Vec<Requirement>,
    params: GenericParams,
    pub meets: Vec<Meet>,
}

impl GenericBuild {
    pub fn built_len(&self) -> u64 {
        self.built.len() as u64
    }

    pub fn bank(&self) -> &[Requirement] {
        &self.bank
    }

    /// Number of meets per requirement, in bank order.
    pub fn meet_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.bank.len()];
        for m in &self.meets {
            counts[m.requirement] += 1;
        }
        counts
    }

    /// The family of all sets in the bank with the given polarity.
    pub fn designated_family(&self, polarity: Polarity) -> Result<IndexFamily> {
        let label = match polarity {
            Polarity::Compressible => "compressible-designated",
            Polarity::Incompressible => "incompressible-designated",
        };
        IndexFamily::new(
            label,
            self.bank
                .iter()
                .filter(|r| r.polarity == polarity)
                .map(|r| r.set.clone())
                .collect(),
        )
    }
}

impl BitSource for GenericBuild {
    fn bit(&self, n: u64) -> bool {
        match self.built.get(n as usize) {
            Some(b) => b,
            None => self.low.bit(n),
        }
    }

    fn describe(&self) -> String {
        let reqs: Vec<String> = self
            .bank
            .iter()
            .map(|r| format!("{:?}:{}", r.polarity, r.set))
            .collect();
        format!(
            "generic(low={}; high={}; horizon={} min_block={} growth={}; bank=[{}])",
            self.low.describe(),
            self.high.describe(),
            self.params.horizon,
            self.params.min_block,
            self.params.growth,
            reqs.join(" | ")
        )
    }

    fn use_bound(&self, n: u64) -> u64 {
        n + 1
    }

    fn prefix(&self, n: u64) -> BitWord {
        let have = self.built.len() as u64;
        if n <= have {
            return self.built.prefix(n as usize);
        }
        let tail = self.low.prefix(n);
        self.built.concat(&BitWord::from(tail.as_slice()[have as usize..].to_vec()))
    }
}

/// Round-robin finite-extension construction up to `params.horizon`.
///
/// Stops when no requirement can be met again below the horizon.
pub fn build_generic_like(
    bank: Vec<Requirement>,
    low: Source,
    high: Source,
    params: GenericParams,
) -> Result<GenericBuild> {
    if bank.is_empty() {
        return Err(Error::UnsatisfiableBank("empty bank".into()));
    }
    let h = params.horizon;
    for (i, a) in bank.iter().enumerate() {
        for b in &bank[i + 1..] {
            if a.polarity != b.polarity && a.set.elements_up_to(h) == b.set.elements_up_to(h) {
                return Err(Error::UnsatisfiableBank(format!(
                    "`{}` is required both compressible and incompressible",
                    a.set
                )));
            }
        }
    }

    let low_bits = low.prefix(h);
    let high_bits = high.prefix(h);
    let mut built = BitWord::new();
    let mut meets = Vec::new();
    let mut idle = 0;
    let mut i = 0;
    while idle < bank.len() {
        let req = &bank[i];
        let len = built.len() as u64;
        let need = len + params.min_block.max(params.growth.saturating_mul(len)).max(1);
        match req.set.next_after(need.checked_sub(1), h) {
            Lookup::Element(t) => {
                let fill = match req.polarity {
                    Polarity::Compressible => &low_bits,
                    Polarity::Incompressible => &high_bits,
                };
                for pos in len..t {
                    built.push(fill.get(pos as usize).expect("fill covers the horizon"));
                }
                meets.push(Meet {
                    requirement: i,
                    from: len,
                    to: t,
                });
                idle = 0;
            }
            Lookup::Exhausted => idle += 1,
        }
        i = (i + 1) % bank.len();
    }
    Ok(GenericBuild {
        built,
        low,
        high,
        bank,
        params,
        meets,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bits::{Constant, Pseudorandom};

    fn zeros() -> Source {
        Arc::new(Constant(false))
    }

    fn random() -> Source {
        Arc::new(Pseudorandom::new(7))
    }

    #[test]
    fn single_compressible_requirement_gives_zeros() {
        let bank = vec![Requirement {
            set: IndexSet::naturals(),
            polarity: Polarity::Compressible,
        }];
        let g = build_generic_like(bank, zeros(), random(), GenericParams::default()).unwrap();
        assert_eq!(g.built_len(), 1 << 13);
        assert!(g.prefix(10_000).iter().all(|b| !b));
    }

    #[test]
    fn each_requirement_met_three_times_by_8192() {
        let bank = vec![
            Requirement {
                set: IndexSet::pow2(0, 2),
                polarity: Polarity::Incompressible,
            },
            Requirement {
                set: IndexSet::pow2(1, 2),
                polarity: Polarity::Compressible,
            },
        ];
        let g = build_generic_like(bank, zeros(), random(), GenericParams::default()).unwrap();
        for (i, c) in g.meet_counts().into_iter().enumerate() {
            assert!(c >= 3, "requirement {i} met {c} times");
        }
        for m in &g.meets {
            assert!(m.from < m.to);
            assert!(g.bank()[m.requirement].set.contains(m.to));
        }
        let r = random();
        for m in g.meets.iter().filter(|m| m.requirement == 0) {
            for n in m.from..m.to {
                assert_eq!(g.bit(n), r.bit(n));
            }
        }
    }

    #[test]
    fn opposite_polarities_on_one_set_conflict() {
        let bank = vec![
            Requirement {
                set: IndexSet::progression(0, 5),
                polarity: Polarity::Compressible,
            },
            Requirement {
                set: IndexSet::progression(0, 5),
                polarity: Polarity::Incompressible,
            },
        ];
        assert!(matches!(
            build_generic_like(bank, zeros(), random(), GenericParams::default()),
            Err(Error::UnsatisfiableBank(_))
        ));
    }

    #[test]
    fn growth_makes_blocks_dominate() {
        let bank = vec![
            Requirement {
                set: IndexSet::naturals(),
                polarity: Polarity::Incompressible,
            },
            Requirement {
                set: IndexSet::naturals(),
                polarity: Polarity::Incompressible,
            },
        ];
        let params = GenericParams {
            horizon: 1 << 16,
            min_block: 64,
            growth: 8,
        };
        let g = build_generic_like(bank, zeros(), random(), params).unwrap();
        for m in &g.meets[1..] {
            assert!(m.to - m.from >= 8 * m.from);
        }
    }
}

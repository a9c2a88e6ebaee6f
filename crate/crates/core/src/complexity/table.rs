//! On-disk cache of complexity values.
//!
//! Text format, one entry per line after a two-line header:
//!
//! ```text
//! # dimlab complexity table v1
//! # machine 3f09a1c2d4e5b6a7
//! 5 4 1
//! ```
//!
//! Each entry is `hex(code(σ)) value stage`, sorted by code, where `code` is the
//! numeral `1σ` (so words of any length, including ε, are unambiguous).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::machine::{Enumeration, STEPS_PER_STAGE};
use crate::bits::BitWord;
use crate::error::{Error, Result};

const MAGIC: &str = "# dimlab complexity table v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableEntry {
    pub value: u64,
    /// Stage at which the value was first reached.
    pub stage: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityTable {
    machine: String,
    entries: BTreeMap<u64, TableEntry>,
}

impl ComplexityTable {
    pub fn new(machine: impl Into<String>) -> Self {
        ComplexityTable {
            machine: machine.into(),
            entries: BTreeMap::new(),
        }
    }

    /// Table of every word of length ≤ `max_len` that a program in the enumeration prints,
    /// valued at its shortest program.
    pub fn from_enumeration(e: &Enumeration, max_len: usize) -> Self {
        let mut table = ComplexityTable::new(e.machine.identity());
        for p in &e.programs {
            let Some(code) = p.output_code else { continue };
            let Some(word) = BitWord::from_code(code as u64) else { continue };
            if word.len() > max_len {
                continue;
            }
            table.insert(
                &word,
                TableEntry {
                    value: p.len as u64,
                    stage: p.discovered_at.div_ceil(STEPS_PER_STAGE),
                },
            );
        }
        table
    }

    pub fn machine(&self) -> &str {
        &self.machine
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &BitWord) -> Option<TableEntry> {
        self.entries.get(&word.code()?).copied()
    }

    /// Keeps the smaller value (earlier stage on ties).
    pub fn insert(&mut self, word: &BitWord, entry: TableEntry) {
        let code = word.code().expect("table words are shorter than 64 bits");
        self.entries
            .entry(code)
            .and_modify(|cur| {
                if (entry.value, entry.stage) < (cur.value, cur.stage) {
                    *cur = entry;
                }
            })
            .or_insert(entry);
    }

    /// Pointwise minimum with `other`; rejects tables from another machine.
    pub fn merge(&mut self, other: &ComplexityTable) -> Result<()> {
        if self.machine != other.machine {
            return Err(Error::MachineMismatch {
                ours: self.machine.clone(),
                theirs: other.machine.clone(),
            });
        }
        for (&code, &entry) in &other.entries {
            let word = BitWord::from_code(code).expect("stored codes are valid");
            self.insert(&word, entry);
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (BitWord, TableEntry)> + '_ {
        self.entries
            .iter()
            .map(|(&c, &e)| (BitWord::from_code(c).expect("valid code"), e))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC}\n# machine {}\n", self.machine);
        for (code, e) in &self.entries {
            writeln!(out, "{code:x} {} {}", e.value, e.stage).expect("write to string");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(MAGIC) {
            return Err(Error::Parse("missing complexity table header".into()));
        }
        let machine = lines
            .next()
            .and_then(|l| l.strip_prefix("# machine "))
            .ok_or_else(|| Error::Parse("missing machine line".into()))?
            .to_string();
        let mut entries = BTreeMap::new();
        let mut prev = None;
        for (i, line) in lines.enumerate() {
            let bad = || Error::Parse(format!("table line {}: `{line}`", i + 3));
            let mut parts = line.split_whitespace();
            let code = u64::from_str_radix(parts.next().ok_or_else(bad)?, 16).map_err(|_| bad())?;
            let value = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let stage = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if parts.next().is_some() || code == 0 || prev.is_some_and(|p| p >= code) {
                return Err(bad());
            }
            prev = Some(code);
            entries.insert(code, TableEntry { value, stage });
        }
        Ok(ComplexityTable { machine, entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

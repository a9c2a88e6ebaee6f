//! Weak truth-table machines run behind a use-bound monitor.

use std::fmt;

use serde::Serialize;

use super::monitor::QueryMonitor;
use crate::bits::{BitSource, BitWord, Source};
use crate::constructions::UseBound;
use crate::error::{Error, Result};

/// The evaluation procedure of a machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Program {
    /// `Φ^X(n) = X(n)`.
    Identity,
    /// `Φ^X(m) = X(⌊√m⌋)`: bit `n` of `X` repeated `2n + 1` times.
    BitRepeat,
    /// `Φ^X(0) = 0`, `Φ^X(n) = X(n² − 1)`.
    SquareSampler,
    /// Spins without producing bit `from` onward.
    LoopsFrom { from: u64 },
    /// Queries one index past its declared bound at bit `at`.
    OverreachesAt { at: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WttMachine {
    pub program: Program,
    pub use_bound: UseBound,
    /// Interpreter steps allowed per output bit.
    pub step_budget: u64,
}

pub const DEFAULT_STEP_BUDGET: u64 = 1 << 20;

impl WttMachine {
    pub fn identity() -> Self {
        WttMachine {
            program: Program::Identity,
            use_bound: UseBound::Successor,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }

    pub fn bit_repeat() -> Self {
        WttMachine {
            program: Program::BitRepeat,
            use_bound: UseBound::IsqrtPlusOne,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }

    pub fn square_sampler() -> Self {
        WttMachine {
            program: Program::SquareSampler,
            use_bound: UseBound::Square,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }

    pub fn with_budget(mut self, step_budget: u64) -> Self {
        self.step_budget = step_budget;
        self
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "identity" => Self::identity(),
            "bit-repeat" => Self::bit_repeat(),
            "square-sampler" => Self::square_sampler(),
            other => return Err(Error::Parse(format!("unknown machine `{other}`"))),
        })
    }

    pub fn name(&self) -> String {
        match self.program {
            Program::Identity => "identity".into(),
            Program::BitRepeat => "bit-repeat".into(),
            Program::SquareSampler => "square-sampler".into(),
            Program::LoopsFrom { from } => format!("loops-from-{from}"),
            Program::OverreachesAt { at } => format!("overreaches-at-{at}"),
        }
    }

    /// One output bit: `Ok(None)` when the step budget runs out first.
    fn eval(&self, oracle: &mut QueryMonitor, n: u64) -> Result<Option<bool>> {
        let bound = self.use_bound.eval(n);
        let mut steps = 0u64;
        let mut tick = |cost: u64| {
            steps += cost;
            steps <= self.step_budget
        };
        if !tick(1) {
            return Ok(None);
        }
        let bit = match self.program {
            Program::Identity => oracle.bounded_query(n, n, bound)?,
            Program::BitRepeat => oracle.bounded_query(n, n.isqrt(), bound)?,
            Program::SquareSampler => match n {
                0 => false,
                _ => oracle.bounded_query(n, n * n - 1, bound)?,
            },
            Program::LoopsFrom { from } => {
                if n >= from {
                    while tick(1) {}
                    return Ok(None);
                }
                oracle.bounded_query(n, n, bound)?
            }
            Program::OverreachesAt { at } => {
                let index = if n == at { bound } else { n };
                oracle.bounded_query(n, index, bound)?
            }
        };
        Ok(Some(bit))
    }
}

impl fmt::Display for WttMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (use {}, budget {})", self.name(), self.use_bound, self.step_budget)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum WttOutcome {
    Total {
        #[serde(serialize_with = "bits_as_str")]
        bits: BitWord,
        query_high_water: Option<u64>,
    },
    /// Bit `at` did not halt within the step budget.
    NonTotal {
        at: u64,
        #[serde(serialize_with = "bits_as_str")]
        partial: BitWord,
    },
}

fn bits_as_str<S: serde::Serializer>(w: &BitWord, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&w.to_string())
}

impl WttOutcome {
    pub fn bits(&self) -> &BitWord {
        match self {
            WttOutcome::Total { bits, .. } => bits,
            WttOutcome::NonTotal { partial, .. } => partial,
        }
    }
}

/// First `n_bits` of `Φ^X`, or the first bit that exhausted the budget.
/// A query at or beyond the use bound is an error.
pub fn apply_wtt(m: &WttMachine, x: Source, n_bits: u64) -> Result<WttOutcome> {
    let mut oracle = QueryMonitor::new(x);
    let mut bits = BitWord::new();
    for n in 0..n_bits {
        match m.eval(&mut oracle, n)? {
            Some(b) => bits.push(b),
            None => return Ok(WttOutcome::NonTotal { at: n, partial: bits }),
        }
    }
    Ok(WttOutcome::Total {
        bits,
        query_high_water: oracle.high_water(),
    })
}

/// `Φ^X` as a bit source (for the shipped total machines).
#[derive(Debug, Clone)]
pub struct WttImage {
    machine: WttMachine,
    x: Source,
}

impl WttImage {
    pub fn new(machine: WttMachine, x: Source) -> Self {
        WttImage { machine, x }
    }
}

impl BitSource for WttImage {
    fn bit(&self, n: u64) -> bool {
        let mut oracle = QueryMonitor::new(self.x.clone());
        self.machine
            .eval(&mut oracle, n)
            .expect("shipped machines respect their use bound")
            .expect("shipped machines are total")
    }

    fn describe(&self) -> String {
        format!("wtt({}; {})", self.machine, self.x.describe())
    }

    fn use_bound(&self, n: u64) -> u64 {
        self.machine.use_bound.eval(n)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bits::{Periodic, Pseudorandom};

    fn x() -> Source {
        Arc::new(Pseudorandom::new(9))
    }

    #[test]
    fn identity_machine_copies() {
        let out = apply_wtt(&WttMachine::identity(), x(), 300).unwrap();
        assert_eq!(out.bits(), &x().prefix(300));
    }

    #[test]
    fn bit_repeat_layout() {
        let alt: Source = Arc::new(Periodic::new("01".parse().unwrap()).unwrap());
        let out = apply_wtt(&WttMachine::bit_repeat(), alt, 16).unwrap();
        assert_eq!(out.bits().to_string(), "0111000001111111");
        // n oracle bits give n² output bits.
        for n in 1..40u64 {
            let used = (0..n * n).map(|m| WttMachine::bit_repeat().use_bound.eval(m)).max().unwrap();
            assert_eq!(used, n);
        }
    }

    #[test]
    fn zero_budget_is_nontotal_at_zero() {
        let m = WttMachine::identity().with_budget(0);
        assert_eq!(
            apply_wtt(&m, x(), 10).unwrap(),
            WttOutcome::NonTotal {
                at: 0,
                partial: BitWord::new()
            }
        );
    }

    #[test]
    fn looping_machine_reports_where_it_stalls() {
        let m = WttMachine {
            program: Program::LoopsFrom { from: 5 },
            use_bound: UseBound::Successor,
            step_budget: 1000,
        };
        match apply_wtt(&m, x(), 10).unwrap() {
            WttOutcome::NonTotal { at, partial } => {
                assert_eq!(at, 5);
                assert_eq!(partial, x().prefix(5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overreach_is_a_use_violation() {
        let m = WttMachine {
            program: Program::OverreachesAt { at: 3 },
            use_bound: UseBound::Successor,
            step_budget: 10,
        };
        assert_eq!(
            apply_wtt(&m, x(), 10),
            Err(Error::UseViolation { n: 3, index: 4, bound: 4 })
        );
    }

    #[test]
    fn shipped_machines_stay_within_bounds() {
        for m in [WttMachine::identity(), WttMachine::bit_repeat(), WttMachine::square_sampler()] {
            let out = apply_wtt(&m, x(), 2000).unwrap();
            assert!(matches!(out, WttOutcome::Total { .. }), "{m}");
            let image = WttImage::new(m.clone(), x());
            assert_eq!(&image.prefix(2000), out.bits());
        }
    }
}

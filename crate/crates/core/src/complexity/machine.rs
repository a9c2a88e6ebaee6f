//! A small self-delimiting machine whose halting programs can be enumerated
//! exhaustively, giving exact (machine-relative) prefix complexity for short words.
//!
//! Instruction set, read left to right from the program:
//!
//! | code         | effect                                              |
//! |--------------|-----------------------------------------------------|
//! | `00` / `01`  | emit 0 / emit 1                                     |
//! | `10`         | halt                                                |
//! | `110 γ(k)`   | append a copy of the last `k` output bits           |
//! | `1110`       | append a copy of the whole output                   |
//! | `1111 γ(n)`  | append `n` copies of the last output bit (0 if none)|
//!
//! `γ` is the Elias gamma code. A copy reaching before the start of the output
//! never halts. A program is in the domain only if it halts exactly after its
//! last bit, so the domain is prefix-free.

use std::collections::HashMap;

use sha2::{Digest, Sha256};

use crate::bits::BitWord;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_OUTPUT: usize = 16;
pub const DEFAULT_MAX_PROGRAM: usize = 24;
pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;
/// Dovetailer steps granted per stage.
pub const STEPS_PER_STAGE: u64 = 10_000;

const HALT_LEN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyPrefixMachine {
    /// Longest output tracked bit-for-bit (`L_max`).
    pub max_output: usize,
    /// Longest program enumerated.
    pub max_program: usize,
    /// Interpreter steps allowed per program.
    pub step_budget: u64,
}

impl Default for ToyPrefixMachine {
    fn default() -> Self {
        ToyPrefixMachine {
            max_output: DEFAULT_MAX_OUTPUT,
            max_program: DEFAULT_MAX_PROGRAM,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

/// Result of running one concrete program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    /// Halted after reading exactly the whole program.
    Halted { output: BitWord, steps: u64 },
    /// Halted before reaching the end of the program.
    HaltedEarly { consumed: usize },
    /// Ran off the end of the program while still reading.
    NeedsMoreBits,
    /// Entered a non-halting state.
    Diverged,
    BudgetExhausted,
}

#[derive(Debug, Clone)]
struct Tape {
    content: Vec<bool>,
    len: u64,
    last: bool,
    cap: usize,
}

impl Tape {
    fn new(cap: usize) -> Self {
        Tape {
            content: Vec::new(),
            len: 0,
            last: false,
            cap,
        }
    }

    fn overflowed(&self) -> bool {
        self.len > self.cap as u64
    }

    fn emit(&mut self, bit: bool) {
        self.len += 1;
        self.last = bit;
        if !self.overflowed() {
            self.content.push(bit);
        }
    }

    /// Appends `count` bits produced by `source(i)`; content is kept only while short.
    fn append_with(&mut self, count: u64, source: impl Fn(&[bool], u64) -> bool) {
        if count == 0 {
            return;
        }
        let new_len = self.len.saturating_add(count);
        if new_len <= self.cap as u64 {
            let snapshot = self.content.clone();
            for i in 0..count {
                let b = source(&snapshot, i);
                self.content.push(b);
            }
            self.last = *self.content.last().unwrap();
        } else {
            self.content.clear();
        }
        self.len = new_len;
    }

    fn copy_tail(&mut self, k: u64) -> bool {
        if k == 0 || k > self.len {
            return false;
        }
        // The copied block ends with the current last bit, so `last` is unchanged.
        let len = self.len;
        self.append_with(k, |c, i| c[(len - k + i) as usize]);
        true
    }

    fn double(&mut self) {
        let len = self.len;
        self.append_with(len, |c, i| c[i as usize]);
    }

    fn run(&mut self, n: u64) {
        let last = self.last;
        self.append_with(n, |_, _| last);
        self.last = last;
    }

    fn output(&self) -> Option<BitWord> {
        (!self.overflowed()).then(|| BitWord::from(self.content.clone()))
    }
}

fn gamma_len(n: u64) -> usize {
    2 * (63 - n.leading_zeros() as usize) + 1
}

fn push_gamma(bits: &mut Vec<bool>, n: u64) {
    let width = 64 - n.leading_zeros() as usize;
    bits.extend(std::iter::repeat_n(false, width - 1));
    bits.extend((0..width).rev().map(|i| n >> i & 1 == 1));
}

/// Gamma-decodes from `bits[pos..]`, returning the value and the new position.
fn read_gamma(bits: &[bool], mut pos: usize) -> Option<(u64, usize)> {
    let mut zeros = 0;
    while *bits.get(pos)? == false {
        zeros += 1;
        pos += 1;
        if zeros > 62 {
            return None;
        }
    }
    let mut n = 0u64;
    for _ in 0..=zeros {
        n = n << 1 | *bits.get(pos)? as u64;
        pos += 1;
    }
    Some((n, pos))
}

/// Program encodings, usable for building test programs.
pub mod asm {
    use super::push_gamma;
    use crate::bits::BitWord;

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Op {
        Emit(bool),
        Halt,
        Copy(u64),
        Double,
        Run(u64),
    }

    pub fn assemble(ops: &[Op]) -> BitWord {
        let mut bits = Vec::new();
        for op in ops {
            match *op {
                Op::Emit(b) => bits.extend([false, b]),
                Op::Halt => bits.extend([true, false]),
                Op::Copy(k) => {
                    bits.extend([true, true, false]);
                    push_gamma(&mut bits, k);
                }
                Op::Double => bits.extend([true, true, true, false]),
                Op::Run(n) => {
                    bits.extend([true, true, true, true]);
                    push_gamma(&mut bits, n);
                }
            }
        }
        BitWord::from(bits)
    }

    /// The literal program for `word`: emit every bit, then halt.
    pub fn literal(word: &BitWord) -> BitWord {
        let mut ops: Vec<Op> = word.iter().map(Op::Emit).collect();
        ops.push(Op::Halt);
        assemble(&ops)
    }
}

/// One enumerated halting program.
#[derive(Debug, Clone, Copy)]
pub struct HaltingProgram {
    /// Program bits, first bit most significant.
    pub bits: u64,
    pub len: u8,
    /// `code(output)` when the output is at most `max_output` bits long.
    pub output_code: Option<u32>,
    pub steps: u64,
    /// Cumulative dovetailer steps when this program is found.
    pub discovered_at: u64,
}

impl HaltingProgram {
    pub fn program(&self) -> BitWord {
        (0..self.len)
            .rev()
            .map(|i| self.bits >> i & 1 == 1)
            .collect()
    }
}

/// Every halting program up to `max_program` bits, in dovetail order
/// (by length, then lexicographically).
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub machine: ToyPrefixMachine,
    pub programs: Vec<HaltingProgram>,
    /// Shortest program that exhausted its step budget, if any.
    pub shortest_exhausted: Option<usize>,
    /// `cost_through[l]`: dovetailer steps spent once every program of length ≤ `l` is done.
    pub cost_through: Vec<u64>,
    /// First (hence shortest) program per output code: `(length, discovered_at)`.
    first_by_code: HashMap<u32, (u8, u64)>,
}

impl ToyPrefixMachine {
    pub fn with_limits(max_output: usize, max_program: usize) -> Self {
        ToyPrefixMachine {
            max_output,
            max_program,
            ..Default::default()
        }
    }

    /// Stable identity of the machine, used to tag complexity tables.
    pub fn identity(&self) -> String {
        let desc = format!(
            "toy-prefix-v1 isa=00,01,10,110g,1110,1111g out={} prog={} budget={}",
            self.max_output, self.max_program, self.step_budget
        );
        let digest = Sha256::digest(desc.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Interprets one concrete program.
    pub fn run(&self, program: &BitWord) -> RunOutcome {
        let bits = program.as_slice();
        // Output length never exceeds the step count, so the whole output fits.
        let mut tape = Tape::new(self.step_budget as usize);
        let mut pos = 0usize;
        let mut steps = 0u64;
        loop {
            steps += 1;
            if steps > self.step_budget {
                return RunOutcome::BudgetExhausted;
            }
            let Some(&b0) = bits.get(pos) else {
                return RunOutcome::NeedsMoreBits;
            };
            let Some(&b1) = bits.get(pos + 1) else {
                return RunOutcome::NeedsMoreBits;
            };
            match (b0, b1) {
                (false, b) => {
                    tape.emit(b);
                    pos += 2;
                }
                (true, false) => {
                    pos += 2;
                    if pos != bits.len() {
                        return RunOutcome::HaltedEarly { consumed: pos };
                    }
                    return RunOutcome::Halted {
                        output: tape.output().expect("tape sized to the program"),
                        steps,
                    };
                }
                (true, true) => {
                    let Some(&b2) = bits.get(pos + 2) else {
                        return RunOutcome::NeedsMoreBits;
                    };
                    if !b2 {
                        let Some((k, next)) = read_gamma(bits, pos + 3) else {
                            return RunOutcome::NeedsMoreBits;
                        };
                        pos = next;
                        steps = steps.saturating_add(k);
                        if steps > self.step_budget {
                            return RunOutcome::BudgetExhausted;
                        }
                        if !tape.copy_tail(k) {
                            return RunOutcome::Diverged;
                        }
                        continue;
                    }
                    let Some(&b3) = bits.get(pos + 3) else {
                        return RunOutcome::NeedsMoreBits;
                    };
                    if !b3 {
                        pos += 4;
                        steps = steps.saturating_add(tape.len);
                        if steps > self.step_budget {
                            return RunOutcome::BudgetExhausted;
                        }
                        tape.double();
                    } else {
                        let Some((n, next)) = read_gamma(bits, pos + 4) else {
                            return RunOutcome::NeedsMoreBits;
                        };
                        pos = next;
                        steps = steps.saturating_add(n);
                        if steps > self.step_budget {
                            return RunOutcome::BudgetExhausted;
                        }
                        tape.run(n);
                    }
                }
            }
        }
    }

    /// Enumerates every halting program of length at most `max_program`.
    pub fn enumerate(&self) -> Enumeration {
        let mut found = Vec::new();
        let mut shortest_exhausted = None;
        let mut walker = Walker {
            machine: self,
            found: &mut found,
            shortest_exhausted: &mut shortest_exhausted,
        };
        walker.descend(0, 0, Tape::new(self.max_output), 0);

        found.sort_by_key(|p: &HaltingProgram| (p.len, p.bits));
        let mut cost = 0u64;
        let mut cost_through = vec![0u64; self.max_program + 1];
        let mut idx = 0;
        for (len, slot) in cost_through.iter_mut().enumerate() {
            while idx < found.len() && found[idx].len as usize == len {
                cost += found[idx].steps;
                found[idx].discovered_at = cost;
                idx += 1;
            }
            *slot = cost;
        }
        let mut first_by_code = HashMap::new();
        for p in &found {
            if let Some(code) = p.output_code {
                first_by_code.entry(code).or_insert((p.len, p.discovered_at));
            }
        }
        Enumeration {
            machine: *self,
            programs: found,
            shortest_exhausted,
            cost_through,
            first_by_code,
        }
    }
}

struct Walker<'a> {
    machine: &'a ToyPrefixMachine,
    found: &'a mut Vec<HaltingProgram>,
    shortest_exhausted: &'a mut Option<usize>,
}

impl Walker<'_> {
    fn exhausted(&mut self, len: usize) {
        let e = self.shortest_exhausted.get_or_insert(len);
        *e = (*e).min(len);
    }

    /// Explores every continuation of a partial program at an instruction boundary.
    fn descend(&mut self, bits: u64, len: usize, tape: Tape, steps: u64) {
        let m = self.machine;
        let room = m.max_program.saturating_sub(len);
        if room < HALT_LEN {
            return;
        }
        let steps = steps + 1;
        if steps > m.step_budget {
            self.exhausted(len);
            return;
        }

        // emit 0 / emit 1
        for b in [false, true] {
            let mut t = tape.clone();
            t.emit(b);
            self.descend(bits << 2 | b as u64, len + 2, t, steps);
        }

        // halt
        self.found.push(HaltingProgram {
            bits: bits << 2 | 0b10,
            len: (len + 2) as u8,
            output_code: tape
                .output()
                .and_then(|w| w.code())
                .map(|c| c as u32),
            steps,
            discovered_at: 0,
        });

        // copy last k: 3 opcode bits, gamma argument, and room for a halt afterwards
        let mut k = 1u64;
        while len + 3 + gamma_len(k) + HALT_LEN <= m.max_program {
            if k <= tape.len {
                let cost = steps + k;
                if cost > m.step_budget {
                    self.exhausted(len + 3 + gamma_len(k));
                } else {
                    let mut t = tape.clone();
                    t.copy_tail(k);
                                        let glen = gamma_len(k);
                    self.descend(
                        (bits << 3 | 0b110) << glen | k,
                        len + 3 + glen,
                        t,
                        cost,
                    );
                }
            }
            k += 1;
        }

        // double
        if len + 4 + HALT_LEN <= m.max_program {
            let cost = steps + tape.len;
            if cost > m.step_budget {
                self.exhausted(len + 4);
            } else {
                let mut t = tape.clone();
                t.double();
                self.descend(bits << 4 | 0b1110, len + 4, t, cost);
            }
        }

        // run n
        let mut n = 1u64;
        while len + 4 + gamma_len(n) + HALT_LEN <= m.max_program {
            let cost = steps + n;
            let glen = gamma_len(n);
            if cost > m.step_budget {
                self.exhausted(len + 4 + glen);
            } else {
                let mut t = tape.clone();
                t.run(n);
                self.descend((bits << 4 | 0b1111) << glen | n, len + 4 + glen, t, cost);
            }
            n += 1;
        }
    }
}

/// Exact-or-bounded complexity of one word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KValue {
    pub value: u64,
    /// True when every shorter program was run to completion within the budget.
    pub exact: bool,
}

impl Enumeration {
    /// Exact `K(σ)` relative to the machine, with `budget` total dovetailer steps
    /// (`None` runs the whole enumeration).
    pub fn exact_k(&self, word: &BitWord, budget: Option<u64>) -> Result<KValue> {
        let m = &self.machine;
        if word.len() > m.max_output {
            return Err(Error::LengthExceeded {
                len: word.len(),
                max: m.max_output,
            });
        }
        let code = word.code().expect("short word") as u32;
        let limit = budget.unwrap_or(u64::MAX);
        let literal = 2 * word.len() as u64 + HALT_LEN as u64;
        // Discovery order is by length, so the first program found is also the shortest.
        let found = self
            .first_by_code
            .get(&code)
            .filter(|(_, at)| *at <= limit)
            .map(|(len, _)| *len as u64);
        let value = found.map_or(literal, |v| v.min(literal));

        // Every program shorter than `value` must have been enumerated and finished.
        let shorter = value.saturating_sub(1) as usize;
        let enumerated = shorter <= m.max_program;
        let finished = enumerated && self.cost_through[shorter.min(m.max_program)] <= limit;
        let no_exhausted = self
            .shortest_exhausted
            .is_none_or(|e| e as u64 >= value);
        Ok(KValue {
            value,
            exact: finished && no_exhausted,
        })
    }

    /// Length and discovery cost of the shortest program printing `word`.
    pub fn first_discovery(&self, word: &BitWord) -> Option<(u8, u64)> {
        let code = u32::try_from(word.code()?).ok()?;
        self.first_by_code.get(&code).copied()
    }

    /// Σ 2^{-|p|} over the enumerated halting programs, as a numerator over `2^max_program`.
    pub fn kraft_numerator(&self) -> u128 {
        self.programs
            .iter()
            .map(|p| 1u128 << (self.machine.max_program - p.len as usize))
            .sum()
    }

    pub fn kraft_holds(&self) -> bool {
        self.kraft_numerator() <= 1u128 << self.machine.max_program
    }

    /// Kraft sums after each length level is added.
    pub fn kraft_by_level(&self) -> Vec<u128> {
        let mut acc = 0u128;
        (0..=self.machine.max_program)
            .map(|len| {
                acc += self
                    .programs
                    .iter()
                    .filter(|p| p.len as usize == len)
                    .map(|_| 1u128 << (self.machine.max_program - len))
                    .sum::<u128>();
                acc
            })
            .collect()
    }

    /// Checks that no halting program is a proper prefix of another.
    pub fn is_prefix_free(&self) -> bool {
        let mut words: Vec<BitWord> = self.programs.iter().map(|p| p.program()).collect();
        words.sort();
        // In lexicographic order an extension of `p` sorts directly after `p`
        // or after another extension of `p`.
        words.windows(2).all(|w| {
            let (a, b) = (&w[0], &w[1]);
            !(a.len() < b.len() && b.as_slice()[..a.len()] == *a.as_slice())
        })
    }

    /// `max_{|σ| ≤ max_len} (K(σ) − 2|σ|)`.
    pub fn machine_constant(&self, max_len: usize) -> i64 {
        let mut best = i64::MIN;
        for len in 0..=max_len.min(self.machine.max_output) {
            for v in 0u64..(1 << len) {
                let w: BitWord = (0..len).rev().map(|i| v >> i & 1 == 1).collect();
                let k = self.exact_k(&w, None).expect("length checked").value as i64;
                best = best.max(k - 2 * len as i64);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::asm::{assemble, literal, Op};
    use super::*;

    fn small() -> Enumeration {
        ToyPrefixMachine::with_limits(8, 12).enumerate()
    }

    #[test]
    fn interpreter_runs_each_instruction() {
        let m = ToyPrefixMachine::default();
        let prog = assemble(&[Op::Emit(true), Op::Emit(false), Op::Double, Op::Run(3), Op::Halt]);
        match m.run(&prog) {
            RunOutcome::Halted { output, .. } => assert_eq!(output.to_string(), "1010000"),
            other => panic!("{other:?}"),
        }
        let prog = assemble(&[Op::Emit(true), Op::Emit(true), Op::Emit(false), Op::Copy(2), Op::Halt]);
        match m.run(&prog) {
            RunOutcome::Halted { output, .. } => assert_eq!(output.to_string(), "11010"),
            other => panic!("{other:?}"),
        }
        let prog = assemble(&[Op::Run(4), Op::Halt]);
        match m.run(&prog) {
            RunOutcome::Halted { output, .. } => assert_eq!(output.to_string(), "0000"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interpreter_edge_cases() {
        let m = ToyPrefixMachine::default();
        assert_eq!(m.run(&assemble(&[Op::Copy(1), Op::Halt])), RunOutcome::Diverged);
        assert_eq!(m.run(&"0".parse().unwrap()), RunOutcome::NeedsMoreBits);
        assert_eq!(
            m.run(&"1000".parse().unwrap()),
            RunOutcome::HaltedEarly { consumed: 2 }
        );
        let tight = ToyPrefixMachine {
            step_budget: 10,
            ..Default::default()
        };
        assert_eq!(tight.run(&assemble(&[Op::Run(20), Op::Halt])), RunOutcome::BudgetExhausted);
    }

    #[test]
    fn gamma_round_trip() {
        for n in 1..300u64 {
            let mut bits = Vec::new();
            push_gamma(&mut bits, n);
            assert_eq!(bits.len(), gamma_len(n));
            assert_eq!(read_gamma(&bits, 0), Some((n, bits.len())));
        }
    }

    #[test]
    fn enumeration_agrees_with_interpreter() {
        let e = small();
        let m = e.machine;
        for p in e.programs.iter().step_by(37) {
            match m.run(&p.program()) {
                RunOutcome::Halted { output, steps } => {
                    assert_eq!(steps, p.steps);
                    if output.len() <= m.max_output {
                        assert_eq!(p.output_code, output.code().map(|c| c as u32));
                    }
                }
                other => panic!("{} -> {other:?}", p.program()),
            }
        }
    }

    #[test]
    fn enumeration_is_complete_at_small_length() {
        // Brute force: run every bit string up to length 10 through the interpreter.
        let m = ToyPrefixMachine::with_limits(8, 10);
        let e = m.enumerate();
        let mut brute = 0usize;
        for len in 1..=10usize {
            for v in 0u64..(1 << len) {
                let w: BitWord = (0..len).rev().map(|i| v >> i & 1 == 1).collect();
                if matches!(m.run(&w), RunOutcome::Halted { .. }) {
                    brute += 1;
                }
            }
        }
        assert_eq!(brute, e.programs.len());
    }

    #[test]
    fn empty_word_golden() {
        let e = small();
        // Frozen from full enumeration up to 12 bits: the bare halt instruction.
        assert_eq!(e.exact_k(&BitWord::new(), None).unwrap(), KValue { value: 2, exact: true });
    }

    #[test]
    fn kraft_and_prefix_freeness() {
        let e = small();
        assert!(e.kraft_holds());
        assert!(e.kraft_by_level().windows(2).all(|w| w[0] <= w[1]));
        assert!(e.is_prefix_free());
    }

    #[test]
    fn literal_program_bounds_k() {
        let e = small();
        for v in 0u64..32 {
            let w: BitWord = (0..5).rev().map(|i| v >> i & 1 == 1).collect();
            let k = e.exact_k(&w, None).unwrap();
            assert!(k.value <= literal(&w).len() as u64);
        }
    }

    #[test]
    fn larger_budget_never_increases() {
        let e = small();
        let words: Vec<BitWord> = (0u64..64)
            .map(|v| (0..6).rev().map(|i| v >> i & 1 == 1).collect())
            .collect();
        for w in &words {
            let mut prev = u64::MAX;
            for budget in [0, 10, 100, 1_000, 10_000, 100_000] {
                let k = e.exact_k(w, Some(budget)).unwrap().value;
                assert!(k <= prev);
                prev = k;
            }
        }
    }

    #[test]
    fn length_limit_enforced() {
        let e = small();
        assert_eq!(
            e.exact_k(&BitWord::zeros(9), None),
            Err(Error::LengthExceeded { len: 9, max: 8 })
        );
    }
}

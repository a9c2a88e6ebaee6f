//! The deficiency-switching transducer.
//!
//! The oracle is `A = A0 ⊕ A1`. At every stage the transducer either emits the
//! next bit of its current track or, if that track looks compressible at the
//! current stage, raises the track's deficiency and switches to the other one.
//! Output continues at the same position from the new track.

use serde::Serialize;

use super::monitor::QueryMonitor;
use crate::bits::{join2, BitWord, Source};
use crate::complexity::{ComplexityEstimator, PrefixScanner};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SwitchEvent {
    /// The stage `s + 1` at which the switch happened.
    pub stage: u64,
    pub from_track: u8,
    /// The prefix length whose staged estimate fell below `n − c`.
    pub trigger_n: u64,
    /// The abandoned track's raised deficiency.
    pub deficiency: u64,
    pub output_len: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransduceReport {
    #[serde(serialize_with = "as_bit_string")]
    pub output: BitWord,
    pub switches: Vec<SwitchEvent>,
    pub final_track: u8,
    pub deficiencies: [u64; 2],
    pub stages: u64,
    /// Highest oracle index queried, if any.
    pub query_high_water: Option<u64>,
    pub queries: u64,
    /// `(bits emitted, high-water mark)` right after every emitted bit.
    #[serde(skip)]
    pub use_trace: Vec<(u64, Option<u64>)>,
}

fn as_bit_string<S: serde::Serializer>(w: &BitWord, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&w.to_string())
}

impl TransduceReport {
    /// Whether the high-water mark stayed below `2n` after each of the `n` emitted bits.
    pub fn use_within_bound(&self) -> bool {
        self.use_trace
            .iter()
            .all(|&(n, hw)| hw.is_none_or(|h| h < 2 * n))
    }

    /// Output bits after the last switch.
    pub fn tail_after_last_switch(&self) -> (u64, BitWord) {
        let start = self.switches.last().map_or(0, |s| s.output_len);
        let bits: BitWord = self.output.iter().skip(start as usize).collect();
        (start, bits)
    }
}

struct Track<'a> {
    scanner: Box<dyn PrefixScanner + 'a>,
    deficiency: u64,
}

/// Runs `stages` stages of the transducer on `A0 ⊕ A1`.
pub fn transduce(a0: Source, a1: Source, stages: u64, est: &dyn ComplexityEstimator) -> TransduceReport {
    let mut oracle = QueryMonitor::new(join2(a0, a1));
    let mut tracks = [
        Track {
            scanner: est.scanner(),
            deficiency: 0,
        },
        Track {
            scanner: est.scanner(),
            deficiency: 0,
        },
    ];
    let mut current = 0usize;
    let mut output = BitWord::new();
    let mut switches = Vec::new();
    let mut use_trace = Vec::new();

    for s in 0..stages {
        let stage = s + 1;
        let out = output.len() as u64;
        // The scan covers n ≤ out + 1 ≤ s + 1, so it reads A_i below out + 1 only.
        let track = &mut tracks[current];
        while (track.scanner.len() as u64) < out + 1 {
            let j = track.scanner.len() as u64;
            track.scanner.push(oracle.query(2 * j + current as u64));
        }
        let mut worst: Option<(u64, u64)> = None;
        for n in 1..=out + 1 {
            let k = track.scanner.staged(n as usize, stage);
            let gap = n.saturating_sub(k);
            if k < n.saturating_sub(track.deficiency) && worst.is_none_or(|(_, g)| gap > g) {
                worst = Some((n, gap));
            }
        }
        match worst {
            Some((n, gap)) => {
                track.deficiency = track.deficiency.max(gap);
                switches.push(SwitchEvent {
                    stage,
                    from_track: current as u8,
                    trigger_n: n,
                    deficiency: track.deficiency,
                    output_len: out,
                });
                current = 1 - current;
            }
            None => {
                output.push(oracle.query(2 * out + current as u64));
                use_trace.push((out + 1, oracle.high_water()));
            }
        }
    }

    TransduceReport {
        output,
        switches,
        final_track: current as u8,
        deficiencies: [tracks[0].deficiency, tracks[1].deficiency],
        stages,
        query_high_water: oracle.high_water(),
        queries: oracle.queries(),
        use_trace,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bits::{Constant, Pseudorandom};
    use crate::complexity::{CeilingEstimator, CompressorEstimator};

    #[test]
    fn ceiling_estimator_never_switches() {
        let a0: Source = Arc::new(Pseudorandom::new(1));
        let a1: Source = Arc::new(Pseudorandom::new(2));
        let r = transduce(a0.clone(), a1, 500, &CeilingEstimator::default());
        assert!(r.switches.is_empty());
        assert_eq!(r.output, a0.prefix(500));
        assert!(r.use_within_bound());
    }

    #[test]
    fn zeros_then_random_switches_once() {
        let a1: Source = Arc::new(Pseudorandom::new(7));
        let r = transduce(Arc::new(Constant(false)), a1.clone(), 1024, &CompressorEstimator);
        assert_eq!(r.final_track, 1);
        assert_eq!(r.switches.len(), 1);
        let (start, tail) = r.tail_after_last_switch();
        let expected: BitWord = a1.prefix(r.output.len() as u64).iter().skip(start as usize).collect();
        assert_eq!(tail, expected);
        assert!(r.use_within_bound());
        assert_eq!(r.output.len() as u64 + r.switches.len() as u64, r.stages);
    }

    #[test]
    fn zero_stages_is_empty() {
        let r = transduce(Arc::new(Constant(false)), Arc::new(Constant(true)), 0, &CompressorEstimator);
        assert!(r.output.is_empty() && r.switches.is_empty());
        assert_eq!(r.query_high_water, None);
    }

    #[test]
    fn deterministic_and_monotone() {
        let run = || {
            transduce(
                Arc::new(Pseudorandom::new(3)),
                Arc::new(crate::bits::Periodic::new("0010".parse().unwrap()).unwrap()),
                700,
                &CompressorEstimator,
            )
        };
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        for t in 0..2u8 {
            let ds: Vec<u64> = a.switches.iter().filter(|s| s.from_track == t).map(|s| s.deficiency).collect();
            assert!(ds.windows(2).all(|w| w[0] <= w[1]));
        }
        assert!(a.switches.windows(2).all(|w| w[0].stage < w[1].stage));
        assert!(a.use_within_bound());
    }
}

//! Sequences assembled from source segments and zero segments.

use super::recurrence::{ell_boundaries, UseBound};
use super::schedule::{KFilter, Schedule, Segments};
use crate::bits::{join3, BitSource, BitWord, GuideSet, Source};
use crate::error::Result;
use crate::families::{IndexFamily, IndexSet, ScanOutcome, ScanReport};

/// `B(n) = src(n − s_{k_n}) · 1_G(k_n)`, and `0` below the first admissible boundary.
#[derive(Debug, Clone)]
pub struct SegmentSource {
    src: Source,
    segments: Segments,
    guide: GuideSet,
    label: String,
}

impl SegmentSource {
    pub fn new(src: Source, segments: Segments, guide: GuideSet, label: impl Into<String>) -> Self {
        SegmentSource {
            src,
            segments,
            guide,
            label: label.into(),
        }
    }

    pub fn segments(&self) -> &Segments {
        &self.segments
    }

    pub fn guide(&self) -> &GuideSet {
        &self.guide
    }

    /// Whether segment `k` copies the source (`true`) or is all zero.
    pub fn is_source_segment(&self, k: u64) -> bool {
        self.guide.contains(k)
    }

    /// Whether `n` lies in a zero segment whose preceding admissible segment is also zero.
    /// Positions below the first boundary count as zero.
    pub fn zero_after_zero(&self, n: u64) -> bool {
        let Some((k, s)) = self.segments.locate(n) else {
            return false;
        };
        if self.guide.contains(k) {
            return false;
        }
        match s.checked_sub(1).and_then(|p| self.segments.locate(p)) {
            Some((prev, _)) => !self.guide.contains(prev),
            None => true,
        }
    }
}

impl BitSource for SegmentSource {
    fn bit(&self, n: u64) -> bool {
        match self.segments.locate(n) {
            Some((k, s)) if self.guide.contains(k) => self.src.bit(n - s),
            _ => false,
        }
    }

    fn describe(&self) -> String {
        format!(
            "{}(source={}; {}; residue={} modulus={}; guide={})",
            self.label,
            self.src.describe(),
            self.segments.schedule(),
            self.segments.filter().residue,
            self.segments.filter().modulus,
            self.guide.describe()
        )
    }

    fn use_bound(&self, n: u64) -> u64 {
        match self.segments.locate(n) {
            Some((_, s)) => n - s + 1,
            None => 0,
        }
    }

    fn prefix(&self, n: u64) -> BitWord {
        let adm = self.segments.admissible();
        let first = adm.first().map_or(n, |&(_, s)| s.min(n));
        let mut out = BitWord::zeros(first as usize);
        for (i, &(k, s)) in adm.iter().enumerate() {
            if s >= n {
                break;
            }
            let end = adm.get(i + 1).map_or(n, |&(_, t)| t.min(n));
            if self.guide.contains(k) {
                out = out.concat(&self.src.prefix(end - s));
            } else {
                out = out.concat(&BitWord::zeros((end - s) as usize));
            }
        }
        out
    }
}

/// `B(n) = R(n − s_{k_n})` when `k_n` is even, else `0`.
pub fn build_theorem4(r: Source, schedule: Schedule) -> SegmentSource {
    SegmentSource::new(
        r,
        Segments::new(schedule, KFilter::ALL),
        GuideSet::Evens,
        "segments",
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoubleSegmentMode {
    /// Source segments where `k_n ∈ X0 ⊕ X0`.
    SiZero,
    /// Source segments where `k_n ∉ X0 ⊕ X0`.
    IsRandom,
}

/// Odd-indexed segments guided by `X = X0 ⊕ X0` (or its complement).
pub fn build_double_segment(
    src: Source,
    x0: GuideSet,
    schedule: Schedule,
    mode: DoubleSegmentMode,
) -> SegmentSource {
    let x = GuideSet::double(x0);
    let (guide, label) = match mode {
        DoubleSegmentMode::SiZero => (x, "double-segment-si-zero"),
        DoubleSegmentMode::IsRandom => (GuideSet::complement(x), "double-segment-is-random"),
    };
    SegmentSource::new(src, Segments::new(schedule, KFilter::ODD), guide, label)
}

/// `X(n) = R(n − ℓ_{k_n}) · 1_S(k_n)` with `S = S0 ⊕ S0 ⊕ S0` and `k_n ≡ 2 (mod 3)`.
///
/// Boundaries are computed until they pass `horizon`; bits up to the horizon are exact.
pub fn build_theorem12_x(r: Source, s0: GuideSet, f: &UseBound, horizon: u64) -> Result<SegmentSource> {
    let ell = ell_boundaries(f, horizon)?;
    let schedule = Schedule::Explicit(ell.into());
    let guide = join3(s0.clone(), s0.clone(), s0);
    Ok(SegmentSource::new(
        r,
        Segments::new(schedule, KFilter::TWO_MOD_THREE),
        guide,
        format!("use-bounded(f={f})"),
    ))
}

/// `{s_k : k ≡ residue (mod modulus)}` with its first `m` elements dropped.
///
/// `R_m` is `endpoint_set(sched, KFilter::ODD, m)` and `Z_m` is `endpoint_set(sched, even, m)`.
pub fn endpoint_set(schedule: Schedule, filter: KFilter, m: u64) -> IndexSet {
    let base = IndexSet::boundaries(schedule, filter);
    base.tail(m, u64::MAX).unwrap_or(base)
}

pub const EVEN: KFilter = KFilter { residue: 0, modulus: 2 };

/// `{ℓ_k : k ∈ S}` for the `S` guiding a use-bounded source, up to `horizon`.
pub fn ell_endpoints(x: &SegmentSource, horizon: u64) -> Result<IndexSet> {
    let elements: Vec<u64> = x
        .segments()
        .schedule()
        .boundaries()
        .into_iter()
        .enumerate()
        .filter(|&(k, l)| l <= horizon && x.guide().contains(k as u64))
        .map(|(_, l)| l)
        .collect();
    IndexSet::explicit(elements, format!("ell-endpoints({})", x.guide().describe()))
}

/// For each member, the least element below the horizon lying in a zero segment that
/// follows a zero segment (a witness), or exhaustion.
pub fn double_zero_scan(b: &SegmentSource, fam: &IndexFamily, horizon: u64) -> Vec<ScanReport> {
    fam.members
        .iter()
        .map(|m| {
            let mut seen = 0;
            let mut outcome = ScanOutcome::Exhausted { seen: 0 };
            for x in m.iter().take_while(|&x| x <= horizon) {
                if b.zero_after_zero(x) {
                    outcome = ScanOutcome::Witness {
                        element: x,
                        position: seen,
                    };
                    break;
                }
                seen += 1;
                outcome = ScanOutcome::Exhausted { seen };
            }
            ScanReport {
                member: m.to_string(),
                outcome,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bits::{prefix, slice, Pseudorandom};

    fn r() -> Source {
        Arc::new(Pseudorandom::new(7))
    }

    #[test]
    fn quadratic_segments() {
        let b = build_theorem4(r(), Schedule::default());
        assert!(slice(&b, 2, 16).unwrap().iter().all(|x| !x));
        let rr = r();
        for n in [16, 17, 100, 255, 256, 300, 400, 500, 510, 511] {
            assert_eq!(b.bit(n), rr.bit(n - 16), "n={n}");
        }
        assert!(!b.bit(0));
        assert_eq!(b.bit(1), rr.bit(0));
    }

    #[test]
    fn segment_bits_exhaustive_to_8192() {
        let b = build_theorem4(r(), Schedule::default());
        let rr = r();
        let word = b.prefix(8192);
        for n in 0..8192u64 {
            let expected = match n {
                0 => false,
                1 => rr.bit(0),
                2..=15 => false,
                16..=511 => rr.bit(n - 16),
                _ => false,
            };
            assert_eq!(word.get(n as usize), Some(expected), "n={n}");
            assert_eq!(b.bit(n), expected);
        }
    }

    #[test]
    fn prefix_matches_bitwise_for_all_builders() {
        let builders: Vec<SegmentSource> = vec![
            build_theorem4(r(), Schedule::Triangular),
            build_double_segment(r(), GuideSet::Evens, Schedule::Triangular, DoubleSegmentMode::SiZero),
            build_double_segment(r(), GuideSet::Odds, Schedule::default(), DoubleSegmentMode::IsRandom),
            build_theorem12_x(r(), GuideSet::All, &UseBound::Identity, 1 << 16).unwrap(),
        ];
        for b in builders {
            let fast = b.prefix(5000);
            let slow = prefix(&NoFastPrefix(&b), 5000);
            assert_eq!(fast, slow, "{}", b.describe());
        }
    }

    #[derive(Debug)]
    struct NoFastPrefix<'a>(&'a SegmentSource);

    impl BitSource for NoFastPrefix<'_> {
        fn bit(&self, n: u64) -> bool {
            self.0.bit(n)
        }
        fn describe(&self) -> String {
            self.0.describe()
        }
    }

    #[test]
    fn double_segment_trivial_guides() {
        let z = build_double_segment(r(), GuideSet::Empty, Schedule::default(), DoubleSegmentMode::SiZero);
        assert!(z.prefix(4096).iter().all(|x| !x));
        let full = build_double_segment(r(), GuideSet::All, Schedule::default(), DoubleSegmentMode::SiZero);
        let rr = r();
        for n in [2u64, 3, 100, 511, 512, 4000] {
            let s = if n < 512 { 2 } else { 512 };
            assert_eq!(full.bit(n), rr.bit(n - s));
        }
    }

    #[test]
    fn double_segment_types_for_evens() {
        let b = build_double_segment(r(), GuideSet::Evens, Schedule::default(), DoubleSegmentMode::SiZero);
        // k odd: ⌊k/2⌋ = 0,1,2,…,7 and evens alternate starting with membership.
        let expected = [true, false, true, false, true, false, true, false];
        for (i, k) in (1..=15).step_by(2).enumerate() {
            assert_eq!(b.is_source_segment(k), expected[i], "k={k}");
        }
        let c = build_double_segment(r(), GuideSet::Evens, Schedule::default(), DoubleSegmentMode::IsRandom);
        for k in (1..=15).step_by(2) {
            assert_ne!(b.is_source_segment(k), c.is_source_segment(k));
        }
    }

    #[test]
    fn use_bounded_examples() {
        let z = build_theorem12_x(r(), GuideSet::Empty, &UseBound::Identity, 1 << 16).unwrap();
        assert!(z.prefix(70_000).iter().all(|x| !x));
        let x = build_theorem12_x(r(), GuideSet::All, &UseBound::Identity, 1 << 16).unwrap();
        let rr = r();
        for n in [512u64, 513, 1000, 4096, 9999, 20_000, 40_000, 65_535, 65_536, 70_000] {
            assert_eq!(x.bit(n), rr.bit(n - 512), "n={n}");
        }
        assert!(x.prefix(512).iter().all(|b| !b));
        // S = S0 ⊕ S0 ⊕ S0 with S0 = evens: k ∈ S iff ⌊k/3⌋ is even.
        let e = build_theorem12_x(r(), GuideSet::Evens, &UseBound::Identity, 1 << 16).unwrap();
        for (k, expect) in [(2, true), (5, false), (8, true), (11, false)] {
            assert_eq!(e.is_source_segment(k), expect, "k={k}");
        }
    }

    #[test]
    fn endpoint_sets_by_hand() {
        let s = Schedule::default();
        let r0 = endpoint_set(s.clone(), KFilter::ODD, 0);
        assert_eq!(r0.elements_up_to(1 << 40), vec![2, 512, 1 << 25]);
        let z1 = endpoint_set(s.clone(), EVEN, 1);
        assert_eq!(z1.elements_up_to(1 << 40), vec![16, 65536, 1 << 36]);
        for m in 0..3 {
            assert_eq!(
                r0.tail(m, u64::MAX).unwrap().elements_up_to(1 << 40),
                endpoint_set(s.clone(), KFilter::ODD, m).elements_up_to(1 << 40)
            );
        }
    }

    #[test]
    fn double_zero_scan_finds_witnesses() {
        // Triangular schedule: odd boundaries 4, 128, 65536, 2^22.
        // X0 = {0}: segment 1 is a source segment, segments 3 and 5 are zero.
        let x0 = GuideSet::Finite(vec![0].into());
        let b = build_double_segment(r(), x0, Schedule::Triangular, DoubleSegmentMode::SiZero);
        let fam = IndexFamily::new(
            "aps",
            vec![IndexSet::progression(0, 7), IndexSet::progression(3, 1000), IndexSet::pow2(0, 2)],
        )
        .unwrap();
        for rep in double_zero_scan(&b, &fam, 1 << 20) {
            match rep.outcome {
                ScanOutcome::Witness { element, .. } => assert!(element >= 65536, "{rep:?}"),
                other => panic!("{other:?}"),
            }
        }
        let sparse = IndexFamily::new("s", vec![IndexSet::explicit(vec![5, 100], "s").unwrap()]).unwrap();
        assert_eq!(
            double_zero_scan(&b, &sparse, 1 << 20)[0].outcome,
            ScanOutcome::Exhausted { seen: 2 }
        );
    }
}

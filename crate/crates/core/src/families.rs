//! Index sets, finite families of them, and the operations that move between them.
//!
//! Every set is enumerated in increasing order and every enumeration is cut at an
//! explicit horizon. Running out of elements below the horizon is reported as
//! [`Lookup::Exhausted`] or [`Error::ExhaustedAtHorizon`], never silently truncated.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::bits::{GuideSet, Pseudorandom, Source};
use crate::constructions::schedule::{KFilter, Schedule, Segments};
use crate::error::{Error, Result};
use crate::kv::KvSpec;

#[derive(Debug, Clone)]
pub enum IndexKind {
    Naturals,
    Cofinite { start: u64 },
    Progression { start: u64, step: u64 },
    /// `{2^k : k ≡ residue (mod modulus)}`.
    Pow2 { residue: u64, modulus: u64 },
    /// `{s_k : k admissible}` for a segment schedule.
    Boundaries { schedule: Schedule, filter: KFilter },
    /// Strictly increasing list; nothing beyond its last element.
    Explicit { elements: Arc<[u64]>, label: String },
    /// `{code(A↾n) : n ∈ ℕ}`, the prefix set of a source.
    PrefixCodes(Source),
}

/// A strictly increasing enumeration: a base kind with its first `drop` elements removed.
#[derive(Debug, Clone)]
pub struct IndexSet {
    kind: IndexKind,
    drop: u64,
}

/// Result of asking for the next element below a horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Element(u64),
    Exhausted,
}

impl IndexSet {
    pub fn new(kind: IndexKind) -> Self {
        IndexSet { kind, drop: 0 }
    }

    pub fn naturals() -> Self {
        Self::new(IndexKind::Naturals)
    }

    pub fn cofinite(start: u64) -> Self {
        Self::new(IndexKind::Cofinite { start })
    }

    pub fn progression(start: u64, step: u64) -> Self {
        assert!(step > 0, "progression step must be positive");
        Self::new(IndexKind::Progression { start, step })
    }

    pub fn pow2(residue: u64, modulus: u64) -> Self {
        assert!(residue < modulus, "residue must be below the modulus");
        Self::new(IndexKind::Pow2 { residue, modulus })
    }

    pub fn boundaries(schedule: Schedule, filter: KFilter) -> Self {
        Self::new(IndexKind::Boundaries { schedule, filter })
    }

    /// Explicit set; rejects lists that are not strictly increasing.
    pub fn explicit(elements: Vec<u64>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if let Some(w) = elements.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Parse(format!(
                "index set `{label}` is not strictly increasing at {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self::new(IndexKind::Explicit {
            elements: elements.into(),
            label,
        }))
    }

    pub fn prefix_codes(source: Source) -> Self {
        Self::new(IndexKind::PrefixCodes(source))
    }

    /// Reads one natural per line (blank lines and `#` comments skipped).
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let mut xs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            xs.push(line.parse().map_err(|_| {
                Error::Parse(format!("{}:{}: `{line}` is not a natural", path.display(), i + 1))
            })?);
        }
        Self::explicit(xs, format!("file:{}", path.display()))
    }

    pub fn kind(&self) -> &IndexKind {
        &self.kind
    }

    pub fn dropped(&self) -> u64 {
        self.drop
    }

    /// Unbounded increasing enumeration (finite only where the kind is).
    pub fn iter(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        let base: Box<dyn Iterator<Item = u64> + '_> = match &self.kind {
            IndexKind::Naturals => Box::new(0..),
            IndexKind::Cofinite { start } => Box::new(*start..),
            IndexKind::Progression { start, step } => {
                let step = *step;
                Box::new(std::iter::successors(Some(*start), move |x| x.checked_add(step)))
            }
            IndexKind::Pow2 { residue, modulus } => Box::new(
                (*residue..64)
                    .step_by(*modulus as usize)
                    .map(|k| 1u64 << k),
            ),
            IndexKind::Boundaries { schedule, filter } => {
                let filter = *filter;
                Box::new(
                    (0..)
                        .map_while(move |k| schedule.boundary(k).map(|s| (k, s)))
                        .filter(move |&(k, _)| filter.admits(k))
                        .map(|(_, s)| s),
                )
            }
            IndexKind::Explicit { elements, .. } => Box::new(elements.iter().copied()),
            IndexKind::PrefixCodes(source) => Box::new(
                std::iter::successors(Some((0u64, 1u64)), move |&(n, code)| {
                    (n < 62).then(|| (n + 1, 2 * code + source.bit(n) as u64))
                })
                .map(|(_, code)| code),
            ),
        };
        Box::new(base.skip(self.drop as usize))
    }

    /// All elements `≤ horizon`, asserted strictly increasing.
    pub fn elements_up_to(&self, horizon: u64) -> Vec<u64> {
        let xs: Vec<u64> = self.iter().take_while(|&x| x <= horizon).collect();
        assert!(
            xs.windows(2).all(|w| w[0] < w[1]),
            "enumeration of {self} is not strictly increasing"
        );
        xs
    }

    /// Elements in `[lo, hi]`.
    pub fn elements_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        self.iter()
            .take_while(|&x| x <= hi)
            .filter(|&x| x >= lo)
            .collect()
    }

    /// Least element greater than `after` (or the first element when `after` is `None`).
    pub fn next_after(&self, after: Option<u64>, horizon: u64) -> Lookup {
        self.iter()
            .take_while(|&x| x <= horizon)
            .find(|&x| after.is_none_or(|a| x > a))
            .map_or(Lookup::Exhausted, Lookup::Element)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.iter().take_while(|&x| x <= n).any(|x| x == n)
    }

    /// `{n_k : k ≥ m}`; requires `m` elements at or below `horizon`.
    pub fn tail(&self, m: u64, horizon: u64) -> Result<IndexSet> {
        let available = self.iter().take_while(|&x| x <= horizon).take(m as usize).count();
        if (available as u64) < m {
            return Err(Error::ExhaustedAtHorizon {
                set: self.to_string(),
                horizon,
            });
        }
        Ok(IndexSet {
            kind: self.kind.clone(),
            drop: self.drop + m,
        })
    }

    /// A spec that [`from_spec`](Self::from_spec) parses back to the same set.
    ///
    /// Explicit sets list their elements; the display form shows only their label.
    pub fn to_spec(&self) -> String {
        let base = match &self.kind {
            IndexKind::Explicit { elements, .. } => {
                let xs: Vec<String> = elements.iter().map(u64::to_string).collect();
                format!("kind=explicit elements={}", xs.join(","))
            }
            IndexKind::PrefixCodes(src) => match src.describe().strip_prefix("kind=pseudorandom ") {
                Some(seed) => format!("kind=prefix-codes {seed}"),
                None => return self.to_string(),
            },
            _ => return self.to_string(),
        };
        match self.drop {
            0 => base,
            d => format!("{base} drop={d}"),
        }
    }

    /// Parses specs such as `kind=ap start=1 step=3 drop=2`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let mut kv = KvSpec::parse(spec)?;
        let kind = kv.require_str("kind")?;
        let set = match kind.as_str() {
            "naturals" => Self::naturals(),
            "cofinite" => Self::cofinite(kv.require("start")?),
            "ap" => {
                let step: u64 = kv.require("step")?;
                if step == 0 {
                    return Err(Error::Parse("progression step must be positive".into()));
                }
                Self::progression(kv.take("start")?.unwrap_or(0), step)
            }
            "pow2" => {
                let modulus: u64 = kv.take("modulus")?.unwrap_or(1);
                let residue: u64 = kv.take("residue")?.unwrap_or(0);
                if modulus == 0 || residue >= modulus {
                    return Err(Error::Parse("pow2 needs residue < modulus".into()));
                }
                Self::pow2(residue, modulus)
            }
            "boundaries" => {
                let schedule = Schedule::from_kv(&mut kv)?;
                let modulus: u64 = kv.take("modulus")?.unwrap_or(1);
                let residue: u64 = kv.take("residue")?.unwrap_or(0);
                if modulus == 0 || residue >= modulus {
                    return Err(Error::Parse("boundaries need residue < modulus".into()));
                }
                Self::boundaries(schedule, KFilter { residue, modulus })
            }
            "explicit" => {
                let list = kv.take_str("elements").unwrap_or_default();
                let xs = list
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad element `{s}`"))))
                    .collect::<Result<Vec<u64>>>()?;
                Self::explicit(xs, "explicit")?
            }
            "file" => Self::from_file(kv.require_str("path")?)?,
            "prefix-codes" => Self::prefix_codes(Arc::new(Pseudorandom::new(kv.require("seed")?))),
            other => return Err(Error::Parse(format!("unknown index set kind `{other}`"))),
        };
        let drop = kv.take("drop")?.unwrap_or(0);
        kv.finish()?;
        Ok(IndexSet { drop, ..set })
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            IndexKind::Naturals => write!(f, "kind=naturals")?,
            IndexKind::Cofinite { start } => write!(f, "kind=cofinite start={start}")?,
            IndexKind::Progression { start, step } => {
                write!(f, "kind=ap start={start} step={step}")?
            }
            IndexKind::Pow2 { residue, modulus } => {
                write!(f, "kind=pow2 residue={residue} modulus={modulus}")?
            }
            IndexKind::Boundaries { schedule, filter } => write!(
                f,
                "kind=boundaries {} residue={} modulus={}",
                schedule.to_kv(),
                filter.residue,
                filter.modulus
            )?,
            IndexKind::Explicit { label, .. } => write!(f, "{label}")?,
            IndexKind::PrefixCodes(s) => write!(f, "prefix-codes({})", s.describe())?,
        }
        if self.drop > 0 {
            write!(f, " drop={}", self.drop)?;
        }
        Ok(())
    }
}

/// A labelled finite list of index sets.
#[derive(Debug, Clone)]
pub struct IndexFamily {
    pub label: String,
    pub members: Vec<IndexSet>,
}

impl IndexFamily {
    pub fn new(label: impl Into<String>, members: Vec<IndexSet>) -> Result<Self> {
        let label = label.into();
        if members.is_empty() {
            return Err(Error::Parse(format!("family `{label}` has no members")));
        }
        Ok(IndexFamily { label, members })
    }

    /// `{[m, ∞) : m ∈ starts}`.
    pub fn cofinite_tails(starts: &[u64]) -> Result<Self> {
        Self::new(
            "cofinite-tails",
            starts.iter().map(|&m| IndexSet::cofinite(m)).collect(),
        )
    }

    /// `set` together with every tail that still has an element in `[floor, horizon]`.
    pub fn tails_of(label: impl Into<String>, set: &IndexSet, floor: u64, horizon: u64) -> Result<Self> {
        let reach = set.elements_up_to(horizon);
        let mut members = Vec::new();
        for m in 0..reach.len() as u64 {
            let t = set.tail(m, horizon)?;
            if t.next_after(floor.checked_sub(1), horizon) == Lookup::Exhausted {
                break;
            }
            members.push(t);
        }
        Self::new(label, members)
    }

    /// Union of two families' members, keeping this family's label.
    pub fn extended(&self, other: &IndexFamily) -> IndexFamily {
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        IndexFamily {
            label: format!("{}+{}", self.label, other.label),
            members,
        }
    }

    /// Reads a manifest: a `label <name>` line, then one set spec per line.
    pub fn from_manifest(text: &str) -> Result<Self> {
        let mut label = None;
        let mut members = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("label ") {
                label = Some(rest.trim().to_string());
            } else {
                members.push(IndexSet::from_spec(line)?);
            }
        }
        Self::new(
            label.ok_or_else(|| Error::Parse("family manifest lacks a label line".into()))?,
            members,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_manifest(&std::fs::read_to_string(path)?)
    }

    pub fn to_manifest(&self) -> String {
        let mut out = format!("label {}\n", self.label);
        for m in &self.members {
            out.push_str(&m.to_spec());
            out.push('\n');
        }
        out
    }
}

/// Total maps with finite preimages.
#[derive(Debug, Clone)]
pub enum FiniteToOneMap {
    Identity,
    /// `n ↦ ⌊n/d⌋`.
    Div(u64),
    /// `n ↦ n + c`.
    Shift(u64),
    /// `n ↦ ⌊k_n/2⌋`, `0` below the first admissible boundary.
    HalfSegmentIndex(Segments),
}

impl FiniteToOneMap {
    pub fn apply(&self, n: u64) -> u64 {
        match self {
            FiniteToOneMap::Identity => n,
            FiniteToOneMap::Div(d) => n / d,
            FiniteToOneMap::Shift(c) => n.saturating_add(*c),
            FiniteToOneMap::HalfSegmentIndex(seg) => seg.locate(n).map_or(0, |(k, _)| k / 2),
        }
    }

    fn describe(&self) -> String {
        match self {
            FiniteToOneMap::Identity => "id".into(),
            FiniteToOneMap::Div(d) => format!("div{d}"),
            FiniteToOneMap::Shift(c) => format!("shift{c}"),
            FiniteToOneMap::HalfSegmentIndex(seg) => format!("half-k({})", seg.schedule()),
        }
    }
}

/// `{n ≤ horizon : f(n) ∈ N}`. Fails if some value has more than `bound` preimages.
pub fn finite_to_one_preimage(
    f: &FiniteToOneMap,
    set: &IndexSet,
    horizon: u64,
    bound: usize,
) -> Result<IndexSet> {
    let values: Vec<u64> = (0..=horizon).map(|n| f.apply(n)).collect();
    let top = values.iter().copied().max().unwrap_or(0);
    let members: BTreeSet<u64> = set.elements_up_to(top).into_iter().collect();
    let mut counts: HashMap<u64, usize> = HashMap::new();
    let mut out = Vec::new();
    for (n, &v) in values.iter().enumerate() {
        let c = counts.entry(v).or_default();
        *c += 1;
        if *c > bound {
            return Err(Error::PreimageBoundExceeded { value: v, bound });
        }
        if members.contains(&v) {
            out.push(n as u64);
        }
    }
    IndexSet::explicit(out, format!("preimage({}; {set})", f.describe()))
}

/// `{f(n) : n ∈ N, n ≤ horizon}` in increasing order.
pub fn finite_to_one_image(f: &FiniteToOneMap, set: &IndexSet, horizon: u64) -> Result<IndexSet> {
    let image: BTreeSet<u64> = set
        .elements_up_to(horizon)
        .into_iter()
        .map(|n| f.apply(n))
        .collect();
    IndexSet::explicit(image.into_iter().collect(), format!("image({}; {set})", f.describe()))
}

/// Greedy increasing subsequence of `stream` in arrival order, ignoring values past `horizon`.
pub fn thin_enumeration(stream: impl IntoIterator<Item = u64>, horizon: u64) -> Result<IndexSet> {
    let mut out: Vec<u64> = Vec::new();
    for x in stream {
        if x <= horizon && out.last().is_none_or(|&l| x > l) {
            out.push(x);
        }
    }
    if out.is_empty() {
        return Err(Error::ExhaustedAtHorizon {
            set: "thinned stream".into(),
            horizon,
        });
    }
    IndexSet::explicit(out, "thinned stream")
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ScanOutcome {
    /// `element` is the least member element outside the guide; it is the `position`-th element.
    Witness { element: u64, position: u64 },
    /// The first `depth` elements all lie in the guide.
    Inconclusive { depth: u64 },
    /// Fewer than `depth` elements below the horizon, all in the guide.
    Exhausted { seen: u64 },
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ScanReport {
    pub member: String,
    #[serde(flatten)]
    pub outcome: ScanOutcome,
}

/// Looks for a finite witness against `N ⊆ S` in each member of `fam`.
pub fn immunity_scan(
    guide: &GuideSet,
    fam: &IndexFamily,
    depth: u64,
    horizon: u64,
) -> Vec<ScanReport> {
    assert!(depth >= 1, "scan depth must be positive");
    fam.members
        .iter()
        .map(|m| {
            let mut seen = 0;
            let mut outcome = None;
            for x in m.iter().take_while(|&x| x <= horizon).take(depth as usize) {
                if !guide.contains(x) {
                    outcome = Some(ScanOutcome::Witness {
                        element: x,
                        position: seen,
                    });
                    break;
                }
                seen += 1;
            }
            let outcome = outcome.unwrap_or(if seen == depth {
                ScanOutcome::Inconclusive { depth }
            } else {
                ScanOutcome::Exhausted { seen }
            });
            ScanReport {
                member: m.to_string(),
                outcome,
            }
        })
        .collect()
}

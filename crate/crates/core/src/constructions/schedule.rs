//! Segment boundary sequences and the `k_n` lookup.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kv::KvSpec;

/// Boundary sequence `s_0 < s_1 < …`. Boundaries past `u64::MAX` are reported as absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// `s_k = 2^{c·k²}`.
    Quadratic { c: u32 },
    /// `s_k = 2^{(k²+k)/2 + 1}`: more segments below a desk horizon.
    Triangular,
    /// `s_k = base^k`.
    Geometric { base: u64 },
    /// A finite list; the last segment extends forever.
    Explicit(Arc<[u64]>),
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Quadratic { c: 1 }
    }
}

fn pow2(exp: u64) -> Option<u64> {
    (exp < 64).then(|| 1u64 << exp)
}

impl Schedule {
    pub fn boundary(&self, k: u64) -> Option<u64> {
        match self {
            Schedule::Quadratic { c } => pow2((*c as u64).checked_mul(k.checked_mul(k)?)?),
            Schedule::Triangular => pow2((k.checked_mul(k)?.checked_add(k)?) / 2 + 1),
            Schedule::Geometric { base } => base.checked_pow(u32::try_from(k).ok()?),
            Schedule::Explicit(xs) => xs.get(usize::try_from(k).ok()?).copied(),
        }
    }

    /// Every boundary that fits in 64 bits.
    pub fn boundaries(&self) -> Vec<u64> {
        (0..).map_while(|k| self.boundary(k)).collect()
    }

    /// Checks strict increase and `s_{k+1} > 3·s_k` for `k ≥ 1`.
    pub fn validate(&self) -> Result<()> {
        if let Schedule::Quadratic { c: 0 } = self {
            return Err(Error::InvalidSchedule("quadratic exponent must be positive".into()));
        }
        let b = self.boundaries();
        if b.len() < 2 {
            return Err(Error::InvalidSchedule(format!("{self} has fewer than two boundaries")));
        }
        for (k, w) in b.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::InvalidSchedule(format!(
                    "{self}: s_{} = {} does not exceed s_{k} = {}",
                    k + 1,
                    w[1],
                    w[0]
                )));
            }
            if k >= 1 && (w[1] as u128) <= 3 * w[0] as u128 {
                return Err(Error::InvalidSchedule(format!(
                    "{self}: s_{} = {} is not more than three times s_{k} = {}",
                    k + 1,
                    w[1],
                    w[0]
                )));
            }
        }
        Ok(())
    }

    /// Parses `kind=quadratic c=1`, `kind=triangular`, `kind=geometric base=4` or
    /// `kind=explicit boundaries=1,2,16`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let mut kv = KvSpec::parse(spec)?;
        let kind = kv.require_str("kind")?;
        let sched = Self::with_params(&kind, &mut kv)?;
        kv.finish()?;
        Ok(sched)
    }

    /// Reads a schedule embedded in a larger spec as `schedule=<kind>` plus its parameters.
    pub fn from_kv(kv: &mut KvSpec) -> Result<Self> {
        let kind = kv.take_str("schedule").unwrap_or_else(|| "quadratic".into());
        Self::with_params(&kind, kv)
    }

    /// The embedded form read by [`from_kv`](Self::from_kv).
    pub fn to_kv(&self) -> String {
        let own = self.to_string();
        format!("schedule={}", own.strip_prefix("kind=").unwrap_or(&own))
    }

    fn with_params(kind: &str, kv: &mut KvSpec) -> Result<Self> {
        let sched = match kind {
            "quadratic" => Schedule::Quadratic {
                c: kv.take("c")?.unwrap_or(1),
            },
            "triangular" => Schedule::Triangular,
            "geometric" => Schedule::Geometric {
                base: kv.require("base")?,
            },
            "explicit" => {
                let list = kv.require_str("boundaries")?;
                let xs = list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<u64>()
                            .map_err(|_| Error::Parse(format!("bad boundary `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Schedule::Explicit(xs.into())
            }
            other => return Err(Error::Parse(format!("unknown schedule kind `{other}`"))),
        };
        sched.validate()?;
        Ok(sched)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Quadratic { c } => write!(f, "kind=quadratic c={c}"),
            Schedule::Triangular => write!(f, "kind=triangular"),
            Schedule::Geometric { base } => write!(f, "kind=geometric base={base}"),
            Schedule::Explicit(xs) => {
                let items: Vec<String> = xs.iter().map(u64::to_string).collect();
                write!(f, "kind=explicit boundaries={}", items.join(","))
            }
        }
    }
}

/// Which segment indices `k` count when locating `k_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KFilter {
    pub residue: u64,
    pub modulus: u64,
}

impl KFilter {
    pub const ALL: KFilter = KFilter { residue: 0, modulus: 1 };
    pub const ODD: KFilter = KFilter { residue: 1, modulus: 2 };
    pub const TWO_MOD_THREE: KFilter = KFilter { residue: 2, modulus: 3 };

    pub fn admits(self, k: u64) -> bool {
        k % self.modulus == self.residue
    }
}

/// Boundaries cached for repeated `k_n` lookups.
#[derive(Debug, Clone)]
pub struct Segments {
    schedule: Schedule,
    filter: KFilter,
    /// `(k, s_k)` for admissible `k`, increasing.
    admissible: Vec<(u64, u64)>,
}

impl Segments {
    pub fn new(schedule: Schedule, filter: KFilter) -> Self {
        let admissible = schedule
            .boundaries()
            .into_iter()
            .enumerate()
            .map(|(k, s)| (k as u64, s))
            .filter(|&(k, _)| filter.admits(k))
            .collect();
        Segments {
            schedule,
            filter,
            admissible,
        }
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn filter(&self) -> KFilter {
        self.filter
    }

    /// `(k, s_k)` for every admissible `k` whose boundary fits in 64 bits.
    pub fn admissible(&self) -> &[(u64, u64)] {
        &self.admissible
    }

    /// `(k_n, s_{k_n})`, or `None` below the first admissible boundary.
    pub fn locate(&self, n: u64) -> Option<(u64, u64)> {
        let idx = self.admissible.partition_point(|&(_, s)| s <= n);
        idx.checked_sub(1).map(|i| self.admissible[i])
    }
}

/// `k_n = max{k admissible : s_k ≤ n}`.
pub fn k_of_n(schedule: &Schedule, n: u64, filter: KFilter) -> Result<u64> {
    let mut best = None;
    for k in 0.. {
        match schedule.boundary(k) {
            Some(s) if s <= n => {
                if filter.admits(k) {
                    best = Some(k);
                }
            }
            _ => break,
        }
    }
    best.ok_or(Error::BelowFirstBoundary { n })
}

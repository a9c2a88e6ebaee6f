//! Finite-horizon dimension functionals.
//!
//! All four values are min/max combinations of the same table of ratios
//! `K̂(A↾n)/n`, so the comparisons between them are exact. The tails `[m, ∞)`
//! range over the window's `m_grid`, and every family member must have an
//! element in `[floor, horizon]`, where `floor = max(n_min, max m_grid)`. That
//! requirement is what makes the chain
//! `dim_H ≤ dim_is, dim_si ≤ dim_p` hold exactly whenever the family
//! contains the tails `[m, ∞)` for `m` in the grid.

use serde::Serialize;

use crate::bits::BitSource;
use crate::complexity::{ComplexityEstimator, Ratio};
use crate::error::{Error, Result};
use crate::families::{IndexFamily, IndexSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Window {
    n_min: u64,
    horizon: u64,
    m_grid: Vec<u64>,
}

impl Window {
    pub const DEFAULT_N_MIN: u64 = 64;

    /// `m_grid` defaults to the powers of two up to `horizon/4`.
    pub fn new(n_min: u64, horizon: u64, m_grid: Option<Vec<u64>>) -> Result<Self> {
        if n_min == 0 || n_min >= horizon {
            return Err(Error::InvalidWindow(format!(
                "need 1 ≤ n_min < horizon, got n_min={n_min} horizon={horizon}"
            )));
        }
        let mut grid = m_grid.unwrap_or_else(|| {
            std::iter::successors(Some(1u64), |&m| m.checked_mul(2))
                .take_while(|&m| m <= horizon / 4)
                .collect()
        });
        grid.sort_unstable();
        grid.dedup();
        if grid.is_empty() {
            grid.push(0);
        }
        if let Some(&bad) = grid.iter().find(|&&m| m >= horizon) {
            return Err(Error::InvalidWindow(format!("tail start {bad} is not below the horizon {horizon}")));
        }
        Ok(Window {
            n_min,
            horizon,
            m_grid: grid,
        })
    }

    pub fn with_defaults(horizon: u64) -> Result<Self> {
        Self::new(Self::DEFAULT_N_MIN, horizon, None)
    }

    pub fn n_min(&self) -> u64 {
        self.n_min
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn m_grid(&self) -> &[u64] {
        &self.m_grid
    }

    /// Every family member must reach `[floor, horizon]`.
    pub fn floor(&self) -> u64 {
        self.n_min.max(*self.m_grid.last().expect("grid is nonempty"))
    }

    /// The cofinite tails over the grid.
    pub fn tail_family(&self) -> IndexFamily {
        IndexFamily::cofinite_tails(&self.m_grid).expect("grid is nonempty")
    }
}

/// `K̂(A↾n)` for every `n ≤ horizon`.
#[derive(Debug, Clone)]
pub struct RatioTable {
    estimates: Vec<u64>,
}

impl RatioTable {
    pub fn compute(source: &dyn BitSource, est: &dyn ComplexityEstimator, horizon: u64) -> Self {
        RatioTable {
            estimates: est.prefix_estimates(&source.prefix(horizon)),
        }
    }

    pub fn from_estimates(estimates: Vec<u64>) -> Self {
        RatioTable { estimates }
    }

    pub fn horizon(&self) -> u64 {
        self.estimates.len() as u64 - 1
    }

    pub fn ratio(&self, n: u64) -> Ratio {
        Ratio::new(self.estimates[n as usize], n)
    }

    fn check(&self, w: &Window) -> Result<()> {
        if self.horizon() < w.horizon {
            return Err(Error::InvalidWindow(format!(
                "ratio table reaches {} but the window needs {}",
                self.horizon(),
                w.horizon
            )));
        }
        Ok(())
    }

    /// Smallest and largest ratio over `ns`, first occurrence on ties.
    fn extremes(&self, ns: impl IntoIterator<Item = u64>) -> Option<(Witness, Witness)> {
        let mut it = ns.into_iter();
        let first = it.next()?;
        let w0 = Witness {
            n: first,
            ratio: self.ratio(first),
        };
        let (mut lo, mut hi) = (w0, w0);
        for n in it {
            let r = self.ratio(n);
            if r < lo.ratio {
                lo = Witness { n, ratio: r };
            }
            if r > hi.ratio {
                hi = Witness { n, ratio: r };
            }
        }
        Some((lo, hi))
    }
}

/// Where an extreme ratio was attained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub n: u64,
    pub ratio: Ratio,
}

/// An outer extreme together with the tail start or member achieving it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Extreme {
    pub value: Ratio,
    /// Tail start `m` (for H/p) or member index (for si/is).
    pub attained_by: u64,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MemberReport {
    pub member: String,
    pub inf: Witness,
    pub sup: Witness,
}

impl MemberReport {
    /// `sup − inf` along the member, as a float for display.
    pub fn gap(&self) -> f64 {
        self.sup.ratio.to_f64() - self.inf.ratio.to_f64()
    }
}

fn tail_extremes(t: &RatioTable, w: &Window) -> Vec<(u64, Witness, Witness)> {
    w.m_grid
        .iter()
        .map(|&m| {
            let (lo, hi) = t
                .extremes(m.max(w.n_min)..=w.horizon)
                .expect("tails below the horizon are nonempty");
            (m, lo, hi)
        })
        .collect()
}

/// `max_m min_{n ∈ [max(m, n_min), N]} ratio(n)`.
pub fn dim_h_from(t: &RatioTable, w: &Window) -> Result<Extreme> {
    t.check(w)?;
    let best = tail_extremes(t, w)
        .into_iter()
        .fold(None::<(u64, Witness)>, |acc, (m, lo, _)| match acc {
            Some((_, b)) if b.ratio >= lo.ratio => acc,
            _ => Some((m, lo)),
        })
        .expect("grid is nonempty");
    Ok(Extreme {
        value: best.1.ratio,
        attained_by: best.0,
        witness: best.1,
    })
}

/// `min_m max_{n ∈ [max(m, n_min), N]} ratio(n)`.
pub fn dim_p_from(t: &RatioTable, w: &Window) -> Result<Extreme> {
    t.check(w)?;
    let best = tail_extremes(t, w)
        .into_iter()
        .fold(None::<(u64, Witness)>, |acc, (m, _, hi)| match acc {
            Some((_, b)) if b.ratio <= hi.ratio => acc,
            _ => Some((m, hi)),
        })
        .expect("grid is nonempty");
    Ok(Extreme {
        value: best.1.ratio,
        attained_by: best.0,
        witness: best.1,
    })
}

/// Inf and sup of the ratio along `set ∩ [n_min, N]`.
pub fn member_report(t: &RatioTable, set: &IndexSet, w: &Window) -> Result<MemberReport> {
    t.check(w)?;
    let xs = set.elements_in(w.n_min, w.horizon);
    if xs.last().is_none_or(|&x| x < w.floor()) {
        return Err(Error::ExhaustedAtHorizon {
            set: set.to_string(),
            horizon: w.horizon,
        });
    }
    let (inf, sup) = t.extremes(xs).expect("nonempty");
    Ok(MemberReport {
        member: set.to_string(),
        inf,
        sup,
    })
}

pub fn member_reports(t: &RatioTable, fam: &IndexFamily, w: &Window) -> Result<Vec<MemberReport>> {
    fam.members.iter().map(|m| member_report(t, m, w)).collect()
}

/// Max over members of the member inf.
pub fn dim_si_from(reports: &[MemberReport]) -> Extreme {
    let (i, r) = reports
        .iter()
        .enumerate()
        .fold(None::<(usize, &MemberReport)>, |acc, (i, r)| match acc {
            Some((_, b)) if b.inf.ratio >= r.inf.ratio => acc,
            _ => Some((i, r)),
        })
        .expect("families are nonempty");
    Extreme {
        value: r.inf.ratio,
        attained_by: i as u64,
        witness: r.inf,
    }
}

/// Min over members of the member sup.
pub fn dim_is_from(reports: &[MemberReport]) -> Extreme {
    let (i, r) = reports
        .iter()
        .enumerate()
        .fold(None::<(usize, &MemberReport)>, |acc, (i, r)| match acc {
            Some((_, b)) if b.sup.ratio <= r.sup.ratio => acc,
            _ => Some((i, r)),
        })
        .expect("families are nonempty");
    Extreme {
        value: r.sup.ratio,
        attained_by: i as u64,
        witness: r.sup,
    }
}

pub fn dim_h_hat(a: &dyn BitSource, est: &dyn ComplexityEstimator, w: &Window) -> Result<Ratio> {
    Ok(dim_h_from(&RatioTable::compute(a, est, w.horizon), w)?.value)
}

pub fn dim_p_hat(a: &dyn BitSource, est: &dyn ComplexityEstimator, w: &Window) -> Result<Ratio> {
    Ok(dim_p_from(&RatioTable::compute(a, est, w.horizon), w)?.value)
}

pub fn dim_si_hat(
    a: &dyn BitSource,
    est: &dyn ComplexityEstimator,
    fam: &IndexFamily,
    w: &Window,
) -> Result<Ratio> {
    let t = RatioTable::compute(a, est, w.horizon);
    Ok(dim_si_from(&member_reports(&t, fam, w)?).value)
}

pub fn dim_is_hat(
    a: &dyn BitSource,
    est: &dyn ComplexityEstimator,
    fam: &IndexFamily,
    w: &Window,
) -> Result<Ratio> {
    let t = RatioTable::compute(a, est, w.horizon);
    Ok(dim_is_from(&member_reports(&t, fam, w)?).value)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionProfile {
    pub source: String,
    pub estimator: String,
    pub family: String,
    pub window: Window,
    pub dim_h: Extreme,
    pub dim_p: Extreme,
    pub dim_si: Extreme,
    pub dim_is: Extreme,
    pub members: Vec<MemberReport>,
}

impl DimensionProfile {
    /// `dim_H ≤ dim_is ≤ dim_p` and `dim_H ≤ dim_si ≤ dim_p`.
    pub fn chain_holds(&self) -> bool {
        let (h, p) = (self.dim_h.value, self.dim_p.value);
        h <= self.dim_is.value && self.dim_is.value <= p && h <= self.dim_si.value && self.dim_si.value <= p
    }
}

/// All four values over one ratio table.
pub fn profile_from(
    t: &RatioTable,
    source: String,
    estimator: String,
    fam: &IndexFamily,
    w: &Window,
) -> Result<DimensionProfile> {
    let members = member_reports(t, fam, w)?;
    Ok(DimensionProfile {
        source,
        estimator,
        family: fam.label.clone(),
        window: w.clone(),
        dim_h: dim_h_from(t, w)?,
        dim_p: dim_p_from(t, w)?,
        dim_si: dim_si_from(&members),
        dim_is: dim_is_from(&members),
        members,
    })
}

pub fn profile(
    a: &dyn BitSource,
    est: &dyn ComplexityEstimator,
    fam: &IndexFamily,
    w: &Window,
) -> Result<DimensionProfile> {
    let t = RatioTable::compute(a, est, w.horizon);
    profile_from(&t, a.describe(), est.id(), fam, w)
}

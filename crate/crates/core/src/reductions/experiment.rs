//! Pairs the profile of a constructed `X` with the profile of its image under a wtt machine.

use serde::Serialize;

use super::wtt::{apply_wtt, WttMachine, WttOutcome};
use crate::bits::{GuideSet, Source};
use crate::complexity::ComplexityEstimator;
use crate::constructions::{build_theorem12_x, ell_endpoints, UseBound};
use crate::dimensions::{profile_from, DimensionProfile, RatioTable, Window};
use crate::error::Result;
use crate::families::IndexFamily;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UseBoundedReport {
    pub machine: String,
    pub use_bound: String,
    /// `{ℓ_k : k ∈ S}` up to the horizon.
    pub endpoints: Vec<u64>,
    /// `X` over the window's tails plus the endpoint tails that reach the window floor.
    pub x_profile: DimensionProfile,
    /// `Φ^X` over the adversary family, absent when `Φ^X` stalled.
    pub image_profile: Option<DimensionProfile>,
    /// First output bit that exhausted the machine's step budget.
    pub nontotal_at: Option<u64>,
}

/// Builds `X` from `r`, `s0` and `f`, then profiles `X` and `Φ^X` at the window horizon.
///
/// `X` is materialized far enough (`f(horizon)`) to answer every query `Φ` may make.
pub fn theorem12_experiment(
    r: Source,
    s0: GuideSet,
    f: &UseBound,
    machine: &WttMachine,
    fam: &IndexFamily,
    est: &dyn ComplexityEstimator,
    w: &Window,
) -> Result<UseBoundedReport> {
    let horizon = w.horizon();
    let reach = f.eval(horizon).max(machine.use_bound.eval(horizon)).max(horizon);
    let x = build_theorem12_x(r, s0, f, reach)?;

    let endpoints = ell_endpoints(&x, horizon)?;
    let endpoint_list = endpoints.elements_up_to(horizon);
    let fam_a = match IndexFamily::tails_of("ell-endpoints", &endpoints, w.floor(), horizon) {
        Ok(tails) => w.tail_family().extended(&tails),
        Err(_) => w.tail_family(),
    };
    let x_word = crate::bits::prefix(&x, horizon);
    let x_table = RatioTable::from_estimates(est.prefix_estimates(&x_word));
    let x_profile = profile_from(&x_table, crate::bits::BitSource::describe(&x), est.id(), &fam_a, w)?;

    let x_src: Source = std::sync::Arc::new(x);
    let (image_profile, nontotal_at) = match apply_wtt(machine, x_src.clone(), horizon)? {
        WttOutcome::Total { bits, .. } => {
            let t = RatioTable::from_estimates(est.prefix_estimates(&bits));
            let label = format!("wtt({}; {})", machine.name(), x_src.describe());
            (Some(profile_from(&t, label, est.id(), fam, w)?), None)
        }
        WttOutcome::NonTotal { at, .. } => (None, Some(at)),
    };

    Ok(UseBoundedReport {
        machine: machine.name(),
        use_bound: f.to_string(),
        endpoints: endpoint_list,
        x_profile,
        image_profile,
        nontotal_at,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bits::Pseudorandom;
    use crate::complexity::CompressorEstimator;
    use crate::families::IndexSet;

    fn r() -> Source {
        Arc::new(Pseudorandom::new(12))
    }

    fn aps() -> IndexFamily {
        IndexFamily::new(
            "aps",
            vec![IndexSet::progression(0, 1), IndexSet::progression(1, 3), IndexSet::progression(5, 7)],
        )
        .unwrap()
    }

    #[test]
    fn empty_guide_gives_zero_sequence() {
        let w = Window::with_defaults(1 << 12).unwrap();
        let rep = theorem12_experiment(
            r(),
            GuideSet::Empty,
            &UseBound::Identity,
            &WttMachine::identity(),
            &aps(),
            &CompressorEstimator,
            &w,
        )
        .unwrap();
        assert!(rep.endpoints.is_empty());
        let y = rep.image_profile.unwrap();
        for v in [rep.x_profile.dim_si.value, y.dim_si.value] {
            assert!(v.to_f64() <= 0.1, "{v:?}");
        }
    }

    #[test]
    fn stalled_machine_is_reported() {
        let w = Window::with_defaults(1 << 10).unwrap();
        let m = WttMachine::identity().with_budget(0);
        let rep = theorem12_experiment(r(), GuideSet::All, &UseBound::Identity, &m, &aps(), &CompressorEstimator, &w)
            .unwrap();
        assert_eq!(rep.nontotal_at, Some(0));
        assert!(rep.image_profile.is_none());
    }
}

use std::sync::Arc;

use dimlab_core::bits::{Constant, GuideSet, Pseudorandom, Source};
use dimlab_core::complexity::CompressorEstimator;
use dimlab_core::constructions::UseBound;
use dimlab_core::reductions::{apply_wtt, theorem12_experiment, transduce, WttMachine, WttOutcome};
use dimlab_core::thresholds as th;

fn r() -> Source {
    Arc::new(Pseudorandom::new(th::USE_BOUNDED_SEED))
}

#[test]
fn identity_machine_with_full_guide_keeps_x_random_on_endpoints() {
    let w = th::use_bounded_window();
    let rep = theorem12_experiment(
        r(),
        GuideSet::All,
        &UseBound::Identity,
        &WttMachine::identity(),
        &th::progression_family(),
        &CompressorEstimator,
        &w,
    )
    .unwrap();
    assert_eq!(rep.endpoints, vec![1, 16, 512, 65536]);
    assert!(rep.x_profile.dim_si.value.to_f64() >= th::USE_BOUNDED_X_SI_MIN);
    assert!(rep.x_profile.chain_holds());
}

#[test]
fn square_sampler_image_is_low_over_progressions() {
    let w = th::use_bounded_window();
    let s0 = GuideSet::PrefixCodes(Arc::new(Pseudorandom::new(th::USE_BOUNDED_PREFIX_SEED)));
    let rep = theorem12_experiment(
        r(),
        s0,
        &UseBound::Square,
        &WttMachine::square_sampler(),
        &th::progression_family(),
        &CompressorEstimator,
        &w,
    )
    .unwrap();
    let image = rep.image_profile.expect("square sampler is total");
    // No chain check here: the progression family lacks the cofinite tails the chain needs.
    assert!(image.dim_si.value.to_f64() <= th::USE_BOUNDED_IMAGE_SI_MAX);
}

#[test]
fn empty_guide_scores_at_the_compressor_floor() {
    let w = th::use_bounded_window();
    let rep = theorem12_experiment(
        r(),
        GuideSet::Empty,
        &UseBound::Identity,
        &WttMachine::identity(),
        &th::progression_family(),
        &CompressorEstimator,
        &w,
    )
    .unwrap();
    let image = rep.image_profile.unwrap();
    assert!(rep.x_profile.dim_si.value.to_f64() <= th::USE_BOUNDED_EMPTY_MAX);
    assert!(image.dim_si.value.to_f64() <= th::USE_BOUNDED_EMPTY_MAX);
}

#[test]
fn switching_stabilizes_at_every_tested_horizon() {
    for stages in [256u64, 1024, 2048, 4096] {
        let rep = transduce(Arc::new(Constant(false)), Arc::new(Pseudorandom::new(7)), stages, &CompressorEstimator);
        assert_eq!(rep.final_track, 1, "stages {stages}");
        assert_eq!(rep.switches.len(), th::TRANSDUCER_SWITCHES, "stages {stages}");
        let high = rep.query_high_water.unwrap();
        assert!(high < 2 * rep.output.len() as u64 + 2);
    }
}

#[test]
fn square_sampler_reads_up_to_its_bound() {
    let x: Source = Arc::new(Pseudorandom::new(3));
    match apply_wtt(&WttMachine::square_sampler(), x, 100).unwrap() {
        WttOutcome::Total { query_high_water, .. } => assert_eq!(query_high_water, Some(99 * 99 - 1)),
        other => panic!("{other:?}"),
    }
}

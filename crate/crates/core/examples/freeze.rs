//! Prints every measured quantity that backs a constant in `dimlab_core::thresholds`.
//!
//! Run with `cargo run --release -p dimlab-core --example freeze`.

use std::sync::Arc;

use dimlab_core::bits::{Constant, GuideSet, Pseudorandom, Source};
use dimlab_core::complexity::machine::ToyPrefixMachine;
use dimlab_core::complexity::{ComplexityEstimator, CompressorEstimator};
use dimlab_core::constructions::*;
use dimlab_core::dimensions::*;
use dimlab_core::families::IndexFamily;
use dimlab_core::reductions::*;
use dimlab_core::thresholds as th;

fn main() {
    let est = CompressorEstimator;

    let w = Window::with_defaults(1 << 13).unwrap();
    let p = profile(&Constant(false), &est, &w.tail_family(), &w).unwrap();
    println!("zeros_profile_max_2^13 {:.4}", p.dim_p.value.to_f64());

    let b = build_theorem4(Arc::new(Pseudorandom::new(th::SEGMENT_SEED)), Schedule::default());
    let w = th::segment_window();
    let t = RatioTable::compute(&b, &est, w.horizon());
    let r = IndexFamily::tails_of("R", &endpoint_set(Schedule::default(), KFilter::ODD, 0), w.floor(), w.horizon()).unwrap();
    let z = IndexFamily::tails_of("Z", &endpoint_set(Schedule::default(), EVEN, 0), w.floor(), w.horizon()).unwrap();
    println!("segment_si_over_r {:.4}", dim_si_from(&member_reports(&t, &r, &w).unwrap()).value.to_f64());
    println!("segment_is_over_z {:.4}", dim_is_from(&member_reports(&t, &z, &w).unwrap()).value.to_f64());

    let g = build_generic_like(th::generic_bank(), Arc::new(Constant(false)), Arc::new(Pseudorandom::new(th::GENERIC_HIGH_SEED)), th::GENERIC_PARAMS).unwrap();
    let w = th::generic_window();
    let t = RatioTable::compute(&g, &est, w.horizon());
    let c = member_reports(&t, &g.designated_family(Polarity::Compressible).unwrap(), &w).unwrap();
    let i = member_reports(&t, &g.designated_family(Polarity::Incompressible).unwrap(), &w).unwrap();
    println!("generic_si_compressible {:.4}", dim_si_from(&c).value.to_f64());
    println!("generic_is_incompressible {:.4}", dim_is_from(&i).value.to_f64());

    let rep = transduce(Arc::new(Constant(false)), Arc::new(Pseudorandom::new(7)), th::TRANSDUCER_STAGES, &est);
    let n = rep.output.len();
    let q: dimlab_core::BitWord = rep.output.iter().skip(n * 3 / 4).collect();
    println!("transducer_switches {}", rep.switches.len());
    println!("transducer_final_quarter {:.4}", est.estimate(&q) as f64 / q.len() as f64);

    let x: Source = Arc::new(Pseudorandom::new(th::BIT_REPEAT_SEED));
    let y = apply_wtt(&WttMachine::bit_repeat(), x.clone(), th::BIT_REPEAT_N).unwrap();
    let n = th::BIT_REPEAT_N as f64;
    println!("bit_repeat_image {:.4}", est.estimate(y.bits()) as f64 / n);
    println!("bit_repeat_oracle {:.4}", est.estimate(&x.prefix(th::BIT_REPEAT_N)) as f64 / n);

    let w = th::use_bounded_window();
    let aps = th::progression_family();
    let r12 = || -> Source { Arc::new(Pseudorandom::new(th::USE_BOUNDED_SEED)) };
    let a = theorem12_experiment(r12(), GuideSet::All, &UseBound::Identity, &WttMachine::identity(), &aps, &est, &w).unwrap();
    println!("use_bounded_identity_x_si {:.4}", a.x_profile.dim_si.value.to_f64());
    let pc = GuideSet::PrefixCodes(Arc::new(Pseudorandom::new(th::USE_BOUNDED_PREFIX_SEED)));
    let b = theorem12_experiment(r12(), pc, &UseBound::Square, &WttMachine::square_sampler(), &aps, &est, &w).unwrap();
    println!("use_bounded_square_image_si {:.4}", b.image_profile.unwrap().dim_si.value.to_f64());
    let e = theorem12_experiment(r12(), GuideSet::Empty, &UseBound::Identity, &WttMachine::identity(), &aps, &est, &w).unwrap();
    println!(
        "use_bounded_empty_max {:.4}",
        e.x_profile.dim_si.value.to_f64().max(e.image_profile.unwrap().dim_si.value.to_f64())
    );

    let en = ToyPrefixMachine::with_limits(th::EXACT_L_MAX, th::EXACT_PROGRAM_MAX).enumerate();
    println!("machine_constant {}", en.machine_constant(th::EXACT_L_MAX));

    let excess = dimlab_core::complexity::compressor::subadditivity_excess(0, 1000);
    let over = excess.iter().filter(|&&e| e > th::SUBADDITIVITY_SLACK as i64).count();
    println!("subadditivity_max_excess {} beyond_slack {over}", excess.iter().max().unwrap());
}

//! Frozen numeric thresholds and the fixed inputs that produced them.
//!
//! Every measured value is printed by `cargo run --release -p dimlab-core --example freeze`.
//! A threshold leaves visible headroom under the measurement recorded beside it. Change the
//! inputs here and the thresholds must be refrozen from a new run.

use crate::constructions::{GenericParams, Polarity, Requirement};
use crate::dimensions::Window;
use crate::families::{IndexFamily, IndexSet};

/// Every profile value of `0^ω` at horizon 2^13 (measured 0.0186).
pub const ZEROS_PROFILE_MAX: f64 = 0.1;

pub const SEGMENT_SEED: u64 = 7;
/// `dim_si` of the segment sequence over the `R` tails (measured 1.1875).
pub const SEGMENT_SI_MIN: f64 = 0.6;
/// `dim_is` of the segment sequence over the `Z` tails (measured 0.0098).
pub const SEGMENT_IS_MAX: f64 = 0.15;

/// Horizon `s_4 = 2^16`, tail starts up to `s_3 = 512`.
pub fn segment_window() -> Window {
    Window::new(64, 1 << 16, Some(vec![64, 128, 256, 512])).expect("valid window")
}

pub const GENERIC_HIGH_SEED: u64 = 21;
pub const GENERIC_PARAMS: GenericParams = GenericParams {
    horizon: 1 << 20,
    min_block: 64,
    growth: 8,
};
/// `dim_si` over the compressible-designated sets (measured 0.1331).
pub const GENERIC_SI_MAX: f64 = 0.2;
/// `dim_is` over the incompressible-designated sets (measured 1.0859).
pub const GENERIC_IS_MIN: f64 = 0.6;

pub fn generic_bank() -> Vec<Requirement> {
    let req = |set, polarity| Requirement { set, polarity };
    vec![
        req(IndexSet::pow2(0, 2), Polarity::Compressible),
        req(IndexSet::pow2(1, 2), Polarity::Incompressible),
        req(IndexSet::progression(0, 5), Polarity::Compressible),
        req(IndexSet::progression(3, 7), Polarity::Incompressible),
    ]
}

pub fn generic_window() -> Window {
    Window::new(64, GENERIC_PARAMS.horizon, Some(vec![64])).expect("valid window")
}

pub const TRANSDUCER_STAGES: u64 = 1 << 12;
/// Switches with `A0 = 0^ω`, `A1` pseudorandom(7), the compressor, 2^12 stages (measured).
pub const TRANSDUCER_SWITCHES: usize = 1;
/// Compressor ratio of the output's final quarter (measured 1.1318).
pub const TRANSDUCER_TAIL_MIN: f64 = 0.75;

pub const BIT_REPEAT_SEED: u64 = 7;
pub const BIT_REPEAT_N: u64 = 1 << 12;
/// Ratio of the bit-repeat image at 2^12 (measured 0.0913).
pub const BIT_REPEAT_IMAGE_MAX: f64 = 0.2;
/// Ratio of the oracle itself at 2^12 (measured 1.0571).
pub const BIT_REPEAT_ORACLE_MIN: f64 = 0.8;

pub const USE_BOUNDED_SEED: u64 = 12;
pub const USE_BOUNDED_PREFIX_SEED: u64 = 5;
/// `dim_si` of `X` over the endpoint family, identity bound, `S0 = ℕ` (measured 1.0012).
pub const USE_BOUNDED_X_SI_MIN: f64 = 0.6;
/// `dim_si` of the square-sampler image over progressions, prefix-code `S0` (measured 0.0009).
pub const USE_BOUNDED_IMAGE_SI_MAX: f64 = 0.25;
/// Both `dim_si` values with `S0 = ∅` (measured 0.0009).
pub const USE_BOUNDED_EMPTY_MAX: f64 = 0.1;

/// Horizon `ℓ_3 = 2^16` for the identity bound.
pub fn use_bounded_window() -> Window {
    Window::new(64, 1 << 16, Some(vec![64, 128, 256, 512])).expect("valid window")
}

pub fn progression_family() -> IndexFamily {
    IndexFamily::new(
        "progressions",
        vec![
            IndexSet::progression(0, 1),
            IndexSet::progression(1, 2),
            IndexSet::progression(0, 3),
            IndexSet::progression(2, 5),
            IndexSet::progression(3, 7),
        ],
    )
    .expect("nonempty")
}

/// Longest word tabulated exactly.
pub const EXACT_L_MAX: usize = 8;
/// Program length that covers the literal program `2·8 + 2` of every such word.
pub const EXACT_PROGRAM_MAX: usize = 18;
/// `max_{|σ| ≤ 8} (K(σ) − 2|σ|)` on the toy machine (measured).
pub const MACHINE_CONSTANT: i64 = 2;

/// `C(xy) ≤ C(x) + C(y) + slack` for the compressor, in bits.
pub const SUBADDITIVITY_SLACK: u64 = 128;
/// Tolerated fraction of sampled pairs beyond the slack (measured 1 of 1000, largest excess 146).
pub const SUBADDITIVITY_VIOLATIONS: f64 = 0.01;

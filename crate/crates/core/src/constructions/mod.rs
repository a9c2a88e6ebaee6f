//! Sequence-building recipes: schedules, segment assembly, guide sets and the
//! finite-extension builder.

pub mod generic;
pub mod recurrence;
pub mod schedule;
pub mod segments;

pub use generic::{build_generic_like, GenericBuild, GenericParams, Meet, Polarity, Requirement};
pub use recurrence::{ell_boundaries, ell_lambda, EllLambda, UseBound};
pub use schedule::{k_of_n, KFilter, Schedule, Segments};
pub use segments::{
    build_double_segment, build_theorem12_x, build_theorem4, double_zero_scan, endpoint_set,
    ell_endpoints, DoubleSegmentMode, SegmentSource, EVEN,
};

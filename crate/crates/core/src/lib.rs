//! Binary sequences with prescribed finite-horizon dimension behavior, complexity
//! proxies, index-set families and oracle reductions.

pub mod bits;
pub mod complexity;
pub mod constructions;
pub mod dimensions;
pub mod error;
pub mod families;
pub mod kv;
pub mod reductions;
pub mod thresholds;

pub use bits::{BitSource, BitWord, GuideSet, Source};
pub use error::{Error, Result};

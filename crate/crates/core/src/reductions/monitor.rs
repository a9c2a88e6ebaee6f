//! Oracle access with instrumentation.

use crate::bits::{BitSource, Source};
use crate::error::{Error, Result};

/// Records every query made to an oracle and its high-water mark.
#[derive(Debug)]
pub struct QueryMonitor {
    oracle: Source,
    high_water: Option<u64>,
    queries: u64,
}

impl QueryMonitor {
    pub fn new(oracle: Source) -> Self {
        QueryMonitor {
            oracle,
            high_water: None,
            queries: 0,
        }
    }

    pub fn query(&mut self, index: u64) -> bool {
        self.queries += 1;
        self.high_water = Some(self.high_water.map_or(index, |h| h.max(index)));
        self.oracle.bit(index)
    }

    /// A query made while computing output bit `n` with use bound `bound`: indices `≥ bound` fault.
    pub fn bounded_query(&mut self, n: u64, index: u64, bound: u64) -> Result<bool> {
        if index >= bound {
            return Err(Error::UseViolation { n, index, bound });
        }
        Ok(self.query(index))
    }

    pub fn high_water(&self) -> Option<u64> {
        self.high_water
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn oracle(&self) -> &dyn BitSource {
        self.oracle.as_ref()
    }
}

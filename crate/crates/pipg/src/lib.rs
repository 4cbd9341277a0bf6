//! IO companion for `pipg-core`: file formats, DOT emitters, reports.

pub mod dot;
pub mod format;
pub mod report;

use std::time::Instant;

/// Wall-clock stopwatch for exploration budgets.
pub struct WallClock {
    start: Instant,
    cap_ms: u64,
}

impl WallClock {
    pub fn new(cap_ms: u64) -> Self {
        WallClock { start: Instant::now(), cap_ms }
    }
}

impl pipg_core::testing::Stopwatch for WallClock {
    fn expired(&self) -> bool {
        self.start.elapsed().as_millis() as u64 >= self.cap_ms
    }
}

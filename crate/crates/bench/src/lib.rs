//! Benchmark fixtures shared by the criterion targets.

use lmcf_core::lawlor::GridSpec;

/// Neck grid with `points` samples out to |y| = 1e3.
pub fn neck_grid(points: usize) -> GridSpec {
    GridSpec { y_max: 1e3, points, stretch: None }
}

//! Partial destruction of a solution.
//!
//! Repeatedly picks a random pattern, then a random item or structure node
//! within it, and removes that node, releasing its items to the excluded
//! set. The number of removals is drawn around `mean_removals`, and
//! destruction continues for as long as the total bin area still meets or
//! exceeds the area limit.

use rand::Rng;

use crate::model::{Area, NodeId, PatternId, Solution};
use crate::treeops::remove_and_release;
use crate::SolverRng;

/// Sentinel for "no area limit".
pub const UNLIMITED_AREA: Area = Area::MAX;

/// One removal performed by `ruin`, for replay-style verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuinStep {
    pub pattern: PatternId,
    pub node: NodeId,
}

/// Ruins the solution in place. Draws the removal budget uniformly from
/// {1, ..., 2*mean_removals - 1} (zero when `mean_removals` is zero) and
/// keeps removing while budget remains or the total bin area is at or above
/// `area_limit`. Stops early once no patterns remain.
pub fn ruin(
    solution: &mut Solution,
    area_limit: Area,
    mean_removals: u32,
    rng: &mut SolverRng,
) -> Vec<RuinStep> {
    let mut budget: i64 = if mean_removals == 0 {
        0
    } else {
        rng.random_range(1..=2 * mean_removals as i64 - 1)
    };
    let mut steps = Vec::new();

    while budget > 0 || solution.total_bin_area() >= area_limit {
        if solution.patterns().is_empty() {
            break;
        }
        let pattern_idx = rng.random_range(0..solution.patterns().len());
        let pattern = &solution.patterns()[pattern_idx];
        let pattern_id = pattern.id;

        let mut eligible = Vec::new();
        pattern.root.visit(&mut |n| {
            if !n.is_leftover() {
                eligible.push(n.id);
            }
        });
        if eligible.is_empty() {
            // single-leftover root: cannot happen between iterations, but
            // dropping the pattern keeps the loop progressing regardless
            solution.remove_pattern(pattern_id);
            budget -= 1;
            continue;
        }
        let node = eligible[rng.random_range(0..eligible.len())];
        remove_and_release(solution, pattern_id, node)
            .expect("eligible node chosen from live pattern");
        steps.push(RuinStep {
            pattern: pattern_id,
            node,
        });
        budget -= 1;
    }
    steps
}

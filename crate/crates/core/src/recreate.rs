//! Greedy reconstruction with blinks.
//!
//! Every excluded item gets exactly one insertion attempt per call, in
//! most-restricted-first order. Options are scored by the loss in leftover
//! value; the cheapest non-blinked option wins. A new bin may be opened only
//! when the item has no options and the bin keeps the total area strictly
//! below the limit.

use rand::Rng;

use crate::model::{Area, CopyId, Instance, Solution};
use crate::treeops::{count_options, enumerate_options_in_pattern, insert, InsertionOption};
use crate::SolverRng;

/// Knobs for the rebuild phase.
#[derive(Debug, Clone, Copy)]
pub struct RecreateParams {
    /// Leftover value exponent used for option costs.
    pub value_power: f64,
    /// Probability of skipping over an option during selection, in [0, 1).
    pub blink_rate: f64,
    /// When set, a new bin is eligible merely by fitting the area budget,
    /// even if the trigger item cannot fit inside it.
    pub open_unfitting_bins: bool,
}

/// Picks the candidate with the fewest insertion options against the
/// current solution; ties are broken uniformly at random. `candidates`
/// must be non-empty and is expected in canonical (sorted) order.
pub fn most_restricted(
    candidates: &[CopyId],
    instance: &Instance,
    solution: &Solution,
    rng: &mut SolverRng,
) -> usize {
    debug_assert!(!candidates.is_empty());
    let rotation = instance.rotation_allowed();
    // items of equal dimensions always count the same; memoize per dims
    let mut memo: Vec<((u64, u64), usize)> = Vec::new();
    let mut best_count = usize::MAX;
    let mut tied: Vec<usize> = Vec::new();
    for (idx, copy) in candidates.iter().enumerate() {
        let dims = instance.copy_dims(*copy);
        let count = match memo.iter().find(|(d, _)| *d == dims) {
            Some((_, c)) => *c,
            None => {
                let c = count_options(dims, rotation, solution);
                memo.push((dims, c));
                c
            }
        };
        if count < best_count {
            best_count = count;
            tied.clear();
            tied.push(idx);
        } else if count == best_count {
            tied.push(idx);
        }
    }
    if tied.len() == 1 {
        tied[0]
    } else {
        tied[rng.random_range(0..tied.len())]
    }
}

/// Selects an option in a single scan: each option is independently blinked
/// over with probability `blink_rate`; the cheapest unblinked option wins,
/// and if every option was blinked the cheapest option overall is returned.
/// Cost ties keep the first-seen option.
pub fn select_with_blinks<'a>(
    options: &'a [InsertionOption],
    blink_rate: f64,
    rng: &mut SolverRng,
) -> &'a InsertionOption {
    debug_assert!(!options.is_empty());
    let mut best_seen: Option<&InsertionOption> = None;
    let mut best_overall: Option<&InsertionOption> = None;
    for option in options {
        if best_overall.is_none_or(|b| option.cost < b.cost) {
            best_overall = Some(option);
        }
        let blinked = blink_rate > 0.0 && rng.random_bool(blink_rate);
        if !blinked && best_seen.is_none_or(|b| option.cost < b.cost) {
            best_seen = Some(option);
        }
    }
    best_seen.or(best_overall).expect("options is non-empty")
}

/// Rebuilds the solution in place under `area_limit`. Returns the number of
/// copies inserted.
pub fn recreate(
    solution: &mut Solution,
    instance: &Instance,
    area_limit: Area,
    params: &RecreateParams,
    rng: &mut SolverRng,
) -> usize {
    let mut pending: Vec<CopyId> = solution.excluded().iter().copied().collect();
    let mut inserted = 0;
    let mut options: Vec<InsertionOption> = Vec::new();

    while !pending.is_empty() {
        let choice = most_restricted(&pending, instance, solution, rng);
        let copy = pending.remove(choice);
        let dims = instance.copy_dims(copy);

        options.clear();
        for pattern in solution.patterns() {
            enumerate_options_in_pattern(
                copy,
                dims,
                instance.rotation_allowed(),
                pattern,
                params.value_power,
                &mut options,
            );
        }

        if options.is_empty() {
            let headroom = area_limit.saturating_sub(solution.total_bin_area());
            let eligible: Vec<_> = instance
                .bins()
                .iter()
                .filter(|bin| {
                    bin.area() < headroom
                        && bin.quantity.is_none_or(|q| solution.bin_usage(bin.id) < q)
                        && (params.open_unfitting_bins
                            || fits_some_orientation(dims, bin.width, bin.height, instance))
                })
                .collect();
            if !eligible.is_empty() {
                let pick = if eligible.len() == 1 {
                    0
                } else {
                    rng.random_range(0..eligible.len())
                };
                let bin = eligible[pick];
                let pattern_id = solution.open_bin(bin.id, bin.width, bin.height);
                enumerate_options_in_pattern(
                    copy,
                    dims,
                    instance.rotation_allowed(),
                    solution.pattern(pattern_id).expect("just opened"),
                    params.value_power,
                    &mut options,
                );
            }
        }

        if !options.is_empty() {
            let option = select_with_blinks(&options, params.blink_rate, rng).clone();
            insert(solution, &option).expect("option enumerated against current solution");
            inserted += 1;
        }
    }

    // a bin opened for an item that then could not be placed stays behind
    // as an empty pattern; clear those out before handing the solution on
    solution.drop_empty_patterns();
    inserted
}

fn fits_some_orientation(dims: (u64, u64), bin_w: u64, bin_h: u64, instance: &Instance) -> bool {
    let (w, h) = dims;
    (w <= bin_w && h <= bin_h) || (instance.rotation_allowed() && h <= bin_w && w <= bin_h)
}

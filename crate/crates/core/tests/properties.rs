//! Cross-module invariants, mostly exercised on randomized solutions.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};

use gdrr::model::{
    layout, validate, BinId, BinSpec, CopyId, Instance, ItemId, ItemSpec, NodeShape, Orientation,
    PatternId, Solution,
};
use gdrr::oracle::{exact_min_area, OracleBudget};
use gdrr::recreate::{most_restricted, select_with_blinks};
use gdrr::ruin::ruin;
use gdrr::search::{gdrr, SearchParams};
use gdrr::treeops::{
    count_options, enumerate_options, insert, remove_and_release, CreatedLeftovers,
    InsertionOption,
};
use gdrr::SolverRng;

fn make_instance(
    items: Vec<(u64, u64, u32)>,
    bins: Vec<(u64, u64, Option<u32>)>,
    rotation: bool,
) -> Instance {
    Instance::new(
        items
            .into_iter()
            .enumerate()
            .map(|(i, (w, h, d))| ItemSpec {
                id: ItemId(i as u32),
                width: w,
                height: h,
                demand: d,
            })
            .collect(),
        bins.into_iter()
            .enumerate()
            .map(|(i, (w, h, q))| BinSpec {
                id: BinId(i as u32),
                width: w,
                height: h,
                quantity: q,
            })
            .collect(),
        rotation,
    )
    .unwrap()
}

fn seeded_instance(rng: &mut SolverRng, copies: u32) -> Instance {
    let types = rng.random_range(1..=3u32).min(copies);
    let mut items = Vec::new();
    let mut left = copies;
    for t in 0..types {
        let demand = if t == types - 1 {
            left
        } else {
            rng.random_range(1..=left - (types - 1 - t))
        };
        left -= demand;
        items.push((rng.random_range(1..=6u64), rng.random_range(1..=6u64), demand));
    }
    let bins = (0..rng.random_range(1..=2u32))
        .map(|_| (rng.random_range(6..=10u64), rng.random_range(6..=10u64), None))
        .collect();
    make_instance(items, bins, rng.random_bool(0.5))
}

/// Grows a random partial solution by greedy random insertion.
fn seeded_solution(instance: &Instance, rng: &mut SolverRng) -> Solution {
    let mut solution = Solution::empty(instance);
    let copies: Vec<CopyId> = instance.copies().collect();
    for copy in copies {
        if rng.random_bool(0.25) {
            continue; // leave some excluded
        }
        let dims = instance.copy_dims(copy);
        let mut options =
            enumerate_options(copy, dims, instance.rotation_allowed(), &solution, 2.0);
        if options.is_empty() || rng.random_bool(0.3) {
            let fitting: Vec<_> = instance
                .bins()
                .iter()
                .filter(|b| dims.0 <= b.width && dims.1 <= b.height)
                .collect();
            if let Some(bin) = fitting.first() {
                let id = solution.open_bin(bin.id, bin.width, bin.height);
                gdrr::treeops::enumerate_options_in_pattern(
                    copy,
                    dims,
                    instance.rotation_allowed(),
                    solution.pattern(id).unwrap(),
                    2.0,
                    &mut options,
                );
            }
        }
        if !options.is_empty() {
            let pick = rng.random_range(0..options.len());
            insert(&mut solution, &options[pick]).unwrap();
        }
    }
    solution.drop_empty_patterns();
    solution
}

/// Naive option enumerator: every (leftover, orientation, first-cut) triple
/// applied through `insert` on a clone, outcomes deduplicated by normalized
/// shape. `enumerate_options` must produce exactly this outcome set with no
/// duplicates.
fn naive_outcome_set(
    copy: CopyId,
    dims: (u64, u64),
    rotation: bool,
    solution: &Solution,
) -> std::collections::BTreeSet<(PatternId, NodeShape)> {
    let mut outcomes = std::collections::BTreeSet::new();
    for pattern in solution.patterns() {
        let mut leftovers = Vec::new();
        pattern.root.for_each_leftover(&mut |n| {
            leftovers.push((n.id, n.width, n.height));
        });
        let mut orients = vec![(dims.0, dims.1, false)];
        if rotation && dims.0 != dims.1 {
            orients.push((dims.1, dims.0, true));
        }
        for (node, lw, lh) in leftovers {
            for &(iw, ih, rotated) in &orients {
                if iw > lw || ih > lh {
                    continue;
                }
                for first_cut in [Orientation::Vertical, Orientation::Horizontal] {
                    let option = InsertionOption {
                        pattern: pattern.id,
                        target: node,
                        copy,
                        rotated,
                        width: iw,
                        height: ih,
                        first_cut,
                        created: CreatedLeftovers::default(),
                        cost: 0.0,
                    };
                    let mut applied = solution.clone();
                    insert(&mut applied, &option).unwrap();
                    let shape = applied.pattern(pattern.id).unwrap().root.shape();
                    outcomes.insert((pattern.id, shape));
                }
            }
        }
    }
    outcomes
}

#[test]
fn enumeration_equals_naive_outcome_set_on_random_solutions() {
    let mut rng = SolverRng::seed_from_u64(31);
    for trial in 0..60 {
        let instance = seeded_instance(&mut rng, 8);
        let solution = seeded_solution(&instance, &mut rng);
        let mut leftover_count = 0;
        for p in solution.patterns() {
            p.root.for_each_leftover(&mut |_| leftover_count += 1);
        }
        if leftover_count > 20 {
            continue;
        }
        let Some(copy) = solution.excluded().iter().next().copied() else {
            continue;
        };
        let dims = instance.copy_dims(copy);
        let rotation = instance.rotation_allowed();

        let options = enumerate_options(copy, dims, rotation, &solution, 2.0);
        let mut applied = std::collections::BTreeSet::new();
        for option in &options {
            let mut s = solution.clone();
            insert(&mut s, option).unwrap();
            applied.insert((option.pattern, s.pattern(option.pattern).unwrap().root.shape()));
        }
        let naive = naive_outcome_set(copy, dims, rotation, &solution);
        assert_eq!(applied, naive, "trial {trial}");
        assert_eq!(options.len(), naive.len(), "trial {trial}: duplicates");
    }
}

#[test]
fn count_options_is_observationally_equivalent_to_enumeration() {
    let mut rng = SolverRng::seed_from_u64(37);
    for _ in 0..80 {
        let instance = seeded_instance(&mut rng, 8);
        let solution = seeded_solution(&instance, &mut rng);
        for item in instance.items() {
            let dims = (item.width, item.height);
            let copy = CopyId {
                item: item.id,
                index: 0,
            };
            assert_eq!(
                count_options(dims, instance.rotation_allowed(), &solution),
                enumerate_options(copy, dims, instance.rotation_allowed(), &solution, 2.0).len()
            );
        }
    }
}

#[test]
fn most_restricted_agrees_with_naive_recount() {
    let mut rng = SolverRng::seed_from_u64(41);
    for _ in 0..40 {
        let instance = seeded_instance(&mut rng, 8);
        let solution = seeded_solution(&instance, &mut rng);
        let candidates: Vec<CopyId> = solution.excluded().iter().copied().collect();
        if candidates.is_empty() {
            continue;
        }
        let mut pick_rng = SolverRng::seed_from_u64(99);
        let picked = most_restricted(&candidates, &instance, &solution, &mut pick_rng);
        let naive_counts: Vec<usize> = candidates
            .iter()
            .map(|c| {
                enumerate_options(
                    *c,
                    instance.copy_dims(*c),
                    instance.rotation_allowed(),
                    &solution,
                    2.0,
                )
                .len()
            })
            .collect();
        let min = *naive_counts.iter().min().unwrap();
        assert_eq!(naive_counts[picked], min);
    }
}

#[test]
fn removing_an_isolated_item_and_reinserting_restores_the_layout() {
    let mut rng = SolverRng::seed_from_u64(43);
    let mut exercised = 0;
    for _ in 0..200 {
        let instance = seeded_instance(&mut rng, 8);
        let solution = seeded_solution(&instance, &mut rng);
        // find an item node with no leftover sibling (removal then frees a
        // leftover of exactly the item's size)
        let mut target: Option<(PatternId, gdrr::model::NodeId, CopyId)> = None;
        for pattern in solution.patterns() {
            pattern.root.visit(&mut |n| {
                if let gdrr::model::NodeKind::Structure { children, .. } = &n.kind {
                    for (i, child) in children.iter().enumerate() {
                        if let gdrr::model::NodeKind::Item { copy, .. } = child.kind {
                            let prev_ok = i == 0 || !children[i - 1].is_leftover();
                            let next_ok =
                                i + 1 == children.len() || !children[i + 1].is_leftover();
                            if prev_ok && next_ok && target.is_none() {
                                target = Some((pattern.id, child.id, copy));
                            }
                        }
                    }
                }
            });
        }
        let Some((pattern_id, node_id, copy)) = target else {
            continue;
        };
        exercised += 1;

        let mut rects_before: Vec<_> = solution
            .patterns()
            .iter()
            .flat_map(|p| layout(p).into_iter().map(move |r| (p.id, r)))
            .collect();
        rects_before.sort_by_key(|(pid, r)| (*pid, r.copy, r.x, r.y));

        let mut edited = solution.clone();
        remove_and_release(&mut edited, pattern_id, node_id).unwrap();
        // the freed leftover has exactly the item's placed size somewhere;
        // reinsert through the exact-fit option that recreates the position
        let dims = instance.copy_dims(copy);
        let options = enumerate_options(copy, dims, instance.rotation_allowed(), &edited, 2.0);
        let restored = options.iter().find_map(|o| {
            let mut s = edited.clone();
            insert(&mut s, o).unwrap();
            let mut rects: Vec<_> = s
                .patterns()
                .iter()
                .flat_map(|p| layout(p).into_iter().map(move |r| (p.id, r)))
                .collect();
            rects.sort_by_key(|(pid, r)| (*pid, r.copy, r.x, r.y));
            (rects == rects_before).then_some(())
        });
        assert!(
            restored.is_some(),
            "no option restored the original layout"
        );
    }
    assert!(exercised > 50, "only {exercised} cases exercised");
}

#[test]
fn ruin_enforces_limit_whenever_bins_remain() {
    let mut rng = SolverRng::seed_from_u64(47);
    for _ in 0..60 {
        let instance = seeded_instance(&mut rng, 8);
        let mut solution = seeded_solution(&instance, &mut rng);
        if solution.patterns().is_empty() {
            continue;
        }
        let limit = solution.total_bin_area() / 2 + 1;
        ruin(&mut solution, limit, 2, &mut rng);
        assert!(solution.total_bin_area() < limit);
        assert!(validate(&instance, &solution).is_ok());
    }
}

#[test]
fn blink_selection_matches_replayed_flags() {
    let instance = make_instance(vec![(1, 1, 1)], vec![(12, 1, None)], false);
    let mut base = Solution::empty(&instance);
    for (w, h) in [(2u64, 1u64), (3, 1), (4, 1), (5, 1)] {
        base.open_bin(BinId(0), w, h);
    }
    let copy = instance.copies().next().unwrap();
    let options = enumerate_options(copy, (1, 1), false, &base, 2.0);
    for seed in 0..400u64 {
        for blink_rate in [0.0, 0.05, 0.5, 0.95] {
            let mut rng = SolverRng::seed_from_u64(seed);
            let picked = select_with_blinks(&options, blink_rate, &mut rng);

            let mut replay = SolverRng::seed_from_u64(seed);
            let flags: Vec<bool> = options
                .iter()
                .map(|_| blink_rate > 0.0 && replay.random_bool(blink_rate))
                .collect();
            fn first_min<'a>(
                candidates: impl Iterator<Item = &'a InsertionOption>,
            ) -> Option<&'a InsertionOption> {
                candidates.fold(None, |best, o| match best {
                    Some(b) if b.cost <= o.cost => Some(b),
                    _ => Some(o),
                })
            }
            let unblinked = options
                .iter()
                .zip(&flags)
                .filter(|(_, &blinked)| !blinked)
                .map(|(o, _)| o);
            let expected = first_min(unblinked)
                .or_else(|| first_min(options.iter()))
                .unwrap();
            assert_eq!(
                (picked.pattern, picked.target),
                (expected.pattern, expected.target),
                "seed {seed} rate {blink_rate}"
            );
        }
    }
}

#[test]
fn oracle_is_a_lower_bound_for_heuristic_solutions() {
    let mut rng = SolverRng::seed_from_u64(53);
    let budget = OracleBudget::default();
    for trial in 0..20 {
        let instance = seeded_instance(&mut rng, 5);
        let Ok((optimum, _)) = exact_min_area(&instance, &budget) else {
            continue;
        };
        let mut params = SearchParams::auto(&instance, std::time::Duration::ZERO);
        params.iteration_limit = Some(400);
        params.seed = trial;
        let outcome = gdrr(&instance, &params, &mut |_| {});
        if let Some(best) = outcome.best {
            assert!(validate(&instance, &best).is_ok());
            assert!(
                best.total_bin_area() >= optimum,
                "trial {trial}: {} < {optimum}",
                best.total_bin_area()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// With a linear value exponent, total leftover value equals total bin
    /// area minus placed item area.
    #[test]
    fn linear_exponent_makes_leftover_value_an_area(seed in 0u64..5000) {
        let mut rng = SolverRng::seed_from_u64(seed);
        let instance = seeded_instance(&mut rng, 6);
        let solution = seeded_solution(&instance, &mut rng);
        let expected = (solution.total_bin_area() - solution.placed_item_area()) as f64;
        prop_assert_eq!(solution.leftover_value(1.0), expected);
    }

    /// Utilization and leftover share always add up to 100%.
    #[test]
    fn utilization_plus_leftover_share_is_total(seed in 0u64..5000) {
        let mut rng = SolverRng::seed_from_u64(seed);
        let instance = seeded_instance(&mut rng, 6);
        let solution = seeded_solution(&instance, &mut rng);
        prop_assume!(!solution.patterns().is_empty());
        let util = solution.utilization().unwrap();
        let leftover_share =
            100.0 * solution.leftover_area() as f64 / solution.total_bin_area() as f64;
        prop_assert!((util + leftover_share - 100.0).abs() < 1e-9);
    }

    /// Every layout stays disjoint and inside its bin on random solutions.
    #[test]
    fn layouts_are_disjoint_and_contained(seed in 0u64..5000) {
        let mut rng = SolverRng::seed_from_u64(seed);
        let instance = seeded_instance(&mut rng, 8);
        let solution = seeded_solution(&instance, &mut rng);
        let report = validate(&instance, &solution);
        prop_assert!(report.is_ok(), "{}", report);
    }
}

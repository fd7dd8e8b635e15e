//! Solution comparison, late-acceptance hill-climbing, and the goal-driven
//! outer loop.
//!
//! The loop ruins and rebuilds the incumbent under a bin-area limit. A
//! candidate is accepted when it is not worse than the snapshot taken a
//! fixed number of accepted steps earlier, or not worse than the current
//! local optimum; the acceptance counter advances only on acceptance.
//! Whenever the local optimum becomes complete, it is recorded as the best
//! solution, the limit drops to its total bin area, and the search resumes
//! from a version of it ruined down below the new limit.

use std::cell::Cell;
use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::time::{Duration, Instant};

use rand::SeedableRng;

use crate::model::{Area, Instance, Solution};
use crate::recreate::{recreate, RecreateParams};
use crate::ruin::{ruin, UNLIMITED_AREA};
use crate::SolverRng;

/// Reference duration the history-length tiers were tuned for.
const REFERENCE_TIME_LIMIT: Duration = Duration::from_secs(600);

/// All knobs of one search run.
#[derive(Debug, Clone)]
pub struct SearchParams {
    /// Leftover value exponent.
    pub value_power: f64,
    /// Blink probability in [0, 1).
    pub blink_rate: f64,
    /// Average number of nodes removed per ruin.
    pub mean_removals: u32,
    /// Length of the late-acceptance history ring.
    pub history_length: usize,
    pub time_limit: Duration,
    pub seed: u64,
    /// Optional hard cap on ruin-recreate iterations (deterministic runs).
    pub iteration_limit: Option<u64>,
    /// Stop as soon as a complete solution with at most this bin area is
    /// found (e.g. a known optimum).
    pub target_area: Option<Area>,
    /// Open new bins that cannot host the trigger item (literal rebuild
    /// rule) instead of requiring a fit.
    pub open_unfitting_bins: bool,
}

impl SearchParams {
    /// Parameters auto-tiered by the instance's item-copy count, with the
    /// history length scaled to the time limit.
    pub fn auto(instance: &Instance, time_limit: Duration) -> Self {
        let n = instance.total_copies();
        SearchParams {
            value_power: 1.2,
            blink_rate: 0.05,
            mean_removals: auto_mean_removals(n),
            history_length: scale_history_length(auto_history_length(n), time_limit),
            time_limit,
            seed: 0,
            iteration_limit: None,
            target_area: None,
            open_unfitting_bins: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn recreate_params(&self) -> RecreateParams {
        RecreateParams {
            value_power: self.value_power,
            blink_rate: self.blink_rate,
            open_unfitting_bins: self.open_unfitting_bins,
        }
    }
}

/// History-length tier by item-copy count.
pub fn auto_history_length(copies: u32) -> usize {
    match copies {
        0..=100 => 2000,
        101..=300 => 1000,
        _ => 500,
    }
}

/// Mean-removals tier by item-copy count.
pub fn auto_mean_removals(copies: u32) -> u32 {
    match copies {
        0..=100 => 8,
        101..=300 => 6,
        _ => 4,
    }
}

/// Scales a tiered history length proportionally to the time limit,
/// rounding up, never below 50.
pub fn scale_history_length(base: usize, time_limit: Duration) -> usize {
    if time_limit == REFERENCE_TIME_LIMIT {
        return base;
    }
    let scaled = (base as f64 * time_limit.as_secs_f64() / REFERENCE_TIME_LIMIT.as_secs_f64())
        .ceil() as usize;
    scaled.max(50)
}

/// Quality snapshot of a solution: excluded item area, with total leftover
/// value as tiebreaker. Total bin area is deliberately absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quality {
    pub excluded_area: Area,
    pub leftover_value: f64,
}

impl Quality {
    pub fn of(solution: &Solution, instance: &Instance, value_power: f64) -> Self {
        Quality {
            excluded_area: solution.excluded_area(instance),
            leftover_value: solution.leftover_value(value_power),
        }
    }
}

/// Less means the first snapshot is superior: it excludes less item area,
/// or excludes the same area while preserving more leftover value.
pub fn compare(a: &Quality, b: &Quality) -> Ordering {
    match a.excluded_area.cmp(&b.excluded_area) {
        Ordering::Equal => b
            .leftover_value
            .partial_cmp(&a.leftover_value)
            .unwrap_or(Ordering::Equal),
        unequal => unequal,
    }
}

/// Late-acceptance fitness ring with its acceptance counter. The head slot
/// is always `accepted mod len`; slots only ever improve.
#[derive(Debug, Clone)]
pub struct FitnessRing {
    slots: Vec<Quality>,
    accepted: u64,
}

impl FitnessRing {
    pub fn filled_with(quality: Quality, length: usize) -> Self {
        assert!(length >= 1);
        FitnessRing {
            slots: vec![quality; length],
            accepted: 0,
        }
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn head(&self) -> usize {
        (self.accepted % self.slots.len() as u64) as usize
    }

    pub fn head_quality(&self) -> Quality {
        self.slots[self.head()]
    }

    /// One acceptance decision. Accepts a candidate not worse than the head
    /// slot or not worse than the local optimum; stores it in the head slot
    /// only when strictly better than it; advances the counter only on
    /// acceptance. The caller promotes the candidate to local optimum when
    /// this returns true.
    pub fn step(&mut self, candidate: Quality, local_optimum: Quality) -> bool {
        let v = self.head();
        let vs_slot = compare(&candidate, &self.slots[v]);
        let accepted = vs_slot != Ordering::Greater
            || compare(&candidate, &local_optimum) != Ordering::Greater;
        if accepted {
            if vs_slot == Ordering::Less {
                self.slots[v] = candidate;
            }
            self.accepted += 1;
        }
        accepted
    }
}

/// Events emitted by a search loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchEvent {
    /// The bin-area limit was actually lowered (by this worker).
    GoalLowered { limit: Area, elapsed: Duration },
    /// A complete solution was recorded as the new best.
    NewBest {
        area: Area,
        utilization: f64,
        elapsed: Duration,
    },
    /// One ruin-recreate iteration finished.
    Iteration { accepted: bool },
    /// The loop stopped.
    Finished {
        iterations: u64,
        accepted: u64,
        elapsed: Duration,
    },
}

/// Source of the bin-area limit. Single-threaded runs own a local cell;
/// parallel runs share one handle across workers.
pub trait GoalHandle {
    fn current(&self) -> Area;
    /// Lowers the limit if `new` is strictly smaller. True when this call
    /// performed the lowering.
    fn lower(&self, new: Area) -> bool;
}

/// Goal owned by a single search loop.
pub struct LocalGoal(Cell<Area>);

impl LocalGoal {
    pub fn new(limit: Area) -> Self {
        LocalGoal(Cell::new(limit))
    }
}

impl GoalHandle for LocalGoal {
    fn current(&self) -> Area {
        self.0.get()
    }

    fn lower(&self, new: Area) -> bool {
        if new < self.0.get() {
            self.0.set(new);
            true
        } else {
            false
        }
    }
}

/// Outcome of one worker's loop.
#[derive(Debug)]
pub struct WorkerOutcome {
    pub best: Option<Solution>,
    pub iterations: u64,
    pub accepted: u64,
    pub time_to_best: Option<Duration>,
}

/// The goal-driven loop, runnable standalone or as one worker of a pool.
///
/// Starts from the empty solution under the goal handle's current limit
/// (normally unlimited) and runs until the deadline, iteration cap, target
/// area, or shared stop flag fires. Reaching the target area raises the
/// stop flag so sibling workers wind down too. Every complete solution
/// found is offered to `publish`; the returned best is this worker's own.
#[allow(clippy::too_many_arguments)]
pub fn run_worker(
    instance: &Instance,
    params: &SearchParams,
    rng: &mut SolverRng,
    goal: &dyn GoalHandle,
    stop: &AtomicBool,
    started: Instant,
    deadline: Option<Instant>,
    publish: &mut dyn FnMut(&Solution),
    events: &mut dyn FnMut(SearchEvent),
) -> WorkerOutcome {
    assert!(params.value_power > 0.0, "value exponent must be positive");
    assert!(
        (0.0..1.0).contains(&params.blink_rate),
        "blink rate must lie in [0, 1)"
    );
    assert!(params.history_length >= 1, "history length must be >= 1");
    let recreate_params = params.recreate_params();
    let mut area_limit = goal.current();

    let mut local = Solution::empty(instance);
    let mut local_quality = Quality::of(&local, instance, params.value_power);
    let mut ring = FitnessRing::filled_with(local_quality, params.history_length);

    let mut best: Option<Solution> = None;
    let mut time_to_best = None;
    let mut iterations = 0u64;
    let mut total_accepted = 0u64;

    loop {
        if stop.load(AtomicOrdering::Relaxed) {
            break;
        }
        if let Some(deadline) = deadline {
            if Instant::now() >= deadline {
                break;
            }
        }
        if let Some(cap) = params.iteration_limit {
            if iterations >= cap {
                break;
            }
        }

        // adopt an externally lowered limit before ruining
        let shared = goal.current();
        if shared < area_limit {
            area_limit = shared;
            if local.total_bin_area() >= area_limit {
                ruin(&mut local, area_limit, 0, rng);
            }
            local_quality = Quality::of(&local, instance, params.value_power);
            ring = FitnessRing::filled_with(local_quality, params.history_length);
        }

        let mut candidate = local.clone();
        ruin(&mut candidate, area_limit, params.mean_removals, rng);
        recreate(&mut candidate, instance, area_limit, &recreate_params, rng);
        let candidate_quality = Quality::of(&candidate, instance, params.value_power);

        let accepted = ring.step(candidate_quality, local_quality);
        if accepted {
            local = candidate;
            local_quality = candidate_quality;
            total_accepted += 1;
        }
        events(SearchEvent::Iteration { accepted });
        iterations += 1;

        if local.is_feasible() {
            let area = local.total_bin_area();
            let elapsed = started.elapsed();
            debug_assert!(crate::model::validate(instance, &local).is_ok());
            best = Some(local.clone());
            time_to_best = Some(elapsed);
            publish(&local);
            events(SearchEvent::NewBest {
                area,
                utilization: local.utilization().unwrap_or(0.0),
                elapsed,
            });
            if goal.lower(area) {
                events(SearchEvent::GoalLowered {
                    limit: area,
                    elapsed,
                });
            }
            area_limit = goal.current();
            if params.target_area.is_some_and(|t| area <= t) {
                stop.store(true, AtomicOrdering::Relaxed);
                break;
            }

            // restart towards the next goal from the ruined best
            ruin(&mut local, area_limit, 0, rng);
            local_quality = Quality::of(&local, instance, params.value_power);
            ring = FitnessRing::filled_with(local_quality, params.history_length);
        }
    }

    events(SearchEvent::Finished {
        iterations,
        accepted: total_accepted,
        elapsed: started.elapsed(),
    });
    WorkerOutcome {
        best,
        iterations,
        accepted: total_accepted,
        time_to_best,
    }
}

/// Single-threaded goal-driven search over `instance`, from scratch.
pub fn gdrr(
    instance: &Instance,
    params: &SearchParams,
    events: &mut dyn FnMut(SearchEvent),
) -> WorkerOutcome {
    let goal = LocalGoal::new(UNLIMITED_AREA);
    let stop = AtomicBool::new(false);
    let mut rng = SolverRng::seed_from_u64(params.seed);
    let started = Instant::now();
    let deadline = if params.time_limit.is_zero() {
        None
    } else {
        Some(started + params.time_limit)
    };
    run_worker(
        instance,
        params,
        &mut rng,
        &goal,
        &stop,
        started,
        deadline,
        &mut |_| {},
        events,
    )
}

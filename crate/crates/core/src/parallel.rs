//! Multi-worker orchestration.
//!
//! Workers run independent search loops over disjoint RNG streams; the only
//! shared state is one monotonically decreasing bin-area limit and a guarded
//! best-solution store. Solutions are never exchanged between workers.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use thiserror::Error;

use crate::model::{Area, Instance, Solution};
use crate::ruin::UNLIMITED_AREA;
use crate::search::{run_worker, GoalHandle, SearchEvent, SearchParams};
use crate::SolverRng;

/// One bin-area limit shared by all workers. Lowering is a single atomic
/// min, so no update can be lost under any interleaving.
#[derive(Debug)]
pub struct SharedGoal {
    limit: AtomicU64,
    revision: AtomicU64,
}

impl SharedGoal {
    pub fn new(limit: Area) -> Self {
        SharedGoal {
            limit: AtomicU64::new(limit),
            revision: AtomicU64::new(0),
        }
    }

    pub fn unlimited() -> Self {
        Self::new(UNLIMITED_AREA)
    }

    /// Number of successful lowerings so far.
    pub fn revision(&self) -> u64 {
        self.revision.load(Ordering::Acquire)
    }
}

impl GoalHandle for SharedGoal {
    fn current(&self) -> Area {
        self.limit.load(Ordering::Acquire)
    }

    fn lower(&self, new: Area) -> bool {
        let previous = self.limit.fetch_min(new, Ordering::AcqRel);
        if new < previous {
            self.revision.fetch_add(1, Ordering::AcqRel);
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("no feasible solution found: {cause}")]
    NoFeasibleSolution { cause: String },
}

/// Counters reported by each worker.
#[derive(Debug, Clone, Copy, Default)]
pub struct WorkerStats {
    pub iterations: u64,
    pub accepted: u64,
    pub published: u64,
}

/// Result of a parallel run.
#[derive(Debug)]
pub struct RunOutcome {
    pub best: Solution,
    pub best_area: Area,
    pub best_worker: usize,
    pub time_to_best: Duration,
    pub workers: Vec<WorkerStats>,
}

struct BestStore {
    slot: Mutex<Option<(Area, usize, Duration, Solution)>>,
}

impl BestStore {
    fn new() -> Self {
        BestStore {
            slot: Mutex::new(None),
        }
    }

    /// Replaces the stored solution only when strictly better.
    fn offer(&self, area: Area, worker: usize, elapsed: Duration, solution: &Solution) {
        let mut slot = self.slot.lock().unwrap();
        let better = match &*slot {
            Some((best_area, ..)) => area < *best_area,
            None => true,
        };
        if better {
            *slot = Some((area, worker, elapsed, solution.clone()));
        }
    }
}

/// Runs `workers` independent search loops against one shared limit and
/// returns the globally best complete solution. Worker `w` is seeded with
/// `params.seed + w`; a single worker reproduces the single-threaded search
/// exactly.
pub fn run_parallel(
    instance: &Instance,
    params: &SearchParams,
    workers: usize,
    on_event: &(dyn Fn(usize, &SearchEvent) + Sync),
) -> Result<RunOutcome, SolveError> {
    assert!(workers >= 1, "at least one worker required");
    let goal = SharedGoal::unlimited();
    let stop = AtomicBool::new(false);
    let store = BestStore::new();
    let started = Instant::now();
    let deadline = if params.time_limit.is_zero() {
        None
    } else {
        Some(started + params.time_limit)
    };

    let mut stats = vec![WorkerStats::default(); workers];
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for worker in 0..workers {
            let goal = &goal;
            let stop = &stop;
            let store = &store;
            let params = params.clone();
            handles.push(scope.spawn(move || {
                let mut rng = SolverRng::seed_from_u64(params.seed.wrapping_add(worker as u64));
                let mut published = 0u64;
                let mut publish = |solution: &Solution| {
                    published += 1;
                    store.offer(
                        solution.total_bin_area(),
                        worker,
                        started.elapsed(),
                        solution,
                    );
                };
                let mut events = |ev: SearchEvent| on_event(worker, &ev);
                let outcome = run_worker(
                    instance,
                    &params,
                    &mut rng,
                    goal,
                    stop,
                    started,
                    deadline,
                    &mut publish,
                    &mut events,
                );
                WorkerStats {
                    iterations: outcome.iterations,
                    accepted: outcome.accepted,
                    published,
                }
            }));
        }
        for (worker, handle) in handles.into_iter().enumerate() {
            stats[worker] = handle.join().expect("worker panicked");
        }
    });

    let slot = store.slot.into_inner().unwrap();
    match slot {
        Some((best_area, best_worker, time_to_best, best)) => Ok(RunOutcome {
            best,
            best_area,
            best_worker,
            time_to_best,
            workers: stats,
        }),
        None => Err(SolveError::NoFeasibleSolution {
            cause: infeasibility_cause(instance),
        }),
    }
}

fn infeasibility_cause(instance: &Instance) -> String {
    let available: Option<Area> = instance
        .bins()
        .iter()
        .map(|b| b.quantity.map(|q| b.area() * q as Area))
        .sum();
    match available {
        Some(total) if total < instance.total_item_area() => format!(
            "the bin set is exhausted: {} total bin area available, {} item area demanded",
            total,
            instance.total_item_area()
        ),
        _ => "the time budget ran out before any complete packing was built".to_string(),
    }
}

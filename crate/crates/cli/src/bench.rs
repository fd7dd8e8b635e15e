//! Benchmark harness: runs the solver over a directory of instance files
//! and assembles a tabular report.

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use anyhow::{Context, Result};

use gdrr::parallel::run_parallel;
use gdrr::search::SearchEvent;

use crate::formats::{parse_instance, InstanceFormat};
use crate::params::{build_params, ParamOverrides};
use crate::report::{group_key, InstanceRow, RunReport};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub rotation_override: Option<bool>,
    pub time_limit: Duration,
    /// Worker counts to sweep; one pass over the directory per entry.
    pub threads: Vec<usize>,
    /// Seeds to sweep; one run per (instance, threads, seed).
    pub seeds: Vec<u64>,
    pub overrides: ParamOverrides,
}

/// Instance files under `dir` (non-recursive), sorted by name.
pub fn instance_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("cannot read instance directory {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("txt" | "json" | "ins" | "bpp" | "2bp")
                )
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every instance in `dir` for every (threads, seed) combination.
/// Per-instance failures are recorded as rows and the run continues.
pub fn bench(
    dir: &Path,
    config: &BenchConfig,
    mut progress: impl FnMut(&InstanceRow),
) -> Result<RunReport> {
    let files = instance_files(dir)?;
    anyhow::ensure!(
        !files.is_empty(),
        "no instance files found in {}",
        dir.display()
    );
    let mut report = RunReport::default();
    for &threads in &config.threads {
        for path in &files {
            for &seed in &config.seeds {
                let row = run_one(path, config, threads, seed);
                progress(&row);
                report.rows.push(row);
            }
        }
    }
    Ok(report)
}

fn run_one(path: &Path, config: &BenchConfig, threads: usize, seed: u64) -> InstanceRow {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut row = InstanceRow {
        instance: stem.clone(),
        class: stem.clone(),
        n_copies: 0,
        threads,
        seed,
        time_limit_s: config.time_limit.as_secs_f64(),
        status: "ok".into(),
        best_area: 0,
        bins_used: 0,
        utilization: 0.0,
        time_to_best_ms: 0,
        iterations: 0,
        bins_by_type: String::new(),
        goal_trace: String::new(),
        params: String::new(),
    };

    let named = match std::fs::read(path).map_err(anyhow::Error::from).and_then(|bytes| {
        let format = InstanceFormat::detect(&path.to_string_lossy(), &bytes);
        parse_instance(
            &bytes,
            format,
            &path.to_string_lossy(),
            config.rotation_override,
        )
        .map_err(anyhow::Error::from)
    }) {
        Ok(named) => named,
        Err(err) => {
            row.status = format!("error: {err}");
            return row;
        }
    };

    row.n_copies = named.instance.total_copies();
    let (class, n) = group_key(&stem, named.instance.total_copies());
    row.class = class;
    row.n_copies = n;

    let params = build_params(&named.instance, config.time_limit, seed, &config.overrides);
    row.params = format!(
        "alpha={};beta={};mu={};lh={}",
        params.value_power, params.blink_rate, params.mean_removals, params.history_length
    );
    let goal_trace: Mutex<Vec<u64>> = Mutex::new(Vec::new());
    let result = run_parallel(&named.instance, &params, threads, &|_, event| {
        if let SearchEvent::GoalLowered { limit, .. } = event {
            goal_trace.lock().unwrap().push(*limit);
        }
    });
    match result {
        Ok(outcome) => {
            row.best_area = outcome.best_area;
            row.bins_used = outcome.best.patterns().len() as u32;
            row.utilization = outcome.best.utilization().unwrap_or(0.0);
            row.time_to_best_ms = outcome.time_to_best.as_millis() as u64;
            row.iterations = outcome.workers.iter().map(|w| w.iterations).sum();
            let mut by_type: std::collections::BTreeMap<u32, u32> = Default::default();
            for pattern in outcome.best.patterns() {
                *by_type.entry(pattern.bin.0).or_insert(0) += 1;
            }
            row.bins_by_type = by_type
                .iter()
                .map(|(bin, count)| format!("{bin}:{count}"))
                .collect::<Vec<_>>()
                .join(";");
            row.goal_trace = goal_trace
                .into_inner()
                .unwrap()
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(";");
        }
        Err(err) => {
            row.status = format!("error: {err}");
        }
    }
    row
}

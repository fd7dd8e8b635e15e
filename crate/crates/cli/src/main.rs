use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gdrr::model::validate;
use gdrr::oracle::{exact_min_area, OracleBudget};
use gdrr::parallel::run_parallel;
use gdrr::search::SearchEvent;

use gdrr_cli::bench::{bench, BenchConfig};
use gdrr_cli::formats::{
    parse_instance, read_solution, write_solution, InstanceFormat, NamedInstance, RunMeta,
};
use gdrr_cli::generate::{generate_class, GenSpec};
use gdrr_cli::params::{build_params, check_overrides, ParamOverrides};
use gdrr_cli::svg::render_solution;

/// Goal-driven ruin-and-recreate solver for 2D guillotine bin packing.
#[derive(Parser)]
#[command(name = "gdrr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Run the solver over a directory of instances and report aggregates.
    Bench(BenchArgs),
    /// Check a solution file against its instance.
    Validate(ValidateArgs),
    /// Exactly solve a tiny instance by exhaustive search.
    Oracle(OracleArgs),
    /// Generate class-shaped random instances.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    /// Fixed orientation.
    O,
    /// 90-degree rotation allowed.
    R,
}

#[derive(Args)]
struct CommonSolveArgs {
    /// Instance file format (auto-detected by default).
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    /// Orientation variant; overrides the instance file.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Wall-clock budget in seconds; 0 disables the time stop.
    #[arg(long, default_value_t = 600.0)]
    time_limit: f64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Base RNG seed; worker w uses seed + w.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leftover value exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Blink rate in [0, 1).
    #[arg(long)]
    beta: Option<f64>,
    /// Average nodes removed per ruin.
    #[arg(long)]
    mu: Option<u32>,
    /// Late-acceptance history length (default: tier by item count).
    #[arg(long)]
    history_length: Option<usize>,
    /// Keep the tiered history length even when the time limit differs
    /// from the 600 s reference.
    #[arg(long)]
    no_history_scaling: bool,
    /// Open new bins purely by area budget, even when the triggering item
    /// cannot fit inside them.
    #[arg(long)]
    paper_strict_bin_open: bool,
}

impl CommonSolveArgs {
    fn rotation_override(&self) -> Option<bool> {
        self.variant.map(|v| matches!(v, VariantArg::R))
    }

    fn overrides(&self) -> ParamOverrides {
        ParamOverrides {
            value_power: self.alpha,
            blink_rate: self.beta,
            mean_removals: self.mu,
            history_length: self.history_length,
            no_history_scaling: self.no_history_scaling,
            paper_strict_bin_open: self.paper_strict_bin_open,
            iteration_limit: None,
            target_area: None,
        }
    }

    fn time_limit(&self) -> Duration {
        Duration::from_secs_f64(self.time_limit.max(0.0))
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    common: CommonSolveArgs,
    /// Stop after this many ruin-recreate iterations per worker.
    #[arg(long)]
    iterations: Option<u64>,
    /// Stop as soon as a complete solution with at most this total bin
    /// area is found.
    #[arg(long)]
    target_area: Option<u64>,
    /// Write the best solution to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Render one SVG per pattern into this directory.
    #[arg(long)]
    svg_dir: Option<PathBuf>,
    /// Suppress machine-readable progress records on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of instance files.
    #[arg(long)]
    dir: PathBuf,
    #[command(flatten)]
    common: CommonSolveArgs,
    /// Comma-separated worker counts to sweep, e.g. "1,2,4,8".
    #[arg(long = "thread-sweep")]
    thread_sweep: Option<String>,
    /// Comma-separated seeds; each instance runs once per seed.
    #[arg(long)]
    seeds: Option<String>,
    /// Write report.csv and groups.csv here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Solution file produced by `solve --out`.
    #[arg(long)]
    solution: PathBuf,
    /// Instance file format (auto-detected by default).
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    /// Orientation variant; must match the one used when solving.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Instance file format (auto-detected by default).
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    /// Orientation variant; overrides the instance file.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Copy-count cap.
    #[arg(long, default_value_t = 6)]
    max_copies: u32,
    /// Write the witness solution to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Class number, 1 through 10.
    #[arg(long)]
    class: u32,
    /// Items per instance.
    #[arg(long)]
    items: u32,
    /// Instances to generate.
    #[arg(long, default_value_t = 10)]
    count: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn load_instance(
    path: &Path,
    format: FormatArg,
    rotation_override: Option<bool>,
) -> Result<NamedInstance> {
    let bytes =
        std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let format = match format {
        FormatArg::Json => InstanceFormat::Canonical,
        FormatArg::Text => InstanceFormat::PlainText,
        FormatArg::Auto => InstanceFormat::detect(&path.to_string_lossy(), &bytes),
    };
    Ok(parse_instance(
        &bytes,
        format,
        &path.to_string_lossy(),
        rotation_override,
    )?)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let named = load_instance(
        &args.instance,
        args.common.format,
        args.common.rotation_override(),
    )?;
    let mut overrides = args.common.overrides();
    overrides.iteration_limit = args.iterations;
    overrides.target_area = args.target_area;
    check_overrides(&overrides).map_err(|m| anyhow::anyhow!(m))?;
    let time_limit = args.common.time_limit();
    let params = build_params(&named.instance, time_limit, args.common.seed, &overrides);

    let stderr = Mutex::new(std::io::stderr());
    let quiet = args.quiet;
    let outcome = run_parallel(
        &named.instance,
        &params,
        args.common.threads,
        &|worker, event| {
            if quiet {
                return;
            }
            let record = match event {
                SearchEvent::GoalLowered { limit, elapsed } => serde_json::json!({
                    "event": "goal_lowered", "worker": worker,
                    "limit": limit, "elapsed_ms": elapsed.as_millis() as u64,
                }),
                SearchEvent::NewBest {
                    area,
                    utilization,
                    elapsed,
                } => serde_json::json!({
                    "event": "new_best", "worker": worker, "area": area,
                    "utilization": utilization,
                    "elapsed_ms": elapsed.as_millis() as u64,
                }),
                SearchEvent::Finished {
                    iterations,
                    accepted,
                    elapsed,
                } => serde_json::json!({
                    "event": "worker_finished", "worker": worker,
                    "iterations": iterations, "accepted": accepted,
                    "elapsed_ms": elapsed.as_millis() as u64,
                }),
                SearchEvent::Iteration { .. } => return,
            };
            let mut err = stderr.lock().unwrap();
            let _ = writeln!(err, "{record}");
        },
    )?;

    let report = validate(&named.instance, &outcome.best);
    anyhow::ensure!(report.is_ok(), "solver produced an invalid solution:\n{report}");

    let meta = RunMeta {
        seed: params.seed,
        threads: args.common.threads,
        value_power: params.value_power,
        blink_rate: params.blink_rate,
        mean_removals: params.mean_removals,
        history_length: params.history_length,
        time_limit_s: time_limit.as_secs_f64(),
        iteration_limit: params.iteration_limit,
    };
    if let Some(out) = &args.out {
        let text = write_solution(&outcome.best, &named, &meta)?;
        std::fs::write(out, text).with_context(|| format!("cannot write {}", out.display()))?;
    }
    if let Some(svg_dir) = &args.svg_dir {
        std::fs::create_dir_all(svg_dir)
            .with_context(|| format!("cannot create {}", svg_dir.display()))?;
        for (name, body) in render_solution(&outcome.best) {
            std::fs::write(svg_dir.join(&name), body)?;
        }
    }

    let total_iterations: u64 = outcome.workers.iter().map(|w| w.iterations).sum();
    println!("instance     : {}", named.name);
    println!(
        "variant      : {}",
        if named.instance.rotation_allowed() {
            "rotation allowed"
        } else {
            "fixed orientation"
        }
    );
    println!(
        "threads/seed : {} / {}",
        args.common.threads, args.common.seed
    );
    println!(
        "best area    : {} ({} bins)",
        outcome.best_area,
        outcome.best.patterns().len()
    );
    println!(
        "utilization  : {:.2}%",
        outcome.best.utilization().unwrap_or(0.0)
    );
    println!(
        "time to best : {:.3}s (worker {})",
        outcome.time_to_best.as_secs_f64(),
        outcome.best_worker
    );
    println!("iterations   : {total_iterations}");
    Ok(ExitCode::SUCCESS)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<T>()
                .map_err(|_| anyhow::anyhow!("invalid {what} entry {part:?}"))
        })
        .collect()
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let threads = match &args.thread_sweep {
        Some(list) => parse_list(list, "thread count")?,
        None => vec![args.common.threads],
    };
    let seeds = match &args.seeds {
        Some(list) => parse_list(list, "seed")?,
        None => vec![args.common.seed],
    };
    check_overrides(&args.common.overrides()).map_err(|m| anyhow::anyhow!(m))?;
    let config = BenchConfig {
        rotation_override: args.common.rotation_override(),
        time_limit: args.common.time_limit(),
        threads,
        seeds,
        overrides: args.common.overrides(),
    };
    let report = bench(&args.dir, &config, |row| {
        let record = serde_json::json!({
            "event": "instance_done", "instance": row.instance, "threads": row.threads,
            "seed": row.seed, "status": row.status, "best_area": row.best_area,
            "bins": row.bins_used, "utilization": row.utilization,
            "time_to_best_ms": row.time_to_best_ms,
        });
        eprintln!("{record}");
    })?;

    print!("{}", report.group_table());
    if let Some(out_dir) = &args.out_dir {
        std::fs::create_dir_all(out_dir)?;
        std::fs::write(out_dir.join("report.csv"), report.rows_csv())?;
        std::fs::write(out_dir.join("groups.csv"), report.groups_csv())?;
    }
    let failed = report.rows.iter().filter(|r| r.status != "ok").count();
    if failed > 0 {
        eprintln!("{failed} instance run(s) failed; see the report rows");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode> {
    let named = load_instance(
        &args.instance,
        args.format,
        args.variant.map(|v| matches!(v, VariantArg::R)),
    )?;
    let bytes = std::fs::read(&args.solution)
        .with_context(|| format!("cannot read {}", args.solution.display()))?;
    match read_solution(&bytes, &named) {
        Ok(solution) => {
            let report = validate(&named.instance, &solution);
            if report.is_ok() {
                println!(
                    "ok: {} patterns, area {}, utilization {:.2}%, {} excluded",
                    solution.patterns().len(),
                    solution.total_bin_area(),
                    solution.utilization().unwrap_or(0.0),
                    solution.excluded().len()
                );
                Ok(ExitCode::SUCCESS)
            } else {
                print!("{report}");
                Ok(ExitCode::FAILURE)
            }
        }
        Err(err) => {
            eprintln!("invalid solution file: {err}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<ExitCode> {
    let named = load_instance(
        &args.instance,
        args.format,
        args.variant.map(|v| matches!(v, VariantArg::R)),
    )?;
    let budget = OracleBudget {
        max_copies: args.max_copies,
        ..OracleBudget::default()
    };
    let (area, witness) = exact_min_area(&named.instance, &budget)?;
    println!("optimal total bin area: {area}");
    let mut counts: std::collections::BTreeMap<u32, u32> = Default::default();
    for pattern in witness.patterns() {
        *counts.entry(pattern.bin.0).or_insert(0) += 1;
    }
    for (bin, count) in counts {
        let spec = named.instance.bins().iter().find(|b| b.id.0 == bin).unwrap();
        println!("  bin type {bin} ({}x{}): {count}", spec.width, spec.height);
    }
    if let Some(out) = &args.out {
        let meta = RunMeta {
            threads: 1,
            ..RunMeta::default()
        };
        std::fs::write(out, write_solution(&witness, &named, &meta)?)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let files = generate_class(
        &GenSpec {
            class: args.class,
            items: args.items,
            count: args.count,
            seed: args.seed,
        },
        &args.out_dir,
    )?;
    println!("wrote {} instance files to {}", files.len(), args.out_dir.display());
    Ok(ExitCode::SUCCESS)
}

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tune_core::baselines::Strategy;
use tune_core::execution::{SubprocessExecutor, WorkloadTrace, DEFAULT_INTERVAL_S};
use tune_core::harness::{
    constraint_from_percentile, generate_trace, oracle_optimum, run_cell, run_plan, timing_path,
    write_results, write_timing, Cell, ExperimentPlan, ResultRow, SyntheticParams,
};
use tune_core::optimizer::{run_search, Problem, ProblemKind, SearchOptions};
use tune_core::space::ConfigSpace;

#[derive(Debug, Parser)]
#[command(
    name = "tune",
    version,
    about = "Configuration autotuner with predictive early termination"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Runs one search against a recorded trace in virtual time.
    Run(RunArgs),
    /// Runs every cell of an experiment plan.
    Sweep {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prints the constraint and the brute-force optimum of a trace.
    Oracle {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        problem: ProblemKind,
        #[arg(long)]
        percentile: f64,
    },
    /// Writes a seeded synthetic trace.
    GenTrace {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        rows: usize,
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Runs one search against a real workload command, in wall-clock time.
    Exec(ExecArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Space definition; the built-in space when omitted.
    #[arg(long)]
    space: Option<PathBuf>,
    #[arg(long)]
    problem: ProblemKind,
    #[arg(long)]
    method: Strategy,
    /// Constraint percentile over the trace.
    #[arg(long)]
    percentile: f64,
    /// Budget in seconds; ten times the median trace latency when omitted.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_INTERVAL_S)]
    interval: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Per-round search log as JSON lines.
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExecArgs {
    #[arg(long)]
    space: Option<PathBuf>,
    #[arg(long)]
    problem: ProblemKind,
    #[arg(long)]
    method: Strategy,
    /// Constraint bound, in watts for `lup` and seconds for `eul`.
    #[arg(long)]
    constraint: f64,
    #[arg(long)]
    budget: f64,
    #[arg(long, default_value_t = DEFAULT_INTERVAL_S)]
    interval: f64,
    #[arg(long, default_value_t = 200)]
    pool_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for per-run metrics files.
    #[arg(long, default_value = "tune-runs")]
    workdir: PathBuf,
    #[arg(long)]
    history: Option<PathBuf>,
    /// Workload command and its arguments.
    #[arg(last = true, required = true)]
    command: Vec<String>,
}

fn load_space(path: Option<&Path>) -> Result<ConfigSpace> {
    match path {
        Some(p) => ConfigSpace::load(p).with_context(|| format!("loading space {}", p.display())),
        None => Ok(ConfigSpace::builtin_spark()),
    }
}

fn load_trace(space: ConfigSpace, path: &Path) -> Result<WorkloadTrace> {
    WorkloadTrace::load(space, path).with_context(|| format!("loading trace {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn save_results(out: &Path, metadata: &str, rows: &[ResultRow]) -> Result<()> {
    let mut w = create(out)?;
    write_results(&mut w, metadata, rows)?;
    w.flush()?;
    let timing = timing_path(out);
    let mut w = create(&timing)?;
    write_timing(&mut w, rows)?;
    w.flush()?;
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let space = load_space(args.space.as_deref())?;
    let trace = load_trace(space, &args.trace)?;
    let budget = args.budget.unwrap_or_else(|| 10.0 * trace.median_latency());
    let workload = args
        .trace
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let cell = Cell {
        workload,
        kind: args.problem,
        method: args.method,
        percentile: args.percentile,
        budget_s: budget,
        seed: args.seed,
    };
    let (row, result) = run_cell(&trace, &cell, args.interval, &SearchOptions::default())?;
    let metadata = format!(
        "tune run; trace={}; problem={}; method={}; percentile={}; budget={}; interval={}; seed={}",
        file_label(&args.trace),
        args.problem,
        args.method,
        args.percentile,
        budget,
        args.interval,
        args.seed
    );
    save_results(&args.out, &metadata, std::slice::from_ref(&row))?;
    if let Some(h) = &args.history {
        std::fs::write(h, result.history_jsonl()).with_context(|| format!("writing {}", h.display()))?;
    }
    eprintln!(
        "{}: best {} after {} completed and {} terminated samples",
        args.method,
        row.best_value.map_or("none".to_string(), |v| v.to_string()),
        row.samples_completed,
        row.samples_terminated
    );
    Ok(())
}

fn sweep(plan_path: &Path, out: &Path) -> Result<()> {
    let plan =
        ExperimentPlan::load(plan_path).with_context(|| format!("loading plan {}", plan_path.display()))?;
    let rows = run_plan(&plan)?;
    let methods: Vec<&str> = plan.methods.iter().map(|m| m.name()).collect();
    let metadata = format!(
        "tune sweep; plan={}; methods={}; seeds={}; interval={}",
        file_label(plan_path),
        methods.join(" "),
        plan.seeds.len(),
        plan.interval
    );
    save_results(out, &metadata, &rows)?;
    eprintln!("{} cells written to {}", rows.len(), out.display());
    Ok(())
}

fn oracle(trace: &Path, space: Option<&Path>, problem: ProblemKind, pct: f64) -> Result<()> {
    let trace = load_trace(load_space(space)?, trace)?;
    let constraint = constraint_from_percentile(&trace, problem, pct)?;
    println!("constraint {constraint}");
    match oracle_optimum(&trace, problem, constraint) {
        Some((value, row)) => {
            let config: Vec<String> = trace.rows()[row]
                .config
                .values
                .iter()
                .map(|v| v.to_string())
                .collect();
            println!("optimum {value}");
            println!("row {row}");
            println!("config {}", config.join(","));
        }
        None => println!("optimum none"),
    }
    Ok(())
}

fn gen_trace(seed: u64, rows: usize, space: Option<&Path>, out: &Path) -> Result<()> {
    let space = load_space(space)?;
    let params = SyntheticParams {
        rows,
        ..Default::default()
    };
    let trace = generate_trace(&space, &params, seed)?;
    trace.save(out)?;
    Ok(())
}

fn exec(args: ExecArgs) -> Result<()> {
    let space = load_space(args.space.as_deref())?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let pool = space.candidate_pool(args.pool_size, &mut rng)?;
    let problem = Problem::new(args.problem, args.constraint, args.budget)?;
    let mut executor = SubprocessExecutor::new(&args.command, space.clone(), args.interval, args.workdir)?;
    let options = SearchOptions {
        seed: args.seed,
        ..Default::default()
    };
    let result = run_search(&problem, &space, &pool, &mut executor, args.method, &options)?;
    if let Some(h) = &args.history {
        std::fs::write(h, result.history_jsonl()).with_context(|| format!("writing {}", h.display()))?;
    }
    match &result.best_config {
        Some(c) => {
            println!("best {}", result.best_value.unwrap_or(f64::NAN));
            for (name, v) in space.names().zip(&c.values) {
                println!("{name} = {v}");
            }
        }
        None => println!("best none"),
    }
    println!(
        "samples {} completed, {} terminated; overhead {:.3} s",
        result.samples_completed, result.samples_terminated, result.overhead_s
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Sweep { plan, out } => sweep(&plan, &out),
        Command::Oracle {
            trace,
            space,
            problem,
            percentile,
        } => oracle(&trace, space.as_deref(), problem, percentile),
        Command::GenTrace {
            seed,
            rows,
            space,
            out,
        } => {
            if rows == 0 {
                Err(anyhow::anyhow!("--rows must be positive"))
            } else {
                gen_trace(seed, rows, space.as_deref(), &out)
            }
        }
        Command::Exec(args) => {
            if args.command.is_empty() {
                Err(anyhow::anyhow!("missing workload command"))
            } else {
                exec(args)
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("tune").chain(args.iter().copied()))
    }

    #[test]
    fn run_flags_and_defaults() {
        let cli = parse(&[
            "run",
            "--trace",
            "t.csv",
            "--problem",
            "eul",
            "--method",
            "bo-tc",
            "--percentile",
            "50",
            "--out",
            "r.csv",
        ])
        .unwrap();
        let Command::Run(args) = cli.command else {
            panic!("not a run command");
        };
        assert_eq!(args.problem, ProblemKind::EnergyUnderLatency);
        assert_eq!(args.method, Strategy::BoTc);
        assert_eq!(args.interval, DEFAULT_INTERVAL_S);
        assert_eq!(args.budget, None);
        assert!(parse(&[
            "run",
            "--trace",
            "t.csv",
            "--problem",
            "eul",
            "--method",
            "bo-im",
            "--percentile",
            "50",
            "--out",
            "r.csv"
        ])
        .is_err());
    }

    #[test]
    fn exec_takes_the_command_after_the_separator() {
        let cli = parse(&[
            "exec",
            "--problem",
            "lup",
            "--method",
            "cello",
            "--constraint",
            "200",
            "--budget",
            "60",
            "--",
            "sh",
            "-c",
            "true",
        ])
        .unwrap();
        let Command::Exec(args) = cli.command else {
            panic!("not an exec command");
        };
        assert_eq!(args.command, ["sh", "-c", "true"]);
        assert_eq!(args.pool_size, 200);
    }

    #[test]
    fn trace_oracle_and_run_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let trace = dir.path().join("w.csv");
        gen_trace(4, 60, None, &trace).unwrap();
        oracle(&trace, None, ProblemKind::LatencyUnderPower, 50.0).unwrap();
        let out = dir.path().join("r.csv");
        let history = dir.path().join("h.jsonl");
        run(RunArgs {
            trace: trace.clone(),
            space: None,
            problem: ProblemKind::LatencyUnderPower,
            method: Strategy::Cello,
            percentile: 50.0,
            budget: None,
            interval: DEFAULT_INTERVAL_S,
            seed: 2,
            out: out.clone(),
            history: Some(history.clone()),
        })
        .unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        let loaded = WorkloadTrace::load(ConfigSpace::builtin_spark(), &trace).unwrap();
        let budget = 10.0 * loaded.median_latency();
        assert!(text.starts_with(&format!(
            "# tune run; trace=w.csv; problem=lup; method=cello; percentile=50; budget={budget};"
        )));
        assert!(timing_path(&out).exists());
        let rounds = std::fs::read_to_string(&history).unwrap().lines().count();
        assert!(rounds >= 1);
    }

    #[test]
    fn missing_inputs_are_named() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.csv");
        let err = oracle(&missing, None, ProblemKind::LatencyUnderPower, 50.0).unwrap_err();
        assert!(format!("{err:#}").contains("nope.csv"));
        let err = sweep(&dir.path().join("plan.toml"), &dir.path().join("out.csv")).unwrap_err();
        assert!(format!("{err:#}").contains("plan.toml"));
    }
}

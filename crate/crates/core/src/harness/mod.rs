//! Experiment plumbing: constraints from trace percentiles, the brute-force
//! optimum, relative error, plan sweeps and the results file.

mod synthetic;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use synthetic::{generate_trace, unit_coordinate, SyntheticParams};

use crate::baselines::Strategy;
use crate::error::{Error, Result};
use crate::execution::{TraceSimulator, WorkloadTrace, DEFAULT_INTERVAL_S};
use crate::optimizer::{run_search, Problem, ProblemKind, SearchOptions, SearchResult};
use crate::seed::{hash_str, hash_words};
use crate::space::ConfigSpace;

/// Budgets used when a plan gives none, as multiples of the median latency.
pub const DEFAULT_BUDGET_MULTIPLIERS: [f64; 4] = [5.0, 10.0, 20.0, 40.0];

pub fn relative_error(value: f64, optimum: f64) -> Result<f64> {
    if optimum == 0.0 {
        return Err(Error::ZeroOptimum);
    }
    Ok((value - optimum).abs() / optimum.abs())
}

/// Percentile with linear interpolation between order statistics: rank
/// `pct/100 · (n-1)` into the sorted values.
pub fn percentile(values: &[f64], pct: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParam("percentile of no values".into()));
    }
    if !(0.0..=100.0).contains(&pct) {
        return Err(Error::InvalidParam(format!("percentile {pct} outside [0, 100]")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = pct / 100.0 * (v.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    Ok(v[lo] + (v[hi] - v[lo]) * (rank - lo as f64))
}

/// The problem's constraint metric over every trace row.
pub fn constraint_values(trace: &WorkloadTrace, kind: ProblemKind) -> Vec<f64> {
    trace
        .rows()
        .iter()
        .map(|r| kind.constraint_value(r.latency_s, r.energy_j))
        .collect()
}

pub fn constraint_from_percentile(trace: &WorkloadTrace, kind: ProblemKind, pct: f64) -> Result<f64> {
    percentile(&constraint_values(trace, kind), pct)
}

/// Best feasible objective over the whole trace and its row, if any row
/// is feasible. Ties keep the first row.
pub fn oracle_optimum(trace: &WorkloadTrace, kind: ProblemKind, constraint: f64) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, r) in trace.rows().iter().enumerate() {
        if kind.constraint_value(r.latency_s, r.energy_j) > constraint {
            continue;
        }
        let y = kind.objective_value(r.latency_s, r.energy_j);
        if best.is_none_or(|(b, _)| y < b) {
            best = Some((y, i));
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    /// Trace CSV files; relative paths resolve against the plan file.
    pub traces: Vec<PathBuf>,
    /// Space definition shared by all traces; the built-in space if absent.
    #[serde(default)]
    pub space: Option<PathBuf>,
    pub problems: Vec<ProblemKind>,
    pub percentiles: Vec<f64>,
    /// Budgets in seconds. When empty, each trace gets
    /// `budget_multipliers ×` its median latency.
    #[serde(default)]
    pub budgets: Vec<f64>,
    #[serde(default = "default_multipliers")]
    pub budget_multipliers: Vec<f64>,
    pub methods: Vec<Strategy>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_interval")]
    pub interval: f64,
}

fn default_multipliers() -> Vec<f64> {
    DEFAULT_BUDGET_MULTIPLIERS.to_vec()
}

fn default_interval() -> f64 {
    DEFAULT_INTERVAL_S
}

impl ExperimentPlan {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let plan: ExperimentPlan = toml::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<plan>"),
            msg: e.to_string(),
        })?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut plan = Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Parse {
                path: path.to_path_buf(),
                msg,
            },
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for t in plan.traces.iter_mut() {
            if t.is_relative() {
                *t = base.join(&*t);
            }
        }
        if let Some(s) = plan.space.as_mut() {
            if s.is_relative() {
                *s = base.join(&*s);
            }
        }
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParam(format!("plan: {msg}")));
        if self.traces.is_empty() {
            return bad("no traces");
        }
        if self.problems.is_empty() || self.methods.is_empty() {
            return bad("needs at least one problem and one method");
        }
        if self.seeds.is_empty() {
            return bad("needs at least one seed");
        }
        if self.percentiles.is_empty() || self.percentiles.iter().any(|p| !(*p > 0.0 && *p < 100.0)) {
            return bad("percentiles must lie in (0, 100)");
        }
        let positive = |v: &[f64]| v.iter().all(|x| *x > 0.0 && x.is_finite());
        if !positive(&self.budgets) || !positive(&self.budget_multipliers) {
            return bad("budgets must be positive");
        }
        if self.budgets.is_empty() && self.budget_multipliers.is_empty() {
            return bad("no budgets");
        }
        if !(self.interval > 0.0 && self.interval.is_finite()) {
            return bad("interval must be positive");
        }
        Ok(())
    }
}

/// One experiment cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub workload: String,
    pub kind: ProblemKind,
    pub method: Strategy,
    pub percentile: f64,
    pub budget_s: f64,
    pub seed: u64,
}

impl Cell {
    /// Search seed of this cell, derived from the plan's base seed so that
    /// cells differing in method, percentile or budget draw independently.
    pub fn derived_seed(base_seed: u64, method: Strategy, pct: f64, budget_s: f64) -> u64 {
        hash_words(&[
            base_seed,
            hash_str(method.name()),
            pct.to_bits(),
            budget_s.to_bits(),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub workload: String,
    pub method: Strategy,
    pub problem: ProblemKind,
    pub percentile: f64,
    pub budget: f64,
    pub seed: u64,
    pub best_value: Option<f64>,
    /// Absent when the search found no feasible sample or the trace has
    /// none.
    pub re: Option<f64>,
    pub samples_completed: usize,
    pub samples_terminated: usize,
    pub overhead_s: f64,
}

impl ResultRow {
    pub fn samples_explored(&self) -> usize {
        self.samples_completed + self.samples_terminated
    }

    fn sort_key(&self) -> (&str, ProblemKind, Strategy, u64, u64, u64) {
        (
            &self.workload,
            self.problem,
            self.method,
            self.percentile.to_bits(),
            self.budget.to_bits(),
            self.seed,
        )
    }
}

/// Runs one cell against a trace in virtual time.
pub fn run_cell(
    trace: &WorkloadTrace,
    cell: &Cell,
    interval: f64,
    options: &SearchOptions,
) -> Result<(ResultRow, SearchResult)> {
    let constraint = constraint_from_percentile(trace, cell.kind, cell.percentile)?;
    let problem = Problem::new(cell.kind, constraint, cell.budget_s)?;
    let mut sim = TraceSimulator::new(trace, interval)?;
    let options = SearchOptions {
        seed: cell.seed,
        ..options.clone()
    };
    let pool = trace.configs();
    let result = run_search(&problem, trace.space(), &pool, &mut sim, cell.method, &options)?;
    let optimum = oracle_optimum(trace, cell.kind, constraint).map(|o| o.0);
    let re = match (result.best_value, optimum) {
        (Some(v), Some(o)) => Some(relative_error(v, o)?),
        _ => None,
    };
    let row = ResultRow {
        workload: cell.workload.clone(),
        method: cell.method,
        problem: cell.kind,
        percentile: cell.percentile,
        budget: cell.budget_s,
        seed: cell.seed,
        best_value: result.best_value,
        re,
        samples_completed: result.samples_completed,
        samples_terminated: result.samples_terminated,
        overhead_s: result.overhead_s,
    };
    Ok((row, result))
}

fn workload_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Runs every cell of `plan` in parallel and returns the rows sorted by
/// (workload, problem, method, percentile, budget, seed).
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<ResultRow>> {
    plan.validate()?;
    let space = match &plan.space {
        Some(p) => ConfigSpace::load(p)?,
        None => ConfigSpace::builtin_spark(),
    };
    let mut traces = Vec::with_capacity(plan.traces.len());
    for path in &plan.traces {
        if !path.exists() {
            return Err(Error::InvalidParam(format!(
                "trace file {} not found",
                path.display()
            )));
        }
        traces.push((workload_name(path), WorkloadTrace::load(space.clone(), path)?));
    }

    let mut cells = Vec::new();
    for (ti, (name, trace)) in traces.iter().enumerate() {
        let budgets: Vec<f64> = if plan.budgets.is_empty() {
            let median = trace.median_latency();
            plan.budget_multipliers.iter().map(|k| k * median).collect()
        } else {
            plan.budgets.clone()
        };
        for &kind in &plan.problems {
            for &method in &plan.methods {
                for &pct in &plan.percentiles {
                    for &budget_s in &budgets {
                        for &base in &plan.seeds {
                            let seed = Cell::derived_seed(base, method, pct, budget_s);
                            cells.push((
                                ti,
                                Cell {
                                    workload: name.clone(),
                                    kind,
                                    method,
                                    percentile: pct,
                                    budget_s,
                                    seed,
                                },
                            ));
                        }
                    }
                }
            }
        }
    }

    let options = SearchOptions::default();
    let mut rows = cells
        .par_iter()
        .map(|(ti, cell)| run_cell(&traces[*ti].1, cell, plan.interval, &options).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(rows)
}

/// Means per (workload, problem, budget, method) across percentiles and
/// seeds. The mean RE covers only rows that have one.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub workload: String,
    pub method: Strategy,
    pub problem: ProblemKind,
    pub budget: f64,
    pub cells: usize,
    pub mean_re: Option<f64>,
    pub mean_completed: f64,
    pub mean_terminated: f64,
}

pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(&str, ProblemKind, u64, Strategy), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((&r.workload, r.problem, r.budget.to_bits(), r.method))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((workload, problem, budget, method), g)| {
            let n = g.len() as f64;
            let res: Vec<f64> = g.iter().filter_map(|r| r.re).collect();
            SummaryRow {
                workload: workload.to_string(),
                method,
                problem,
                budget: f64::from_bits(budget),
                cells: g.len(),
                mean_re: (!res.is_empty()).then(|| res.iter().sum::<f64>() / res.len() as f64),
                mean_completed: g.iter().map(|r| r.samples_completed as f64).sum::<f64>() / n,
                mean_terminated: g.iter().map(|r| r.samples_terminated as f64).sum::<f64>() / n,
            }
        })
        .collect()
}

pub const RESULT_COLUMNS: [&str; 11] = [
    "kind",
    "workload",
    "method",
    "problem",
    "percentile",
    "budget",
    "seed",
    "best_value",
    "re",
    "samples_completed",
    "samples_terminated",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the results file: one `#` metadata line, then a CSV of cell rows
/// followed by summary rows. The content depends only on `rows` and
/// `metadata`; measured fitting time lives in the timing file instead.
pub fn write_results<W: Write>(mut out: W, metadata: &str, rows: &[ResultRow]) -> Result<()> {
    writeln!(out, "# {metadata}").map_err(|e| Error::io("<results>", e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_COLUMNS)?;
    for r in rows {
        w.write_record([
            "cell".to_string(),
            r.workload.clone(),
            r.method.to_string(),
            r.problem.to_string(),
            r.percentile.to_string(),
            r.budget.to_string(),
            r.seed.to_string(),
            opt(r.best_value),
            opt(r.re),
            r.samples_completed.to_string(),
            r.samples_terminated.to_string(),
        ])?;
    }
    for s in summarize(rows) {
        w.write_record([
            "summary".to_string(),
            s.workload,
            s.method.to_string(),
            s.problem.to_string(),
            String::new(),
            s.budget.to_string(),
            String::new(),
            String::new(),
            opt(s.mean_re),
            s.mean_completed.to_string(),
            s.mean_terminated.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<results>", e))?;
    Ok(())
}

/// Measured learning overhead per cell, which varies from run to run.
pub fn write_timing<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "workload",
        "method",
        "problem",
        "percentile",
        "budget",
        "seed",
        "overhead_s",
        "overhead_per_sample_s",
    ])?;
    for r in rows {
        w.write_record([
            r.workload.clone(),
            r.method.to_string(),
            r.problem.to_string(),
            r.percentile.to_string(),
            r.budget.to_string(),
            r.seed.to_string(),
            r.overhead_s.to_string(),
            (r.overhead_s / r.samples_explored().max(1) as f64).to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<timing>", e))?;
    Ok(())
}

/// Path of the timing file that accompanies a results file.
pub fn timing_path(results: &Path) -> PathBuf {
    let mut name = results.as_os_str().to_owned();
    name.push(".timing.csv");
    PathBuf::from(name)
}

/// Median of a non-empty slice, averaging the middle pair.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

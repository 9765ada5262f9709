//! Experiment plans from TOML through to result files.

use std::io::Write;

use tune_core::baselines::Strategy;
use tune_core::harness::{
    generate_trace, run_plan, summarize, write_results, ExperimentPlan, SyntheticParams, RESULT_COLUMNS,
};
use tune_core::optimizer::ProblemKind;
use tune_core::space::ConfigSpace;

fn write_plan(dir: &std::path::Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("plan.toml");
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(body.as_bytes()).unwrap();
    path
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let params = SyntheticParams {
        rows: 80,
        ..Default::default()
    };
    for (name, seed) in [("alpha", 1), ("beta", 2)] {
        let trace = generate_trace(&ConfigSpace::builtin_spark(), &params, seed).unwrap();
        trace.save(&dir.path().join(format!("{name}.csv"))).unwrap();
    }
    dir
}

const PLAN: &str = r#"
traces = ["alpha.csv", "beta.csv"]
problems = ["lup", "eul"]
percentiles = [25, 75]
budget_multipliers = [4]
methods = ["rs", "bo-tc", "cello"]
seeds = [0, 1]
"#;

#[test]
fn plan_runs_every_cell_reproducibly() {
    let dir = setup();
    let plan = ExperimentPlan::load(&write_plan(dir.path(), PLAN)).unwrap();
    let rows = run_plan(&plan).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2 * 3 * 2);
    for r in &rows {
        assert!(r.samples_explored() >= 1);
        if let Some(re) = r.re {
            assert!(re >= 0.0);
        }
    }
    let again = run_plan(&plan).unwrap();
    let strip = |rows: &[tune_core::harness::ResultRow]| {
        rows.iter()
            .map(|r| {
                (
                    r.workload.clone(),
                    r.method,
                    r.problem,
                    r.seed,
                    r.best_value,
                    r.samples_completed,
                    r.samples_terminated,
                )
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&rows), strip(&again));

    let mut out = Vec::new();
    write_results(&mut out, "plan", &rows).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    let body = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, RESULT_COLUMNS);
    let kinds: Vec<String> = reader.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(kinds.iter().filter(|k| *k == "cell").count(), rows.len());
    assert!(kinds.iter().any(|k| k == "summary"));
}

#[test]
fn summary_groups_over_percentiles_and_seeds() {
    let dir = setup();
    let plan = ExperimentPlan::load(&write_plan(dir.path(), PLAN)).unwrap();
    let rows = run_plan(&plan).unwrap();
    let summary = summarize(&rows);
    assert_eq!(summary.len(), 2 * 2 * 3);
    for s in &summary {
        assert_eq!(s.cells, 4);
    }
    let cello = summary
        .iter()
        .find(|s| {
            s.workload == "alpha"
                && s.method == Strategy::Cello
                && s.problem == ProblemKind::LatencyUnderPower
        })
        .unwrap();
    assert!(cello.mean_completed >= 1.0);
}

#[test]
fn missing_trace_is_named() {
    let dir = setup();
    let plan = ExperimentPlan::load(&write_plan(dir.path(), &PLAN.replace("beta.csv", "gamma.csv"))).unwrap();
    let err = run_plan(&plan).unwrap_err().to_string();
    assert!(err.contains("gamma.csv"), "{err}");
}

#[test]
fn unknown_plan_keys_are_rejected() {
    let dir = setup();
    let path = write_plan(dir.path(), &format!("{PLAN}\nrepeats = 3\n"));
    let err = ExperimentPlan::load(&path).unwrap_err().to_string();
    assert!(err.contains("plan.toml"), "{err}");
}

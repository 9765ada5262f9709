//! Whole searches over small synthetic traces in virtual time.

use proptest::prelude::*;
use tune_core::baselines::Strategy;
use tune_core::execution::{TraceSimulator, WorkloadTrace};
use tune_core::harness::{constraint_from_percentile, generate_trace, oracle_optimum, SyntheticParams};
use tune_core::optimizer::{run_search, Outcome, Problem, ProblemKind, SearchOptions, SearchResult};
use tune_core::space::{ConfigSpace, ParamSpec};

fn small_space() -> ConfigSpace {
    ConfigSpace::new(vec![
        ParamSpec::continuous("cpu.freq", 1.0, 3.7),
        ParamSpec::integer("cores", 1, 16),
        ParamSpec::categorical("compress", &["off", "on"]),
    ])
    .unwrap()
}

fn trace(rows: usize, seed: u64) -> WorkloadTrace {
    let params = SyntheticParams {
        rows,
        ..Default::default()
    };
    generate_trace(&small_space(), &params, seed).unwrap()
}

fn search(tr: &WorkloadTrace, problem: &Problem, strategy: Strategy, seed: u64) -> SearchResult {
    let mut sim = TraceSimulator::new(tr, 5.0).unwrap();
    let options = SearchOptions {
        seed,
        ..Default::default()
    };
    run_search(problem, tr.space(), &tr.configs(), &mut sim, strategy, &options).unwrap()
}

fn strategy() -> impl proptest::strategy::Strategy<Value = Strategy> {
    proptest::sample::select(Strategy::ALL.to_vec())
}

fn kind() -> impl proptest::strategy::Strategy<Value = ProblemKind> {
    prop_oneof![
        Just(ProblemKind::LatencyUnderPower),
        Just(ProblemKind::EnergyUnderLatency)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn search_invariants(
        trace_seed in 0u64..1000,
        seed in any::<u64>(),
        method in strategy(),
        kind in kind(),
        pct in 5.0f64..95.0,
        budget_factor in 1.0f64..12.0,
    ) {
        let tr = trace(60, trace_seed);
        let c = constraint_from_percentile(&tr, kind, pct).unwrap();
        let budget = budget_factor * tr.median_latency();
        let problem = Problem::new(kind, c, budget).unwrap();
        let r = search(&tr, &problem, method, seed);

        // Each candidate runs at most once.
        let mut ids: Vec<usize> = r.history.iter().map(|h| h.candidate_id).collect();
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids.len(), r.history.len());

        // The clock only runs out on the last round.
        let consumed: f64 = r.history.iter().map(|h| h.consumed_s).sum();
        let last = r.history.last().unwrap().consumed_s;
        prop_assert!(consumed <= budget + last + 1e-9 * budget);
        prop_assert!((r.budget_remaining - (budget - consumed)).abs() <= 1e-9 * budget);
        for h in &r.history[..r.history.len() - 1] {
            prop_assert!(h.budget_remaining > 0.0);
        }

        // The first sample always completes; only terminations leave the
        // training set unchanged.
        prop_assert!(r.history[0].outcome != Outcome::Terminated);
        for w in r.history.windows(2) {
            let grew = w[1].training_size == w[0].training_size + 1;
            prop_assert_eq!(grew, w[1].outcome != Outcome::Terminated);
        }
        if matches!(method, Strategy::Rs | Strategy::Bo) {
            prop_assert_eq!(r.samples_terminated, 0);
        }

        // The answer is a feasible trace row, never better than the optimum.
        let optimum = oracle_optimum(&tr, kind, c);
        if let (Some(best), Some(id)) = (r.best_value, r.best_candidate) {
            let row = &tr.rows()[id];
            prop_assert!(problem.is_feasible(row.latency_s, row.energy_j));
            prop_assert_eq!(best, kind.objective_value(row.latency_s, row.energy_j));
            prop_assert!(best >= optimum.unwrap().0);
        }
    }

    #[test]
    fn searches_are_reproducible(seed in any::<u64>(), method in strategy()) {
        let tr = trace(40, 3);
        let c = constraint_from_percentile(&tr, ProblemKind::LatencyUnderPower, 50.0).unwrap();
        let problem = Problem::new(ProblemKind::LatencyUnderPower, c, 6.0 * tr.median_latency()).unwrap();
        let a = search(&tr, &problem, method, seed);
        let b = search(&tr, &problem, method, seed);
        let key = |r: &SearchResult| {
            r.history
                .iter()
                .map(|h| (h.candidate_id, h.outcome, h.consumed_s.to_bits(), h.predicted_values.clone()))
                .collect::<Vec<_>>()
        };
        prop_assert_eq!(key(&a), key(&b));
        prop_assert_eq!(a.best_value, b.best_value);
    }
}

#[test]
fn exhausting_the_pool_stops_the_search() {
    let tr = trace(12, 5);
    let c = constraint_from_percentile(&tr, ProblemKind::EnergyUnderLatency, 90.0).unwrap();
    let problem = Problem::new(ProblemKind::EnergyUnderLatency, c, 1e9).unwrap();
    for method in Strategy::ALL {
        let r = search(&tr, &problem, method, 1);
        assert!(r.pool_exhausted, "{method}");
        assert_eq!(r.rounds, 12);
        if matches!(method, Strategy::Rs | Strategy::Bo) {
            // Everything ran to completion, so the optimum was found.
            assert_eq!(
                r.best_value,
                oracle_optimum(&tr, ProblemKind::EnergyUnderLatency, c).map(|o| o.0)
            );
        }
    }
}

#[test]
fn measured_termination_never_drops_a_better_run() {
    // A run stopped by its measured value had already reached the threshold,
    // so its final value could not have improved on the best.
    let tr = trace(80, 11);
    let kind = ProblemKind::LatencyUnderPower;
    let c = constraint_from_percentile(&tr, kind, 60.0).unwrap();
    let problem = Problem::new(kind, c, 1e9).unwrap();
    let tc = search(&tr, &problem, Strategy::BoTc, 4);
    let optimum = oracle_optimum(&tr, kind, c).unwrap().0;
    assert!(tc.pool_exhausted);
    assert_eq!(tc.best_value, Some(optimum));
}

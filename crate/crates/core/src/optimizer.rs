//! The search loop: Bayesian optimization over a candidate pool with
//! interval monitoring, optional early termination, constraint handling
//! and budget accounting.
//!
//! One round selects a candidate, starts it, and polls it every interval.
//! While it runs, the active strategy may drop it. A dropped sample never
//! enters the training set. A finished one does, with its true objective
//! when it meets the constraint and a penalty value when it does not.
//! The round's consumed time is subtracted from the budget and the loop
//! ends once the budget is spent or the pool is exhausted.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::{select_next, AcquisitionContext};
use crate::baselines::{bo_gb_model, bo_st_check, bo_tc_check, rs_step, Strategy};
use crate::boost::BoostParams;
use crate::censored::{fit_censored, select_hyperparams, AftGrid, AftParams, CensoredSample};
use crate::error::{Error, Result};
use crate::execution::{BehaviorReading, Executor};
use crate::forest::{fit_forest, ForestParams};
use crate::seed::mix_seed;
use crate::space::{ConfigSpace, Configuration};
use crate::tree::TreeParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Latency,
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintMetric {
    Power,
    Latency,
}

/// The two supported problem shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProblemKind {
    /// Minimize latency subject to average power ≤ C.
    #[serde(rename = "lup")]
    LatencyUnderPower,
    /// Minimize energy subject to latency ≤ C.
    #[serde(rename = "eul")]
    EnergyUnderLatency,
}

impl ProblemKind {
    pub fn objective(self) -> Objective {
        match self {
            ProblemKind::LatencyUnderPower => Objective::Latency,
            ProblemKind::EnergyUnderLatency => Objective::Energy,
        }
    }

    pub fn constraint_metric(self) -> ConstraintMetric {
        match self {
            ProblemKind::LatencyUnderPower => ConstraintMetric::Power,
            ProblemKind::EnergyUnderLatency => ConstraintMetric::Latency,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::LatencyUnderPower => "lup",
            ProblemKind::EnergyUnderLatency => "eul",
        }
    }

    pub fn objective_value(self, latency_s: f64, energy_j: f64) -> f64 {
        match self.objective() {
            Objective::Latency => latency_s,
            Objective::Energy => energy_j,
        }
    }

    pub fn constraint_value(self, latency_s: f64, energy_j: f64) -> f64 {
        match self.constraint_metric() {
            ConstraintMetric::Power => energy_j / latency_s,
            ConstraintMetric::Latency => latency_s,
        }
    }

    /// The monitored (censored) quantity of a running sample.
    pub fn elapsed_objective(self, reading: &BehaviorReading) -> f64 {
        self.objective_value(reading.elapsed_latency, reading.elapsed_energy)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lup" => Ok(ProblemKind::LatencyUnderPower),
            "eul" => Ok(ProblemKind::EnergyUnderLatency),
            other => Err(Error::InvalidParam(format!(
                "unknown problem `{other}` (lup|eul)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem {
    pub kind: ProblemKind,
    /// Constraint bound C, in watts or seconds depending on `kind`.
    pub constraint: f64,
    pub budget_s: f64,
}

impl Problem {
    pub fn new(kind: ProblemKind, constraint: f64, budget_s: f64) -> Result<Self> {
        if !(constraint > 0.0 && constraint.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "constraint must be positive, got {constraint}"
            )));
        }
        if !(budget_s > 0.0 && budget_s.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "budget must be positive, got {budget_s}"
            )));
        }
        Ok(Problem {
            kind,
            constraint,
            budget_s,
        })
    }

    pub fn is_feasible(&self, latency_s: f64, energy_j: f64) -> bool {
        self.kind.constraint_value(latency_s, energy_j) <= self.constraint
    }
}

/// Terminate iff the predicted final value is no better than the best.
pub fn should_terminate(prediction: f64, gamma: f64) -> bool {
    prediction >= gamma
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub seed: u64,
    pub forest: ForestParams,
    pub aft: AftParams,
    /// Hyperparameter grid for the censored regressor; `None` uses `aft` as is.
    pub aft_grid: Option<AftGrid>,
    /// Least-squares booster used by `bo-gb`.
    pub gbt: BoostParams,
    /// Infeasible samples enter training with this multiple of the largest
    /// objective seen so far.
    pub penalty_factor: f64,
    /// Pool index of the first sample; random when `None`.
    pub initial: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        let aft = AftParams::default();
        SearchOptions {
            seed: 0,
            forest: ForestParams::default(),
            aft,
            aft_grid: Some(AftGrid::default()),
            gbt: BoostParams {
                learning_rate: 0.3,
                rounds: aft.num_boost_round,
                tree: TreeParams {
                    max_depth: aft.max_depth,
                    min_samples_leaf: 1,
                    min_child_weight: 0.0,
                },
            },
            penalty_factor: 10.0,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    FinishedFeasible,
    FinishedInfeasible,
    Terminated,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::FinishedFeasible => "finished-feasible",
            Outcome::FinishedInfeasible => "finished-infeasible",
            Outcome::Terminated => "terminated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub candidate_id: usize,
    pub outcome: Outcome,
    pub consumed_s: f64,
    /// Final-value predictions made at each polled interval.
    pub predicted_values: Vec<f64>,
    /// Best feasible value when the round started.
    pub gamma: Option<f64>,
    pub budget_remaining: f64,
    /// Objective recorded in the training set, penalty included.
    pub recorded_value: Option<f64>,
    pub training_size: usize,
    /// Wall seconds spent fitting models this round.
    #[serde(skip)]
    pub overhead_s: f64,
}

/// Training set and bookkeeping of a search in progress.
#[derive(Debug, Clone, Default)]
pub struct SearchState {
    pub x_train: Vec<Vec<f64>>,
    pub y_train: Vec<f64>,
    pub feasible: Vec<bool>,
    pub candidate_ids: Vec<usize>,
    pub max_objective: f64,
    pub budget_remaining: f64,
    pub history: Vec<RoundRecord>,
}

impl SearchState {
    pub fn new(budget_s: f64) -> Self {
        SearchState {
            budget_remaining: budget_s,
            ..Default::default()
        }
    }

    /// Best feasible objective so far.
    pub fn gamma(&self) -> Option<f64> {
        self.y_train
            .iter()
            .zip(&self.feasible)
            .filter(|(_, f)| **f)
            .map(|(y, _)| *y)
            .min_by(f64::total_cmp)
    }

    /// Appends a finished sample. An infeasible one is recorded at
    /// `penalty_factor ×` the largest objective observed so far (its own
    /// included), fixed at insertion. Returns the recorded value.
    pub fn update_training(
        &mut self,
        candidate_id: usize,
        features: Vec<f64>,
        objective: f64,
        constraint_value: f64,
        constraint: f64,
        penalty_factor: f64,
    ) -> f64 {
        self.max_objective = self.max_objective.max(objective);
        let feasible = constraint_value <= constraint;
        let recorded = if feasible {
            objective
        } else {
            penalty_factor * self.max_objective
        };
        self.x_train.push(features);
        self.y_train.push(recorded);
        self.feasible.push(feasible);
        self.candidate_ids.push(candidate_id);
        recorded
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_candidate: Option<usize>,
    pub best_config: Option<Configuration>,
    pub best_value: Option<f64>,
    pub rounds: usize,
    pub samples_completed: usize,
    pub samples_terminated: usize,
    pub pool_exhausted: bool,
    /// Run time charged to the budget.
    pub consumed_s: f64,
    /// Wall seconds spent fitting models.
    pub overhead_s: f64,
    pub budget_remaining: f64,
    pub history: Vec<RoundRecord>,
}

impl SearchResult {
    pub fn samples_explored(&self) -> usize {
        self.samples_completed + self.samples_terminated
    }

    /// Learning overhead per explored sample.
    pub fn overhead_per_sample(&self) -> f64 {
        self.overhead_s / self.samples_explored().max(1) as f64
    }

    /// One JSON object per round.
    pub fn history_jsonl(&self) -> String {
        self.history
            .iter()
            .map(|r| serde_json::to_string(r).expect("record serializes") + "\n")
            .collect()
    }
}

/// How a running sample may be cut short this round.
enum Monitor {
    Never,
    Measured(f64),
    Standard(Box<dyn Fn(&[f64]) -> f64>),
    Censored { params: AftParams },
}

struct Search<'a, E: Executor> {
    problem: Problem,
    strategy: Strategy,
    options: &'a SearchOptions,
    executor: &'a mut E,
    pool: &'a [Configuration],
    encoded: Vec<Vec<f64>>,
    sampled: Vec<bool>,
    state: SearchState,
    /// Raw objective of the first sample, the static threshold of `bo-st`.
    first_objective: Option<f64>,
    overhead_s: f64,
    consumed_s: f64,
}

/// Runs one search of `pool` with `strategy` under `problem`'s budget.
pub fn run_search<E: Executor>(
    problem: &Problem,
    space: &ConfigSpace,
    pool: &[Configuration],
    executor: &mut E,
    strategy: Strategy,
    options: &SearchOptions,
) -> Result<SearchResult> {
    if pool.is_empty() {
        return Err(Error::InvalidParam("empty candidate pool".into()));
    }
    let encoded = pool.iter().map(|c| space.encode(c)).collect::<Result<Vec<_>>>()?;
    let search = Search {
        problem: *problem,
        strategy,
        options,
        executor,
        pool,
        encoded,
        sampled: vec![false; pool.len()],
        state: SearchState::new(problem.budget_s),
        first_objective: None,
        overhead_s: 0.0,
        consumed_s: 0.0,
    };
    search.run()
}

impl<E: Executor> Search<'_, E> {
    fn run(mut self) -> Result<SearchResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed);
        let first = match self.options.initial {
            Some(i) if i < self.pool.len() => i,
            Some(i) => return Err(Error::InvalidParam(format!("initial candidate {i} outside pool"))),
            None => rng.gen_range(0..self.pool.len()),
        };
        // No best value exists yet, so the first sample always runs to completion.
        self.run_round(0, first, Monitor::Never, 0.0)?;

        let mut pool_exhausted = false;
        let mut round = 1;
        while self.state.budget_remaining > 0.0 {
            let started = Instant::now();
            let next = if self.strategy.uses_surrogate() {
                self.select_by_ei(round)?
            } else {
                rs_step(&self.sampled, &mut rng)
            };
            let Some(next) = next else {
                pool_exhausted = true;
                break;
            };
            let monitor = self.monitor_for_round()?;
            let overhead = started.elapsed().as_secs_f64();
            self.run_round(round, next, monitor, overhead)?;
            round += 1;
        }
        Ok(self.finish(pool_exhausted))
    }

    fn select_by_ei(&self, round: usize) -> Result<Option<usize>> {
        if self.sampled.iter().all(|&s| s) {
            return Ok(None);
        }
        let params = ForestParams {
            seed: mix_seed(self.options.seed, round as u64),
            ..self.options.forest
        };
        let model = fit_forest(&self.state.x_train, &self.state.y_train, &params)?;
        let m_best = self
            .state
            .gamma()
            .unwrap_or_else(|| self.state.y_train.iter().copied().fold(f64::INFINITY, f64::min));
        let ctx = AcquisitionContext {
            m_best,
            candidates: &self.encoded,
            sampled: &self.sampled,
        };
        match select_next(&model, &ctx) {
            Ok(i) => Ok(Some(i)),
            Err(Error::CandidatesExhausted) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn monitor_for_round(&self) -> Result<Monitor> {
        let gamma = self.state.gamma();
        Ok(match self.strategy {
            Strategy::Rs | Strategy::Bo => Monitor::Never,
            Strategy::BoSt => self.first_objective.map_or(Monitor::Never, Monitor::Measured),
            Strategy::BoTc => gamma.map_or(Monitor::Never, Monitor::Measured),
            Strategy::BoGb if gamma.is_some() => Monitor::Standard(Box::new(bo_gb_model(
                &self.state.x_train,
                &self.state.y_train,
                &self.options.gbt,
            )?)),
            Strategy::Cello if gamma.is_some() => Monitor::Censored {
                params: self.options.aft,
            },
            Strategy::BoGb | Strategy::Cello => Monitor::Never,
        })
    }

    fn run_round(&mut self, round: usize, idx: usize, monitor: Monitor, mut overhead: f64) -> Result<()> {
        self.sampled[idx] = true;
        let gamma = self.state.gamma();
        let kind = self.problem.kind;
        let x = self.encoded[idx].clone();
        let handle = self.executor.start(&self.pool[idx])?;
        let mut predictions = Vec::new();
        let mut censored_params: Option<AftParams> = match monitor {
            Monitor::Censored { params } if self.options.aft_grid.is_none() => Some(params),
            _ => None,
        };

        let mut t = 1;
        let (outcome, consumed, recorded) = loop {
            let reading = self.executor.poll(handle, t)?;
            if reading.finished {
                let latency = reading.final_latency.expect("finished reading has latency");
                let energy = reading.final_energy.expect("finished reading has energy");
                let objective = kind.objective_value(latency, energy);
                let constraint_value = kind.constraint_value(latency, energy);
                if round == 0 {
                    self.first_objective = Some(objective);
                }
                let recorded = self.state.update_training(
                    idx,
                    x.clone(),
                    objective,
                    constraint_value,
                    self.problem.constraint,
                    self.options.penalty_factor,
                );
                let outcome = if constraint_value <= self.problem.constraint {
                    Outcome::FinishedFeasible
                } else {
                    Outcome::FinishedInfeasible
                };
                break (outcome, reading.consumed_s, Some(recorded));
            }

            let elapsed = kind.elapsed_objective(&reading);
            let stop = match (&monitor, gamma) {
                (Monitor::Never, _) => false,
                (Monitor::Measured(threshold), _) => match self.strategy {
                    Strategy::BoSt => bo_st_check(elapsed, *threshold),
                    _ => bo_tc_check(elapsed, *threshold),
                },
                (Monitor::Standard(model), Some(g)) => {
                    let p = model(&x);
                    predictions.push(p);
                    should_terminate(p, g)
                }
                (Monitor::Censored { params }, Some(g)) if elapsed > 0.0 => {
                    let started = Instant::now();
                    let p = self.predict_censored(round, &x, elapsed, params, &mut censored_params)?;
                    overhead += started.elapsed().as_secs_f64();
                    predictions.push(p);
                    should_terminate(p, g)
                }
                _ => false,
            };
            if stop {
                let consumed = self.executor.terminate(handle)?;
                break (Outcome::Terminated, consumed, None);
            }
            t += 1;
        };

        self.state.budget_remaining -= consumed;
        if !self.executor.is_virtual() {
            self.state.budget_remaining -= overhead;
        }
        self.consumed_s += consumed;
        self.overhead_s += overhead;
        self.state.history.push(RoundRecord {
            round,
            candidate_id: idx,
            outcome,
            consumed_s: consumed,
            predicted_values: predictions,
            gamma,
            budget_remaining: self.state.budget_remaining,
            recorded_value: recorded,
            training_size: self.state.y_train.len(),
            overhead_s: overhead,
        });
        Ok(())
    }

    /// Fits the censored regressor on the training set plus the running
    /// sample and returns its predicted final value. Hyperparameters are
    /// selected once per round, at its first prediction.
    fn predict_censored(
        &self,
        round: usize,
        x: &[f64],
        elapsed: f64,
        base: &AftParams,
        chosen: &mut Option<AftParams>,
    ) -> Result<f64> {
        let finished: Vec<CensoredSample> = self
            .state
            .x_train
            .iter()
            .zip(&self.state.y_train)
            .map(|(f, &y)| CensoredSample::finished(f.clone(), y))
            .collect();
        let running = [CensoredSample::running(x.to_vec(), elapsed)];
        let params = match chosen {
            Some(p) => *p,
            None => {
                let grid = self
                    .options
                    .aft_grid
                    .as_ref()
                    .expect("grid present when unselected");
                let p = select_hyperparams(
                    &finished,
                    &running,
                    base,
                    grid,
                    mix_seed(self.options.seed ^ 0xA5A5, round as u64),
                )?;
                *chosen = Some(p);
                p
            }
        };
        fit_censored(&finished, &running, &params)?.predict_final(x)
    }

    fn finish(self, pool_exhausted: bool) -> SearchResult {
        let best_pos = self
            .state
            .y_train
            .iter()
            .enumerate()
            .filter(|(i, _)| self.state.feasible[*i])
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i);
        let best_candidate = best_pos.map(|p| self.state.candidate_ids[p]);
        let history = self.state.history;
        let samples_terminated = history
            .iter()
            .filter(|r| r.outcome == Outcome::Terminated)
            .count();
        SearchResult {
            best_candidate,
            best_config: best_candidate.map(|i| self.pool[i].clone()),
            best_value: best_pos.map(|p| self.state.y_train[p]),
            rounds: history.len(),
            samples_completed: history.len() - samples_terminated,
            samples_terminated,
            pool_exhausted,
            consumed_s: self.consumed_s,
            overhead_s: self.overhead_s,
            budget_remaining: self.state.budget_remaining,
            history,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::execution::{TraceRow, TraceSimulator, WorkloadTrace};
    use crate::space::{ParamSpec, Value};

    fn trace(rows: &[(f64, f64)]) -> WorkloadTrace {
        let space = ConfigSpace::new(vec![ParamSpec::integer("k", 0, 1000)]).unwrap();
        let rows = rows
            .iter()
            .enumerate()
            .map(|(i, &(l, e))| TraceRow {
                config: Configuration::new(vec![Value::Int(i as i64)]),
                latency_s: l,
                energy_j: e,
            })
            .collect();
        WorkloadTrace::new(space, rows).unwrap()
    }

    fn search(
        tr: &WorkloadTrace,
        problem: Problem,
        strategy: Strategy,
        options: &SearchOptions,
    ) -> SearchResult {
        let mut sim = TraceSimulator::new(tr, 5.0).unwrap();
        run_search(&problem, tr.space(), &tr.configs(), &mut sim, strategy, options).unwrap()
    }

    #[test]
    fn termination_boundary() {
        assert!(should_terminate(20.0, 20.0));
        assert!(!should_terminate(19.99, 20.0));
    }

    #[test]
    fn penalties_are_fixed_at_insertion() {
        let mut s = SearchState::new(100.0);
        assert_eq!(s.update_training(0, vec![0.0], 50.0, 1.0, 2.0, 10.0), 50.0);
        assert_eq!(s.update_training(1, vec![1.0], 80.0, 3.0, 2.0, 10.0), 800.0);
        assert_eq!(s.update_training(2, vec![2.0], 30.0, 1.0, 2.0, 10.0), 30.0);
        assert_eq!(s.y_train, vec![50.0, 800.0, 30.0]);
        assert_eq!(s.gamma(), Some(30.0));
    }

    #[test]
    fn infeasible_first_sample_leaves_gamma_undefined() {
        let mut s = SearchState::new(100.0);
        assert_eq!(s.update_training(0, vec![0.0], 40.0, 9.0, 2.0, 10.0), 400.0);
        assert_eq!(s.gamma(), None);
    }

    #[test]
    fn tiny_budget_runs_exactly_one_sample() {
        let tr = trace(&[(60.0, 60.0), (30.0, 30.0), (90.0, 90.0)]);
        let p = Problem::new(ProblemKind::LatencyUnderPower, 10.0, 1.0).unwrap();
        for strategy in Strategy::ALL {
            let r = search(&tr, p, strategy, &SearchOptions::default());
            assert_eq!(r.rounds, 1, "{strategy}");
            assert_eq!(r.samples_completed, 1);
            assert!(r.budget_remaining < 0.0);
        }
    }

    #[test]
    fn single_candidate_pool() {
        let tr = trace(&[(60.0, 60.0)]);
        let p = Problem::new(ProblemKind::LatencyUnderPower, 10.0, 1000.0).unwrap();
        let r = search(&tr, p, Strategy::Bo, &SearchOptions::default());
        assert!(r.pool_exhausted);
        assert_eq!(r.best_value, Some(60.0));
        assert_eq!(r.best_candidate, Some(0));
    }

    #[test]
    fn scripted_termination() {
        // A runs first at 20 s; B would take 100 s.
        let tr = trace(&[(20.0, 20.0), (100.0, 100.0)]);
        let p = Problem::new(ProblemKind::LatencyUnderPower, 10.0, 1000.0).unwrap();
        let opts = SearchOptions {
            initial: Some(0),
            ..Default::default()
        };
        let cello = search(&tr, p, Strategy::Cello, &opts);
        let b = &cello.history[1];
        assert_eq!(b.candidate_id, 1);
        assert_eq!(b.outcome, Outcome::Terminated);
        assert_eq!(b.consumed_s, 5.0);
        assert!(b.predicted_values[0] >= 20.0);

        let tc = search(&tr, p, Strategy::BoTc, &opts);
        let b = &tc.history[1];
        assert_eq!(b.outcome, Outcome::Terminated);
        assert_eq!(b.consumed_s, 20.0);

        let bo = search(&tr, p, Strategy::Bo, &opts);
        assert_eq!(bo.history[1].consumed_s, 100.0);
        assert_eq!(bo.history[1].outcome, Outcome::FinishedFeasible);
    }

    #[test]
    fn budget_accounting_and_determinism() {
        let rows: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let l = 20.0 + ((i * 37) % 41) as f64 * 3.0;
                (l, l * (1.0 + (i % 5) as f64))
            })
            .collect();
        let tr = trace(&rows);
        let p = Problem::new(ProblemKind::LatencyUnderPower, 3.5, 600.0).unwrap();
        for strategy in Strategy::ALL {
            let opts = SearchOptions {
                seed: 7,
                ..Default::default()
            };
            let a = search(&tr, p, strategy, &opts);
            let b = search(&tr, p, strategy, &opts);
            let strip = |h: &[RoundRecord]| {
                h.iter()
                    .map(|r| RoundRecord {
                        overhead_s: 0.0,
                        ..r.clone()
                    })
                    .collect::<Vec<_>>()
            };
            assert_eq!(strip(&a.history), strip(&b.history), "{strategy}");
            let spent: f64 = a.history.iter().map(|r| r.consumed_s).sum();
            assert!((a.budget_remaining - (600.0 - spent)).abs() < 1e-9);
            // Only the last round may overdraw the budget.
            for r in &a.history[..a.history.len() - 1] {
                assert!(r.budget_remaining > 0.0);
            }
            if let Some(best) = a.best_value {
                let opt = tr
                    .rows()
                    .iter()
                    .filter(|r| r.avg_power() <= 3.5)
                    .map(|r| r.latency_s)
                    .fold(f64::INFINITY, f64::min);
                assert!(best >= opt);
            }
        }
    }

    #[test]
    fn energy_problem_uses_latency_constraint() {
        let tr = trace(&[(20.0, 500.0), (50.0, 100.0)]);
        let p = Problem::new(ProblemKind::EnergyUnderLatency, 30.0, 1000.0).unwrap();
        let r = search(&tr, p, Strategy::Rs, &SearchOptions::default());
        assert_eq!(r.best_value, Some(500.0));
        assert_eq!(r.best_candidate, Some(0));
    }
}

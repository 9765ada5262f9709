use std::collections::HashMap;

use super::{BehaviorReading, Executor, RunHandle, WorkloadTrace};
use crate::error::{Error, Result};
use crate::space::Configuration;

/// Shape of energy accrual over a run, as fractions of the run's total time
/// and total energy.
#[derive(Debug, Clone, PartialEq)]
pub enum ProgressCurve {
    /// Constant average power.
    Linear,
    /// Knots `(time_fraction, energy_fraction)`, strictly increasing in time
    /// and non-decreasing in energy; (0, 0) and (1, 1) are implied.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl ProgressCurve {
    pub fn piecewise(knots: Vec<(f64, f64)>) -> Result<Self> {
        let mut prev = (0.0, 0.0);
        for &(t, e) in &knots {
            if !(t > prev.0 && t < 1.0 && e >= prev.1 && e <= 1.0) {
                return Err(Error::InvalidParam(format!("bad progress knot ({t}, {e})")));
            }
            prev = (t, e);
        }
        Ok(ProgressCurve::PiecewiseLinear(knots))
    }

    /// Energy fraction spent after time fraction `u` in [0, 1].
    pub fn energy_fraction(&self, u: f64) -> f64 {
        match self {
            ProgressCurve::Linear => u,
            ProgressCurve::PiecewiseLinear(knots) => {
                let mut prev = (0.0, 0.0);
                for &(t, e) in knots.iter().chain([(1.0, 1.0)].iter()) {
                    if u <= t {
                        return prev.1 + (e - prev.1) * (u - prev.0) / (t - prev.0);
                    }
                    prev = (t, e);
                }
                1.0
            }
        }
    }
}

#[derive(Debug)]
enum RunState {
    Live { last_t: u32 },
    Finished,
    Terminated,
}

#[derive(Debug)]
struct SimRun {
    row: usize,
    state: RunState,
}

/// Virtual-time replay of a [`WorkloadTrace`].
///
/// A run with final latency `L` and energy `E` polled at interval `t`
/// reports wall time `w = t·Δ`. Before `L` it is unfinished with elapsed
/// latency `w` and elapsed energy `E·curve(w/L)`; from `L` on it is finished
/// and charged exactly `L`.
#[derive(Debug)]
pub struct TraceSimulator<'a> {
    trace: &'a WorkloadTrace,
    interval: f64,
    curves: HashMap<usize, ProgressCurve>,
    runs: HashMap<u64, SimRun>,
    next_id: u64,
}

impl<'a> TraceSimulator<'a> {
    pub fn new(trace: &'a WorkloadTrace, interval: f64) -> Result<Self> {
        if !(interval > 0.0 && interval.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "interval must be positive, got {interval}"
            )));
        }
        Ok(TraceSimulator {
            trace,
            interval,
            curves: HashMap::new(),
            runs: HashMap::new(),
            next_id: 0,
        })
    }

    /// Overrides the energy curve of one trace row.
    pub fn set_curve(&mut self, row: usize, curve: ProgressCurve) {
        self.curves.insert(row, curve);
    }

    fn run_mut(&mut self, handle: RunHandle) -> Result<&mut SimRun> {
        self.runs.get_mut(&handle.0).ok_or(Error::RunClosed(handle.0))
    }
}

impl Executor for TraceSimulator<'_> {
    fn interval(&self) -> f64 {
        self.interval
    }

    fn is_virtual(&self) -> bool {
        true
    }

    fn start(&mut self, config: &Configuration) -> Result<RunHandle> {
        let row = self.trace.find(config).ok_or(Error::UnknownConfiguration)?;
        let id = self.next_id;
        self.next_id += 1;
        self.runs.insert(
            id,
            SimRun {
                row,
                state: RunState::Live { last_t: 0 },
            },
        );
        Ok(RunHandle(id))
    }

    fn poll(&mut self, handle: RunHandle, t: u32) -> Result<BehaviorReading> {
        let interval = self.interval;
        let trace = self.trace;
        let curve = {
            let run = self.runs.get(&handle.0).ok_or(Error::RunClosed(handle.0))?;
            self.curves
                .get(&run.row)
                .cloned()
                .unwrap_or(ProgressCurve::Linear)
        };
        let run = self.run_mut(handle)?;
        let RunState::Live { last_t } = run.state else {
            return Err(Error::RunClosed(handle.0));
        };
        if t <= last_t {
            return Err(Error::InvalidParam(format!(
                "poll {t} does not follow poll {last_t}"
            )));
        }
        let row = &trace.rows()[run.row];
        let wall = t as f64 * interval;
        if wall >= row.latency_s {
            run.state = RunState::Finished;
            return Ok(BehaviorReading::done(row.latency_s, row.energy_j, row.latency_s));
        }
        run.state = RunState::Live { last_t: t };
        let energy = match curve {
            ProgressCurve::Linear => row.avg_power() * wall,
            c => row.energy_j * c.energy_fraction(wall / row.latency_s),
        };
        Ok(BehaviorReading::running(wall, energy, wall))
    }

    fn terminate(&mut self, handle: RunHandle) -> Result<f64> {
        let interval = self.interval;
        let run = self.run_mut(handle)?;
        match run.state {
            RunState::Live { last_t } => {
                run.state = RunState::Terminated;
                Ok(last_t as f64 * interval)
            }
            _ => Err(Error::RunClosed(handle.0)),
        }
    }
}

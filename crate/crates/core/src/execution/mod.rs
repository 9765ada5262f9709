//! Running configurations and monitoring them at fixed intervals.
//!
//! An [`Executor`] starts a run, reports its elapsed latency and energy at
//! every poll, and can kill it early. Two implementations exist: a
//! deterministic virtual-time replay of a recorded trace
//! ([`TraceSimulator`]) and a real child process ([`SubprocessExecutor`]).

mod simulator;
mod subprocess;
mod trace;

pub use simulator::{ProgressCurve, TraceSimulator};
pub use subprocess::SubprocessExecutor;
pub use trace::{TraceRow, WorkloadTrace};

use serde::Serialize;

use crate::error::Result;
use crate::space::Configuration;

/// Default monitoring interval in seconds.
pub const DEFAULT_INTERVAL_S: f64 = 5.0;

/// Behavior of one run at one poll.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BehaviorReading {
    pub elapsed_latency: f64,
    pub elapsed_energy: f64,
    pub finished: bool,
    pub final_latency: Option<f64>,
    pub final_energy: Option<f64>,
    /// Time charged to this run so far. For a finished run, its total.
    pub consumed_s: f64,
}

impl BehaviorReading {
    pub fn running(elapsed_latency: f64, elapsed_energy: f64, consumed_s: f64) -> Self {
        BehaviorReading {
            elapsed_latency,
            elapsed_energy,
            finished: false,
            final_latency: None,
            final_energy: None,
            consumed_s,
        }
    }

    pub fn done(latency: f64, energy: f64, consumed_s: f64) -> Self {
        BehaviorReading {
            elapsed_latency: latency,
            elapsed_energy: energy,
            finished: true,
            final_latency: Some(latency),
            final_energy: Some(energy),
            consumed_s,
        }
    }
}

/// Identity of an in-flight run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunHandle(pub u64);

pub trait Executor {
    /// Seconds between polls.
    fn interval(&self) -> f64;

    /// Whether time is simulated. Virtual executors charge only run time to
    /// the budget; wall-clock executors also pay for model fitting.
    fn is_virtual(&self) -> bool;

    fn start(&mut self, config: &Configuration) -> Result<RunHandle>;

    /// Reading at interval `t` (wall time `t·interval` after start). Polls of
    /// one run must use increasing `t`. A finished reading closes the run.
    fn poll(&mut self, handle: RunHandle, t: u32) -> Result<BehaviorReading>;

    /// Kills a live run; returns the time charged to it.
    fn terminate(&mut self, handle: RunHandle) -> Result<f64>;
}

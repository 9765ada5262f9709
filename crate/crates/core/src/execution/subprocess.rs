use std::collections::HashMap;
use std::fs;
use std::os::unix::process::CommandExt;
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use super::{BehaviorReading, Executor, RunHandle};
use crate::error::{Error, Result};
use crate::space::{ConfigSpace, Configuration};

/// Environment variable carrying the metrics file path to the child.
pub const METRICS_ENV: &str = "TUNE_METRICS_FILE";

/// Prefix of the per-parameter environment variables. `cpu.freq` becomes
/// `TUNE_PARAM_CPU_FREQ`.
pub const PARAM_ENV_PREFIX: &str = "TUNE_PARAM_";

#[derive(Debug)]
struct ChildRun {
    child: Child,
    started: Instant,
    metrics: PathBuf,
    last_t: u32,
    last: (f64, f64),
}

/// Runs each configuration as a child process.
///
/// The command receives the configuration through `TUNE_PARAM_*`
/// environment variables and appends one `elapsed_s,elapsed_j` line per
/// interval to the file named by `TUNE_METRICS_FILE`. The process exits when
/// the workload finishes; its last metrics line is the final behavior.
/// Polls happen every `interval` wall seconds and termination kills the
/// child's whole process group.
#[derive(Debug)]
pub struct SubprocessExecutor {
    program: String,
    args: Vec<String>,
    space: ConfigSpace,
    interval: Duration,
    workdir: PathBuf,
    runs: HashMap<u64, ChildRun>,
    next_id: u64,
}

pub fn param_env_name(name: &str) -> String {
    let mut s = String::from(PARAM_ENV_PREFIX);
    s.extend(name.chars().map(|c| {
        if c.is_ascii_alphanumeric() {
            c.to_ascii_uppercase()
        } else {
            '_'
        }
    }));
    s
}

impl SubprocessExecutor {
    pub fn new(command: &[String], space: ConfigSpace, interval_s: f64, workdir: PathBuf) -> Result<Self> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| Error::InvalidParam("empty command".into()))?;
        if !(interval_s > 0.0 && interval_s.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "interval must be positive, got {interval_s}"
            )));
        }
        fs::create_dir_all(&workdir).map_err(|e| Error::io(&workdir, e))?;
        Ok(SubprocessExecutor {
            program: program.clone(),
            args: args.to_vec(),
            space,
            interval: Duration::from_secs_f64(interval_s),
            workdir,
            runs: HashMap::new(),
            next_id: 0,
        })
    }
}

/// Last complete `elapsed_s,elapsed_j` line of a metrics file.
fn last_metrics(path: &PathBuf) -> Result<Option<(f64, f64)>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::io(path, e)),
    };
    // A trailing line without a newline may still be in the middle of a write.
    let complete = match text.rfind('\n') {
        Some(end) => &text[..end],
        None => return Ok(None),
    };
    let Some(line) = complete.lines().rev().find(|l| !l.trim().is_empty()) else {
        return Ok(None);
    };
    let mut fields = line.split(',').map(str::trim);
    let parse = |f: Option<&str>| -> Result<f64> {
        f.and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::RunFailed(format!("malformed metrics line `{line}`")))
    };
    Ok(Some((parse(fields.next())?, parse(fields.next())?)))
}

impl Executor for SubprocessExecutor {
    fn interval(&self) -> f64 {
        self.interval.as_secs_f64()
    }

    fn is_virtual(&self) -> bool {
        false
    }

    fn start(&mut self, config: &Configuration) -> Result<RunHandle> {
        self.space.validate(config)?;
        let id = self.next_id;
        self.next_id += 1;
        let metrics = self.workdir.join(format!("run-{id}.csv"));
        let _ = fs::remove_file(&metrics);
        let mut cmd = Command::new(&self.program);
        cmd.args(&self.args)
            .env(METRICS_ENV, &metrics)
            .stdin(Stdio::null())
            .process_group(0);
        for (spec, value) in self.space.params().iter().zip(&config.values) {
            cmd.env(param_env_name(&spec.name), value.to_string());
        }
        let child = cmd
            .spawn()
            .map_err(|e| Error::RunFailed(format!("spawning `{}`: {e}", self.program)))?;
        self.runs.insert(
            id,
            ChildRun {
                child,
                started: Instant::now(),
                metrics,
                last_t: 0,
                last: (0.0, 0.0),
            },
        );
        Ok(RunHandle(id))
    }

    fn poll(&mut self, handle: RunHandle, t: u32) -> Result<BehaviorReading> {
        let interval = self.interval;
        let run = self.runs.get_mut(&handle.0).ok_or(Error::RunClosed(handle.0))?;
        if t <= run.last_t {
            return Err(Error::InvalidParam(format!(
                "poll {t} does not follow poll {}",
                run.last_t
            )));
        }
        let due = run.started + interval * t;
        let now = Instant::now();
        if due > now {
            std::thread::sleep(due - now);
        }
        run.last_t = t;
        let status = run
            .child
            .try_wait()
            .map_err(|e| Error::RunFailed(e.to_string()))?;
        let metrics = last_metrics(&run.metrics)?;
        if let Some(status) = status {
            let run = self.runs.remove(&handle.0).expect("run present");
            let consumed = run.started.elapsed().as_secs_f64();
            if !status.success() {
                return Err(Error::RunFailed(format!("workload exited with {status}")));
            }
            let (latency, energy) =
                metrics.ok_or_else(|| Error::RunFailed("workload exited without writing metrics".into()))?;
            return Ok(BehaviorReading::done(latency, energy, consumed));
        }
        if let Some((l, e)) = metrics {
            run.last = (run.last.0.max(l), run.last.1.max(e));
        }
        Ok(BehaviorReading::running(
            run.last.0,
            run.last.1,
            run.started.elapsed().as_secs_f64(),
        ))
    }

    fn terminate(&mut self, handle: RunHandle) -> Result<f64> {
        let mut run = self.runs.remove(&handle.0).ok_or(Error::RunClosed(handle.0))?;
        let consumed = run.started.elapsed().as_secs_f64();
        let pgid = run.child.id() as libc::pid_t;
        // SAFETY: plain syscall on a process group this executor created.
        unsafe {
            libc::killpg(pgid, libc::SIGKILL);
        }
        let _ = run.child.wait();
        Ok(consumed)
    }
}

impl Drop for SubprocessExecutor {
    fn drop(&mut self) {
        for (_, mut run) in self.runs.drain() {
            unsafe {
                libc::killpg(run.child.id() as libc::pid_t, libc::SIGKILL);
            }
            let _ = run.child.wait();
        }
    }
}

//! Child-process execution with external CPU and memory sampling.
//!
//! Each run launches `<interpreter> <shim> --solution <path> --task <id>
//! --input <path>` and polls the process until it exits or its timeout
//! passes. CPU comes from the reaped child's rusage, peak memory from the
//! larger of sampled `VmHWM` and `ru_maxrss`. Runs never overlap: a global
//! gate admits one child at a time.

mod sampler;

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::corpus::{standardized_inputs, TaskSpec};
use crate::solution::{AdequacyReason, Solution};

pub use sampler::{parse_status_line, RawRun, STATUS_PREFIX};

static CHILD_GATE: Mutex<()> = Mutex::new(());

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    #[default]
    Mean,
    Median,
}

impl Aggregator {
    pub fn apply(self, values: &[f64]) -> Option<f64> {
        if values.is_empty() {
            return None;
        }
        Some(match self {
            Aggregator::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregator::Median => {
                let mut v = values.to_vec();
                v.sort_by(f64::total_cmp);
                let mid = v.len() / 2;
                if v.len() % 2 == 1 {
                    v[mid]
                } else {
                    (v[mid - 1] + v[mid]) / 2.0
                }
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct ProfilerConfig {
    pub interpreter: PathBuf,
    pub shim: PathBuf,
    pub runs: usize,
    pub sample_interval: Duration,
    pub aggregator: Aggregator,
    /// Replaces each task's own timeout when set.
    pub timeout_override: Option<Duration>,
    /// Where per-run scratch directories are created.
    pub work_dir: PathBuf,
}

impl ProfilerConfig {
    pub fn new(interpreter: impl Into<PathBuf>, shim: impl Into<PathBuf>) -> Self {
        ProfilerConfig {
            interpreter: interpreter.into(),
            shim: shim.into(),
            runs: 5,
            sample_interval: Duration::from_millis(10),
            aggregator: Aggregator::Mean,
            timeout_override: None,
            work_dir: std::env::temp_dir(),
        }
    }
}

/// Status reported by the child on its final stdout line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShimStatus {
    pub ok: bool,
    pub entry_point_found: bool,
    #[serde(default)]
    pub exception: Option<ShimException>,
    #[serde(default)]
    pub result_digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShimException {
    #[serde(rename = "type")]
    pub type_name: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunFailure {
    Timeout,
    LaunchFailure { message: String },
    KilledBySignal { signal: i32 },
    NonZeroExit { code: i32 },
    EntryPointMissing,
    SolutionException { type_name: String, message: String },
    BadInput,
    ShimProtocol { message: String },
}

impl RunFailure {
    pub fn adequacy_reason(&self) -> AdequacyReason {
        match self {
            RunFailure::Timeout => AdequacyReason::Timeout,
            RunFailure::LaunchFailure { .. }
            | RunFailure::KilledBySignal { .. }
            | RunFailure::NonZeroExit { .. }
            | RunFailure::SolutionException { .. } => AdequacyReason::LaunchFailure,
            RunFailure::EntryPointMissing | RunFailure::BadInput | RunFailure::ShimProtocol { .. } => {
                AdequacyReason::ShimProtocol
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSample {
    /// Process CPU time over wall time, single-core normalized, in [0, 100].
    pub cpu_percent: f64,
    pub peak_rss_bytes: u64,
    pub wall_time: f64,
    pub exit_status: Option<i32>,
    pub stderr_tail: String,
    pub shim: Option<ShimStatus>,
    pub failure: Option<RunFailure>,
}

impl RunSample {
    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAggregate {
    pub samples: Vec<RunSample>,
    pub cpu_usage: Option<f64>,
    pub memory_usage: Option<f64>,
    pub success: bool,
    pub failure: Option<RunFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecReport {
    pub ok: bool,
    pub failure: Option<RunFailure>,
    pub exit_status: Option<i32>,
    pub stderr_tail: String,
    pub shim: Option<ShimStatus>,
}

/// Scratch files for one solution: its source and serialized inputs.
struct Staged {
    _dir: tempfile::TempDir,
    solution: PathBuf,
    input: PathBuf,
}

#[derive(Debug, Clone)]
pub struct Profiler {
    pub config: ProfilerConfig,
}

impl Profiler {
    pub fn new(config: ProfilerConfig) -> Self {
        Profiler { config }
    }

    fn timeout_for(&self, task: &TaskSpec) -> Duration {
        self.config.timeout_override.unwrap_or_else(|| Duration::from_secs_f64(task.timeout_secs))
    }

    fn stage(&self, solution: &Solution, task: &TaskSpec, seed: u64) -> Result<Staged, RunFailure> {
        let fail = |e: std::io::Error| RunFailure::LaunchFailure { message: format!("staging files: {e}") };
        std::fs::create_dir_all(&self.config.work_dir).map_err(fail)?;
        let dir = tempfile::Builder::new().prefix("pelli-run-").tempdir_in(&self.config.work_dir).map_err(fail)?;
        let solution_path = dir.path().join("solution.py");
        let input_path = dir.path().join("input.json");
        std::fs::write(&solution_path, &solution.source_text).map_err(fail)?;
        std::fs::write(&input_path, standardized_inputs(task, seed).to_json_bytes()).map_err(fail)?;
        Ok(Staged { _dir: dir, solution: solution_path, input: input_path })
    }

    /// One measured run of already-staged files.
    pub fn run_once(&self, solution_path: &Path, task_id: &str, input_path: &Path, timeout: Duration) -> RunSample {
        let _gate = CHILD_GATE.lock().unwrap_or_else(|p| p.into_inner());
        let args = [
            self.config.shim.as_os_str(),
            "--solution".as_ref(),
            solution_path.as_os_str(),
            "--task".as_ref(),
            task_id.as_ref(),
            "--input".as_ref(),
            input_path.as_os_str(),
        ];
        match sampler::run_child(&self.config.interpreter, &args, timeout, self.config.sample_interval) {
            Ok(raw) => raw.into_sample(),
            Err(e) => RunSample {
                cpu_percent: 0.0,
                peak_rss_bytes: 0,
                wall_time: 0.0,
                exit_status: None,
                stderr_tail: String::new(),
                shim: None,
                failure: Some(RunFailure::LaunchFailure {
                    message: format!("spawning {}: {e}", self.config.interpreter.display()),
                }),
            },
        }
    }

    /// Runs the solution `config.runs` times in sequence and aggregates.
    /// Stops at the first failed run.
    pub fn profile(&self, solution: &Solution, task: &TaskSpec, seed: u64) -> RunAggregate {
        let staged = match self.stage(solution, task, seed) {
            Ok(s) => s,
            Err(failure) => return aggregate(Vec::new(), Some(failure), self.config.aggregator),
        };
        let timeout = self.timeout_for(task);
        let mut samples = Vec::with_capacity(self.config.runs);
        for _ in 0..self.config.runs {
            let sample = self.run_once(&staged.solution, &task.id, &staged.input, timeout);
            let failure = sample.failure.clone();
            samples.push(sample);
            if failure.is_some() {
                return aggregate(samples, failure, self.config.aggregator);
            }
        }
        aggregate(samples, None, self.config.aggregator)
    }

    /// A single unprofiled run: does the solution launch and exit cleanly?
    /// Says nothing about whether its output is correct.
    pub fn sanity_execute(&self, solution: &Solution, task: &TaskSpec, seed: u64) -> ExecReport {
        let staged = match self.stage(solution, task, seed) {
            Ok(s) => s,
            Err(failure) => {
                return ExecReport {
                    ok: false,
                    failure: Some(failure),
                    exit_status: None,
                    stderr_tail: String::new(),
                    shim: None,
                }
            }
        };
        let s = self.run_once(&staged.solution, &task.id, &staged.input, self.timeout_for(task));
        ExecReport {
            ok: s.failure.is_none(),
            failure: s.failure,
            exit_status: s.exit_status,
            stderr_tail: s.stderr_tail,
            shim: s.shim,
        }
    }
}

fn aggregate(samples: Vec<RunSample>, failure: Option<RunFailure>, how: Aggregator) -> RunAggregate {
    let success = failure.is_none() && !samples.is_empty();
    let (cpu, mem) = if success {
        let cpu: Vec<f64> = samples.iter().map(|s| s.cpu_percent).collect();
        let mem: Vec<f64> = samples.iter().map(|s| s.peak_rss_bytes as f64).collect();
        (how.apply(&cpu), how.apply(&mem))
    } else {
        (None, None)
    };
    RunAggregate { samples, cpu_usage: cpu, memory_usage: mem, success, failure }
}

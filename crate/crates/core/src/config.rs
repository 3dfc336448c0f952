//! Run configuration, read from JSON. Relative paths resolve against the
//! directory holding the config file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{read_json, CoreError};
use crate::gateway::GenerationParams;
use crate::profiler::Aggregator;
use crate::solution::BASELINE_PRODUCER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Live,
    Replay,
    Record,
}

impl FromStr for Mode {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        match s {
            "live" => Ok(Mode::Live),
            "replay" => Ok(Mode::Replay),
            "record" => Ok(Mode::Record),
            other => Err(CoreError::Config(format!("unknown mode '{other}' (expected live, replay or record)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub id: String,
    /// API base URL; needed in live and record mode.
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model: Option<String>,
    /// Name of the environment variable holding the API key.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default)]
    pub requests_per_minute: Option<u32>,
    #[serde(default)]
    pub params: GenerationParams,
}

fn default_max_attempts() -> u32 {
    3
}
fn default_retries() -> u32 {
    2
}
fn default_request_timeout() -> f64 {
    120.0
}
fn default_runs() -> usize {
    5
}
fn default_interval() -> u64 {
    10
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_interpreter() -> PathBuf {
    PathBuf::from("python3")
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    /// Task ids to run; all tasks when absent.
    #[serde(default)]
    pub tasks: Option<Vec<String>>,
    #[serde(default)]
    pub providers: Vec<ProviderConfig>,
    pub mode: Mode,
    #[serde(default)]
    pub replay_store: Option<PathBuf>,
    #[serde(default = "default_max_attempts")]
    pub max_attempts: u32,
    #[serde(default = "default_retries")]
    pub transport_retries: u32,
    #[serde(default = "default_request_timeout")]
    pub request_timeout_secs: f64,
    /// Replaces every task's own timeout when set.
    #[serde(default)]
    pub task_timeout_secs: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs_per_solution: usize,
    #[serde(default = "default_interval")]
    pub sample_interval_ms: u64,
    #[serde(default)]
    pub aggregator: Aggregator,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Rules to disable on top of the defaults.
    #[serde(default)]
    pub disabled_rules: BTreeSet<String>,
    /// Rules to enable even though they are off by default.
    #[serde(default)]
    pub enabled_rules: BTreeSet<String>,
    /// Metric table to use instead of the built-in one.
    #[serde(default)]
    pub metric_spec: Option<PathBuf>,
    #[serde(default = "yes")]
    pub include_baselines: bool,
    /// Whether baselines count toward each group's max-observed values.
    #[serde(default = "yes")]
    pub baselines_in_scaling_groups: bool,
    #[serde(default = "default_interpreter")]
    pub interpreter: PathBuf,
    pub shim: PathBuf,
    /// Where scratch files for child runs go; the system temp dir if unset.
    #[serde(default)]
    pub work_dir: Option<PathBuf>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CoreError> {
        let mut cfg: PipelineConfig = read_json(path)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, CoreError> {
        let mut cfg: PipelineConfig = serde_json::from_str(text).map_err(|e| CoreError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Bare program names are left for `PATH` lookup.
    pub fn interpreter_path(&self) -> PathBuf {
        if self.interpreter.components().count() == 1 {
            self.interpreter.clone()
        } else {
            self.resolve(&self.interpreter)
        }
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        let mut problems = Vec::new();
        if self.mode != Mode::Live && self.replay_store.is_none() {
            problems.push(format!("{:?} mode requires replay_store", self.mode).to_lowercase());
        }
        if self.runs_per_solution < 1 {
            problems.push("runs_per_solution must be at least 1".into());
        }
        if self.max_attempts < 1 {
            problems.push("max_attempts must be at least 1".into());
        }
        if self.sample_interval_ms == 0 {
            problems.push("sample_interval_ms must be positive".into());
        }
        if self.task_timeout_secs.is_some_and(|t| t.is_nan() || t <= 0.0) {
            problems.push("task_timeout_secs must be positive".into());
        }
        if self.request_timeout_secs.is_nan() || self.request_timeout_secs <= 0.0 {
            problems.push("request_timeout_secs must be positive".into());
        }
        let mut ids = BTreeSet::new();
        for p in &self.providers {
            if p.id.is_empty() || p.id.contains('/') || p.id == BASELINE_PRODUCER {
                problems.push(format!("invalid provider id '{}'", p.id));
            }
            if !ids.insert(&p.id) {
                problems.push(format!("duplicate provider id '{}'", p.id));
            }
            if self.mode != Mode::Replay && (p.endpoint.is_none() || p.model.is_none()) {
                problems.push(format!("provider '{}' needs endpoint and model outside replay mode", p.id));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CoreError::Config(problems.join("; ")))
        }
    }

    /// The config as written, minus where output goes, for the report.
    pub fn snapshot(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output_dir");
            obj.remove("work_dir");
        }
        v
    }
}

//! Preprocessing of raw metrics into comparable scores in [0, 1].
//!
//! Each metric passes through smoothing, normalization, scaling and
//! inversion in that order, as configured by its [`MetricSpec`]. Scaling
//! against the maximum observed value happens per algorithm group.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use pelli_analyzer::MetricVector;
use serde::{Deserialize, Serialize};

use crate::error::{read_text, CoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricId {
    MaintainabilityIndex,
    Convention,
    Refactoring,
    Comments,
    Sloc,
    CpuUsage,
    MemoryUsage,
    CyclomaticComplexity,
    DeliveredBugs,
    Warnings,
    Errors,
}

impl MetricId {
    pub const ALL: [MetricId; 11] = [
        MetricId::MaintainabilityIndex,
        MetricId::Convention,
        MetricId::Refactoring,
        MetricId::Comments,
        MetricId::Sloc,
        MetricId::CpuUsage,
        MetricId::MemoryUsage,
        MetricId::CyclomaticComplexity,
        MetricId::DeliveredBugs,
        MetricId::Warnings,
        MetricId::Errors,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricId::MaintainabilityIndex => "maintainability_index",
            MetricId::Convention => "convention",
            MetricId::Refactoring => "refactoring",
            MetricId::Comments => "comments",
            MetricId::Sloc => "sloc",
            MetricId::CpuUsage => "cpu_usage",
            MetricId::MemoryUsage => "memory_usage",
            MetricId::CyclomaticComplexity => "cyclomatic_complexity",
            MetricId::DeliveredBugs => "delivered_bugs",
            MetricId::Warnings => "warnings",
            MetricId::Errors => "errors",
        }
    }

    /// Metrics that come from running the solution rather than reading it.
    pub fn is_runtime(self) -> bool {
        matches!(self, MetricId::CpuUsage | MetricId::MemoryUsage)
    }

    /// The unprocessed measurement, or `None` when it was never taken.
    pub fn raw(self, m: &MetricVector) -> Option<f64> {
        Some(match self {
            MetricId::MaintainabilityIndex => m.mi,
            MetricId::Convention => m.convention_count as f64,
            MetricId::Refactoring => m.refactor_count as f64,
            MetricId::Comments => m.comment_lines as f64,
            MetricId::Sloc => m.sloc as f64,
            MetricId::CpuUsage => m.cpu_usage?,
            MetricId::MemoryUsage => m.memory_usage?,
            MetricId::CyclomaticComplexity => m.cc_total as f64,
            MetricId::DeliveredBugs => m.delivered_bugs,
            MetricId::Warnings => m.warning_count as f64,
            MetricId::Errors => m.error_count as f64,
        })
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalizer {
    None,
    Loc,
    Methods,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scaler {
    FixedRange { upper: f64 },
    MaxObserved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub metric: MetricId,
    pub smoothing_k: Option<f64>,
    pub normalizer: Normalizer,
    pub scaler: Scaler,
    pub inverse: bool,
}

/// The eleven metric specs, one per metric, in table order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MetricSpecTable(pub Vec<MetricSpec>);

impl MetricSpecTable {
    pub fn from_json(text: &str) -> Result<Self, CoreError> {
        let table: MetricSpecTable = serde_json::from_str(text).map_err(|e| CoreError::MetricSpec(e.to_string()))?;
        table.validate()?;
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, CoreError> {
        Self::from_json(&read_text(path)?)
    }

    pub fn builtin() -> &'static MetricSpecTable {
        static CELL: OnceLock<MetricSpecTable> = OnceLock::new();
        CELL.get_or_init(|| {
            MetricSpecTable::from_json(include_str!("../../data/metric_specs.json")).expect("bundled specs are valid")
        })
    }

    fn validate(&self) -> Result<(), CoreError> {
        let mut problems = Vec::new();
        for id in MetricId::ALL {
            let n = self.0.iter().filter(|s| s.metric == id).count();
            if n != 1 {
                problems.push(format!("{id} has {n} rows"));
            }
        }
        for s in &self.0 {
            if let Some(k) = s.smoothing_k {
                if k.is_nan() || k <= 0.0 {
                    problems.push(format!("{}: smoothing k must be positive", s.metric));
                }
            }
            if let Scaler::FixedRange { upper } = s.scaler {
                if upper.is_nan() || upper <= 0.0 {
                    problems.push(format!("{}: fixed-range upper bound must be positive", s.metric));
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CoreError::MetricSpec(problems.join("; ")))
        }
    }

    pub fn get(&self, id: MetricId) -> &MetricSpec {
        self.0.iter().find(|s| s.metric == id).expect("validated table has every metric")
    }

    pub fn to_pretty_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("specs serialize");
        s.push('\n');
        s
    }
}

/// Add-k smoothing of a raw count.
pub fn smooth(count: f64, k: f64) -> f64 {
    count + k
}

/// `value / denom`, falling back to a denominator of 1 when `denom` is 0.
/// The flag reports whether the fallback was taken.
pub fn normalize(value: f64, denom: u64) -> (f64, bool) {
    if denom == 0 {
        (value, true)
    } else {
        (value / denom as f64, false)
    }
}

/// Scales `values` against `reference` (usually the same vector).
/// Max-observed over an all-zero reference yields zeros.
pub fn scale(values: &[f64], reference: &[f64], scaler: Scaler) -> Vec<f64> {
    let divisor = match scaler {
        Scaler::FixedRange { upper } => upper,
        Scaler::MaxObserved => reference.iter().copied().fold(0.0, f64::max),
    };
    if divisor <= 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| v / divisor).collect()
}

pub fn invert(scaled: f64) -> f64 {
    1.0 - scaled
}

/// Every stage of one metric for one solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredMetric {
    pub raw: f64,
    pub smoothed: f64,
    pub normalized: f64,
    pub scaled: f64,
    /// Final score in [0, 1].
    pub value: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub solution_id: String,
    pub group_key: String,
    pub metrics: BTreeMap<MetricId, ScoredMetric>,
}

impl ScoreVector {
    pub fn value(&self, id: MetricId) -> Option<f64> {
        self.metrics.get(&id).map(|m| m.value)
    }
}

/// One observation offered to [`process_group`].
#[derive(Debug, Clone)]
pub struct GroupMember {
    pub solution_id: String,
    /// `None` when analysis failed fatally.
    pub metrics: Option<MetricVector>,
    /// Whether the observation takes part in max-observed computation.
    pub in_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupExclusion {
    pub solution_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScores {
    pub group_key: String,
    pub scores: Vec<ScoreVector>,
    pub excluded: Vec<GroupExclusion>,
}

/// Runs smoothing, normalization, scaling and inversion over one algorithm
/// group. Unusable vectors and vectors missing a required measurement are
/// excluded before any maximum is taken.
pub fn process_group(group_key: &str, members: &[GroupMember], specs: &MetricSpecTable) -> GroupScores {
    let mut excluded = Vec::new();
    let mut kept: Vec<(&GroupMember, &MetricVector)> = Vec::new();
    for m in members {
        match &m.metrics {
            None => excluded.push(GroupExclusion {
                solution_id: m.solution_id.clone(),
                reason: "fatal parse error: metrics unusable".into(),
            }),
            Some(v) => {
                let missing: Vec<&str> =
                    specs.0.iter().filter(|s| s.metric.raw(v).is_none()).map(|s| s.metric.as_str()).collect();
                if missing.is_empty() {
                    kept.push((m, v));
                } else {
                    excluded.push(GroupExclusion {
                        solution_id: m.solution_id.clone(),
                        reason: format!("missing measurement: {}", missing.join(", ")),
                    });
                }
            }
        }
    }

    let mut scores: Vec<ScoreVector> = kept
        .iter()
        .map(|(m, _)| ScoreVector {
            solution_id: m.solution_id.clone(),
            group_key: group_key.to_string(),
            metrics: BTreeMap::new(),
        })
        .collect();

    for spec in &specs.0 {
        let mut stages = Vec::with_capacity(kept.len());
        for (_, v) in &kept {
            let raw = spec.metric.raw(v).expect("checked above");
            let smoothed = spec.smoothing_k.map_or(raw, |k| smooth(raw, k));
            let (normalized, fallback) = match spec.normalizer {
                Normalizer::None => (smoothed, false),
                Normalizer::Loc => normalize(smoothed, v.loc),
                Normalizer::Methods => normalize(smoothed, v.method_count),
            };
            let mut notes = Vec::new();
            if fallback {
                notes.push(format!("zero {:?} denominator: used 1", spec.normalizer).to_lowercase());
            }
            stages.push((raw, smoothed, normalized, notes));
        }
        let normalized: Vec<f64> = stages.iter().map(|s| s.2).collect();
        let reference: Vec<f64> =
            kept.iter().zip(&normalized).filter(|((m, _), _)| m.in_reference).map(|(_, x)| *x).collect();
        let scaled = scale(&normalized, &reference, spec.scaler);
        for ((score, (raw, smoothed, normalized, mut notes)), mut s) in scores.iter_mut().zip(stages).zip(scaled) {
            if !(0.0..=1.0).contains(&s) {
                notes.push(format!("scaled value {s} clamped to [0,1]"));
                s = s.clamp(0.0, 1.0);
            }
            let value = if spec.inverse { invert(s) } else { s };
            score.metrics.insert(spec.metric, ScoredMetric { raw, smoothed, normalized, scaled: s, value, notes });
        }
    }
    GroupScores { group_key: group_key.to_string(), scores, excluded }
}

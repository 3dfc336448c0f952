//! Grouped statistics over processed scores, and the run report.
//!
//! Everything reproducible from the corpus, replay store and config lives in
//! `report.json`. Runtime measurements vary between runs, so their values,
//! scores and group statistics go to `runtime.json` instead.

mod export;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use pelli_analyzer::lint::CategoryCounts;
use pelli_analyzer::MetricVector;
use serde::{Deserialize, Serialize};

use crate::corpus::{Algorithm, Domain, Tier};
use crate::error::CoreError;
use crate::profiler::RunSample;
use crate::score::{MetricId, ScoredMetric};
use crate::solution::{Adjustment, AttemptRecord, SolutionStatus, BASELINE_PRODUCER};

pub use export::{export, format_number};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Producer,
    Domain,
    Tier,
    /// Producer, domain and tier together.
    Cross,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [Dimension::Producer, Dimension::Domain, Dimension::Tier, Dimension::Cross];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Producer => "producer",
            Dimension::Domain => "domain",
            Dimension::Tier => "tier",
            Dimension::Cross => "cross",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        Dimension::ALL.into_iter().find(|d| d.as_str() == s).ok_or_else(|| {
            CoreError::Config(format!("unknown grouping dimension '{s}' (expected producer, domain, tier or cross)"))
        })
    }
}

/// One scored solution as seen by the aggregator.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub solution_id: String,
    pub producer: String,
    pub domain: Domain,
    pub tier: Option<Tier>,
    pub values: BTreeMap<MetricId, f64>,
}

impl Observation {
    pub fn is_baseline(&self) -> bool {
        self.producer == BASELINE_PRODUCER
    }

    fn tier_label(&self) -> &'static str {
        self.tier.map(Tier::as_str).unwrap_or(BASELINE_PRODUCER)
    }

    pub fn group(&self, dim: Dimension) -> String {
        match dim {
            Dimension::Producer => self.producer.clone(),
            Dimension::Domain => self.domain.as_str().to_string(),
            Dimension::Tier => self.tier_label().to_string(),
            Dimension::Cross => format!("{}/{}/{}", self.producer, self.domain.as_str(), self.tier_label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStat {
    pub dimension: Dimension,
    pub group: String,
    pub metric: MetricId,
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// Relative to the baseline mean: of the same domain when grouping by
    /// domain or cross, otherwise of all baselines.
    pub baseline_delta_percent: Option<f64>,
    /// Relative to the mean over every observation.
    pub average_delta_percent: Option<f64>,
}

/// Quantile with linear interpolation between closest ranks.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Percent change of `value` against `reference`. A zero reference only
/// yields a delta when the value is zero too.
pub fn delta_percent(value: f64, reference: f64) -> Option<f64> {
    if reference == 0.0 {
        (value == 0.0).then_some(0.0)
    } else {
        Some((value - reference) / reference * 100.0)
    }
}

/// Statistics per (group, metric), ordered by group name then metric.
pub fn aggregate(observations: &[Observation], dim: Dimension) -> Result<Vec<GroupStat>, CoreError> {
    if observations.is_empty() {
        return Err(CoreError::Config("nothing to aggregate".into()));
    }
    let mut groups: BTreeMap<(String, MetricId), Vec<&Observation>> = BTreeMap::new();
    for o in observations {
        for &m in o.values.keys() {
            groups.entry((o.group(dim), m)).or_default().push(o);
        }
    }
    // Sorted so that equal sets always sum to the same mean.
    let column = |obs: &mut dyn Iterator<Item = &Observation>, m: MetricId| -> Vec<f64> {
        let mut v: Vec<f64> = obs.filter_map(|o| o.values.get(&m).copied()).collect();
        v.sort_by(f64::total_cmp);
        v
    };

    let mut out = Vec::with_capacity(groups.len());
    for ((group, metric), members) in groups {
        let values = column(&mut members.iter().copied(), metric);
        let group_mean = mean(&values).expect("groups are never empty");
        let scoped_domain = match dim {
            Dimension::Domain | Dimension::Cross => Some(members[0].domain),
            _ => None,
        };
        let baseline = column(
            &mut observations.iter().filter(|o| o.is_baseline() && scoped_domain.is_none_or(|d| o.domain == d)),
            metric,
        );
        let overall = column(&mut observations.iter(), metric);
        out.push(GroupStat {
            dimension: dim,
            group,
            metric,
            count: values.len(),
            mean: group_mean,
            min: values[0],
            q1: quantile(&values, 0.25),
            median: quantile(&values, 0.5),
            q3: quantile(&values, 0.75),
            max: values[values.len() - 1],
            baseline_delta_percent: mean(&baseline).and_then(|b| delta_percent(group_mean, b)),
            average_delta_percent: mean(&overall).and_then(|a| delta_percent(group_mean, a)),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    /// The analyzer could not parse the final attempt.
    FatalParse,
    /// No attempt passed the adequacy gate.
    Rejected,
    /// Replay mode and the store lacks a needed transcript.
    ReplayMiss,
    /// Adequate, but a profiling run failed.
    ProfileFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub solution_id: String,
    pub task_id: String,
    pub producer: String,
    pub tier: Option<Tier>,
    pub reason: ExclusionReason,
    pub detail: String,
    pub history: Vec<AttemptRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRecord {
    pub cpu_usage: f64,
    pub memory_usage: f64,
    pub samples: Vec<RunSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub solution_id: String,
    pub task_id: String,
    pub algorithm: Algorithm,
    pub domain: Domain,
    pub tier: Option<Tier>,
    pub producer: String,
    pub status: SolutionStatus,
    pub attempt: u32,
    pub adjustments: Vec<Adjustment>,
    pub history: Vec<AttemptRecord>,
    pub lint_counts: CategoryCounts,
    pub metrics: MetricVector,
    pub scores: BTreeMap<MetricId, ScoredMetric>,
    pub runtime: RuntimeRecord,
}

impl SolutionRecord {
    pub fn observation(&self) -> Observation {
        Observation {
            solution_id: self.solution_id.clone(),
            producer: self.producer.clone(),
            domain: self.domain,
            tier: self.tier,
            values: self.scores.iter().map(|(&m, s)| (m, s.value)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// Config as written, minus anything that only says where output goes.
    pub config: serde_json::Value,
    pub corpus_hash: String,
    pub solutions: Vec<SolutionRecord>,
    pub groups: Vec<GroupStat>,
    pub exclusions: Vec<Exclusion>,
}

impl RunReport {
    /// Sorts solutions and exclusions by id and computes group statistics
    /// over every dimension.
    pub fn assemble(
        config: serde_json::Value,
        corpus_hash: String,
        mut solutions: Vec<SolutionRecord>,
        mut exclusions: Vec<Exclusion>,
    ) -> RunReport {
        solutions.sort_by(|a, b| a.solution_id.cmp(&b.solution_id));
        exclusions.sort_by(|a, b| a.solution_id.cmp(&b.solution_id));
        let obs: Vec<Observation> = solutions.iter().map(SolutionRecord::observation).collect();
        let groups = if obs.is_empty() {
            Vec::new()
        } else {
            Dimension::ALL.iter().flat_map(|&d| aggregate(&obs, d).expect("observations are nonempty")).collect()
        };
        RunReport { config, corpus_hash, solutions, groups, exclusions }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(id: &str, producer: &str, domain: Domain, tier: Option<Tier>, mi: f64) -> Observation {
        Observation {
            solution_id: id.into(),
            producer: producer.into(),
            domain,
            tier,
            values: BTreeMap::from([(MetricId::MaintainabilityIndex, mi)]),
        }
    }

    #[test]
    fn dimension_parsing() {
        assert_eq!("tier".parse::<Dimension>().unwrap(), Dimension::Tier);
        assert!("llm".parse::<Dimension>().is_err());
    }

    #[test]
    fn two_producers_give_two_stats() {
        let o = [
            obs("a", "alpha", Domain::Hpc, Some(Tier::Short), 0.5),
            obs("b", "beta", Domain::Hpc, Some(Tier::Short), 0.7),
        ];
        let stats = aggregate(&o, Dimension::Producer).unwrap();
        assert_eq!(stats.len(), 2);
        assert_eq!((stats[0].group.as_str(), stats[1].group.as_str()), ("alpha", "beta"));
        assert_eq!(stats[0].baseline_delta_percent, None, "no baselines present");
    }

    #[test]
    fn baseline_against_itself_is_zero() {
        let o = [
            obs("a", "alpha", Domain::Hpc, Some(Tier::Short), 0.5),
            obs("b", BASELINE_PRODUCER, Domain::Hpc, None, 0.8),
            obs("c", BASELINE_PRODUCER, Domain::Ml, None, 0.6),
        ];
        for dim in Dimension::ALL {
            for s in aggregate(&o, dim).unwrap() {
                if s.group.contains(BASELINE_PRODUCER) {
                    assert_eq!(s.baseline_delta_percent, Some(0.0), "{dim} {}", s.group);
                }
            }
        }
    }

    #[test]
    fn domain_deltas_use_same_domain_baselines() {
        let o = [
            obs("a", "alpha", Domain::Hpc, Some(Tier::Short), 0.9),
            obs("b", BASELINE_PRODUCER, Domain::Hpc, None, 0.6),
            obs("c", BASELINE_PRODUCER, Domain::Ml, None, 0.2),
            obs("d", "alpha", Domain::Ml, Some(Tier::Short), 0.3),
        ];
        let stats = aggregate(&o, Dimension::Domain).unwrap();
        let hpc = stats.iter().find(|s| s.group == "HPC").unwrap();
        // HPC mean 0.75 against HPC baseline 0.6.
        assert!((hpc.baseline_delta_percent.unwrap() - 25.0).abs() < 1e-9);
    }

    #[test]
    fn zero_reference_mean() {
        assert_eq!(delta_percent(0.0, 0.0), Some(0.0));
        assert_eq!(delta_percent(0.3, 0.0), None);
        assert_eq!(delta_percent(1.5, 1.0), Some(50.0));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(aggregate(&[], Dimension::Producer).is_err());
    }
}

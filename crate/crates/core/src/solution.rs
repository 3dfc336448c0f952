//! Candidate solutions with provenance and attempt history.

use serde::{Deserialize, Serialize};

use crate::corpus::Tier;

pub const BASELINE_PRODUCER: &str = "baseline";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionStatus {
    Raw,
    Adjusted,
    Adequate,
    Rejected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AdjustmentKind {
    MissingImport,
    EntryPointWrapper,
}

/// One logged minor edit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjustment {
    pub kind: AdjustmentKind,
    /// First line of the inserted text in the adjusted source.
    pub line: u32,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AdequacyReason {
    FatalParse,
    LaunchFailure,
    ShimProtocol,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub attempt: u32,
    pub transcript_id: Option<String>,
    /// Why the attempt failed: generation error, syntax error or failed run.
    pub error: Option<String>,
    pub adjustments: Vec<Adjustment>,
    pub adequate: bool,
    pub reasons: Vec<AdequacyReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub task_id: String,
    /// `None` for a baseline.
    pub tier: Option<Tier>,
    pub producer: String,
    pub attempt: u32,
    pub source_text: String,
    pub adjustments: Vec<Adjustment>,
    pub status: SolutionStatus,
    pub history: Vec<AttemptRecord>,
}

impl Solution {
    pub fn new(task_id: &str, tier: Option<Tier>, producer: &str, attempt: u32, source_text: String) -> Self {
        Solution {
            task_id: task_id.into(),
            tier,
            producer: producer.into(),
            attempt,
            source_text,
            adjustments: Vec::new(),
            status: SolutionStatus::Raw,
            history: Vec::new(),
        }
    }

    pub fn baseline(task_id: &str, source_text: String) -> Self {
        Solution::new(task_id, None, BASELINE_PRODUCER, 1, source_text)
    }

    pub fn is_baseline(&self) -> bool {
        self.tier.is_none()
    }

    /// `task/tier/producer`, with `baseline` in the tier slot for baselines.
    pub fn id(&self) -> String {
        solution_id(&self.task_id, self.tier, &self.producer)
    }

    pub fn tier_label(&self) -> &'static str {
        self.tier.map(Tier::as_str).unwrap_or(BASELINE_PRODUCER)
    }
}

pub fn solution_id(task_id: &str, tier: Option<Tier>, producer: &str) -> String {
    format!("{task_id}/{}/{producer}", tier.map(Tier::as_str).unwrap_or(BASELINE_PRODUCER))
}

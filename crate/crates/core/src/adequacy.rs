//! The executability gate: a solution is adequate when it parses and one
//! unprofiled run exits cleanly. Output correctness is not checked.

use serde::{Deserialize, Serialize};

use crate::corpus::TaskSpec;
use crate::profiler::{Profiler, RunFailure};
use crate::solution::{AdequacyReason, Adjustment, Solution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdequacyVerdict {
    pub adequate: bool,
    pub reasons: Vec<AdequacyReason>,
    pub adjustments_applied: Vec<Adjustment>,
    /// The failed run, when there was one.
    pub failure: Option<RunFailure>,
    pub syntax_error: Option<String>,
}

pub fn adequacy(solution: &Solution, task: &TaskSpec, profiler: &Profiler, seed: u64) -> AdequacyVerdict {
    let adjustments_applied = solution.adjustments.clone();
    if let Err(e) = pelli_analyzer::parse(&solution.source_text) {
        return AdequacyVerdict {
            adequate: false,
            reasons: vec![AdequacyReason::FatalParse],
            adjustments_applied,
            failure: None,
            syntax_error: Some(e.to_string()),
        };
    }
    let report = profiler.sanity_execute(solution, task, seed);
    AdequacyVerdict {
        adequate: report.ok,
        reasons: report.failure.iter().map(RunFailure::adequacy_reason).collect(),
        adjustments_applied,
        failure: report.failure,
        syntax_error: None,
    }
}

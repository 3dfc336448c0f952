//! Feedback prompts: the base prompt plus a templated findings summary.

use std::fmt::Write;

use pelli_analyzer::lint::CategoryCounts;
use pelli_analyzer::MetricVector;
use serde::{Deserialize, Serialize};

use super::{GenerationParams, GenerationRequest};
use crate::corpus::PromptVariant;

/// What the analyzer reported about an earlier solution. Never its code.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisFindings {
    #[serde(default)]
    pub counts: CategoryCounts,
    #[serde(default)]
    pub metrics: Option<MetricVector>,
}

impl AnalysisFindings {
    pub fn is_empty(&self) -> bool {
        self.counts == CategoryCounts::default() && self.metrics.is_none()
    }
}

pub fn render_refinement(base: &str, findings: &AnalysisFindings) -> String {
    if findings.is_empty() {
        return base.to_string();
    }
    let mut out = base.trim_end().to_string();
    out.push_str("\n\nStatic analysis of an earlier solution to this request reported:\n");
    let c = &findings.counts;
    let rows = [
        ("convention violations", c.convention),
        ("refactoring suggestions", c.refactor),
        ("warnings", c.warning),
        ("errors", c.error),
        ("fatal errors", c.fatal),
    ];
    let mut any = false;
    for (label, n) in rows {
        if n > 0 {
            any = true;
            let _ = writeln!(out, "- {label}: {n}");
        }
    }
    if !any {
        out.push_str("- no lint findings\n");
    }
    if let Some(m) = &findings.metrics {
        let _ = writeln!(
            out,
            "Metrics of that solution: maintainability index {:.2} of 100, total cyclomatic complexity {}, {} source lines, estimated delivered bugs {:.3}.",
            m.mi, m.cc_total, m.sloc, m.delivered_bugs
        );
    }
    out.push_str("Write a new solution that keeps the requested functionality and addresses these findings.\n");
    out
}

pub fn build_refinement_prompt(
    base: &PromptVariant,
    findings: &AnalysisFindings,
    provider_id: &str,
    params: GenerationParams,
) -> GenerationRequest {
    GenerationRequest::new(provider_id, &render_refinement(&base.text, findings), params)
}

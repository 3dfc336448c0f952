//! Composition of all static measurements for one source file.

use serde::{Deserialize, Serialize};

use crate::complexity::{cyclomatic_complexity, ComplexityReport};
use crate::error::SyntaxError;
use crate::halstead::{halstead, HalsteadReport};
use crate::lint::{fatal_finding, lint_with, CategoryCounts, LintConfig, LintFinding, Registry};
use crate::maintainability::maintainability_index;
use crate::parser::parse;
use crate::stats::{source_stats, SourceStats};

/// Raw measurements for one solution. The runtime slots are filled in by
/// the profiler; they stay `None` for static-only analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub mi: f64,
    pub convention_count: u64,
    pub refactor_count: u64,
    pub comments_to_loc: f64,
    pub comment_lines: u64,
    pub sloc: u64,
    pub method_count: u64,
    pub cc_total: u64,
    pub delivered_bugs: f64,
    pub warning_count: u64,
    pub error_count: u64,
    pub loc: u64,
    pub cpu_usage: Option<f64>,
    pub memory_usage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    /// `None` when the source failed to parse; the vector is then unusable.
    pub metrics: Option<MetricVector>,
    pub findings: Vec<LintFinding>,
    pub stats: Option<SourceStats>,
    pub complexity: Option<ComplexityReport>,
    pub halstead: Option<HalsteadReport>,
    pub syntax_error: Option<SyntaxError>,
}

impl Analysis {
    pub fn is_usable(&self) -> bool {
        self.metrics.is_some()
    }

    pub fn counts(&self) -> CategoryCounts {
        CategoryCounts::tally(&self.findings)
    }
}

pub fn analyze(source: &str) -> Analysis {
    analyze_with(source, Registry::builtin(), &LintConfig::default())
}

pub fn analyze_with(source: &str, registry: &Registry, config: &LintConfig) -> Analysis {
    let tree = match parse(source) {
        Ok(t) => t,
        Err(e) => {
            return Analysis {
                metrics: None,
                findings: vec![fatal_finding(&e)],
                stats: None,
                complexity: None,
                halstead: None,
                syntax_error: Some(e),
            }
        }
    };
    let stats = source_stats(&tree, source);
    let cx = cyclomatic_complexity(&tree.module);
    let hal = halstead(&tree.module);
    let findings = lint_with(&tree, source, registry, config);
    let counts = CategoryCounts::tally(&findings);
    let metrics = MetricVector {
        mi: maintainability_index(&stats, &hal, &cx),
        convention_count: counts.convention,
        refactor_count: counts.refactor,
        comments_to_loc: stats.comments_to_loc(),
        comment_lines: stats.comment_lines,
        sloc: stats.sloc,
        method_count: stats.method_count,
        cc_total: cx.total_cc,
        delivered_bugs: hal.delivered_bugs,
        warning_count: counts.warning,
        error_count: counts.error,
        loc: stats.loc,
        cpu_usage: None,
        memory_usage: None,
    };
    Analysis {
        metrics: Some(metrics),
        findings,
        stats: Some(stats),
        complexity: Some(cx),
        halstead: Some(hal),
        syntax_error: None,
    }
}

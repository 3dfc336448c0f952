//! Maintainability index.
//!
//! ```text
//! mi = clamp(100 * (171 - 5.2 ln(max(V, 1)) - 0.23 CC - 16.2 ln(SLOC)
//!                   + 50 sin(sqrt(2.46 * rad(C)))) / 171, 0, 100)
//! ```
//!
//! `V` is the Halstead volume, `CC` the total cyclomatic complexity and `C`
//! the percentage of physical lines that are comment or docstring lines,
//! converted from degrees to radians. A file with no source lines scores 100.

use crate::complexity::ComplexityReport;
use crate::halstead::HalsteadReport;
use crate::stats::SourceStats;

/// Weight inside the comment term, as used by the common Python tooling.
pub const COMMENT_WEIGHT: f64 = 2.46;

pub fn maintainability_index(stats: &SourceStats, hal: &HalsteadReport, cx: &ComplexityReport) -> f64 {
    mi_formula(hal.volume, cx.total_cc, stats.sloc, stats.comment_lines, stats.loc)
}

pub fn mi_formula(volume: f64, total_cc: u64, sloc: u64, comment_lines: u64, loc: u64) -> f64 {
    if sloc == 0 {
        return 100.0;
    }
    let comment_percent = if loc == 0 { 0.0 } else { 100.0 * comment_lines as f64 / loc as f64 };
    let raw = 171.0 - 5.2 * volume.max(1.0).ln() - 0.23 * total_cc as f64 - 16.2 * (sloc as f64).ln()
        + 50.0 * (COMMENT_WEIGHT * comment_percent.to_radians()).sqrt().sin();
    (100.0 * raw / 171.0).clamp(0.0, 100.0)
}

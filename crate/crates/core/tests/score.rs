//! Metric table conformance, golden arithmetic and range invariants of the
//! score pipeline.

use std::path::Path;

use pelli_analyzer::MetricVector;
use pelli_core::score::{
    invert, normalize, process_group, scale, smooth, GroupMember, MetricId, MetricSpecTable, Normalizer, Scaler,
};
use proptest::prelude::*;

#[test]
fn builtin_table_equals_frozen_fixture() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/metric_specs_frozen.json");
    let frozen = std::fs::read_to_string(path).unwrap();
    assert_eq!(MetricSpecTable::builtin().to_pretty_json(), frozen);
}

#[test]
fn table_shape() {
    let t = MetricSpecTable::builtin();
    assert_eq!(t.0.len(), 11);
    let smoothed: Vec<MetricId> = t.0.iter().filter(|s| s.smoothing_k.is_some()).map(|s| s.metric).collect();
    assert_eq!(smoothed, [MetricId::Convention, MetricId::Refactoring, MetricId::Warnings, MetricId::Errors]);
    assert!(t.0.iter().filter_map(|s| s.smoothing_k).all(|k| k == 0.01));
    let by_methods: Vec<MetricId> =
        t.0.iter().filter(|s| s.normalizer == Normalizer::Methods).map(|s| s.metric).collect();
    assert_eq!(by_methods, [MetricId::Sloc, MetricId::CyclomaticComplexity]);
    let fixed: Vec<MetricId> =
        t.0.iter().filter(|s| matches!(s.scaler, Scaler::FixedRange { .. })).map(|s| s.metric).collect();
    assert_eq!(fixed, [MetricId::MaintainabilityIndex, MetricId::CpuUsage]);
    let kept: Vec<MetricId> = t.0.iter().filter(|s| !s.inverse).map(|s| s.metric).collect();
    assert_eq!(kept, [MetricId::MaintainabilityIndex, MetricId::Comments]);
}

fn vector(conv: u64, loc: u64) -> MetricVector {
    MetricVector {
        mi: 80.0,
        convention_count: conv,
        refactor_count: 0,
        comments_to_loc: 0.0,
        comment_lines: 0,
        sloc: loc,
        method_count: 1,
        cc_total: 1,
        delivered_bugs: 0.01,
        warning_count: 0,
        error_count: 0,
        loc,
        cpu_usage: Some(37.5),
        memory_usage: Some(1000.0),
    }
}

fn members(vs: Vec<MetricVector>, reference: &[bool]) -> Vec<GroupMember> {
    vs.into_iter()
        .enumerate()
        .map(|(i, v)| GroupMember {
            solution_id: format!("s{i}"),
            metrics: Some(v),
            in_reference: reference.get(i).copied().unwrap_or(true),
        })
        .collect()
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs()
}

#[test]
fn worked_example_matches_exact_fractions() {
    // Smoothed counts 0.01, 2.01, 5.01 over LOC 10, 20, 50 give
    // 1/1000, 201/2000, 501/5000; the max is 201/2000.
    let out = process_group(
        "g",
        &members(vec![vector(0, 10), vector(2, 20), vector(5, 50)], &[]),
        MetricSpecTable::builtin(),
    );
    let conv: Vec<_> = out.scores.iter().map(|s| s.metrics[&MetricId::Convention].clone()).collect();
    let normalized = [1.0 / 1000.0, 201.0 / 2000.0, 501.0 / 5000.0];
    let scaled = [2.0 / 201.0, 1.0, 334.0 / 335.0];
    let inverted = [199.0 / 201.0, 0.0, 1.0 / 335.0];
    for i in 0..3 {
        assert!(rel_close(conv[i].normalized, normalized[i]), "{i}");
        assert!(rel_close(conv[i].scaled, scaled[i]), "{i}");
        assert!(rel_close(conv[i].value, inverted[i]), "{i}");
    }
    assert!(rel_close(conv[0].value, 0.9900497512437811));
    assert!(rel_close(conv[2].value, 0.0029850746268656717));
    assert_eq!(conv[1].value, 0.0);
}

#[test]
fn stage_examples_are_exact() {
    assert_eq!(smooth(0.0, 0.01), 0.01);
    assert_eq!(smooth(5.0, 0.01), 5.01);
    assert_eq!(normalize(5.0, 50), (0.1, false));
    assert_eq!(normalize(40.0, 4), (10.0, false));
    assert_eq!(normalize(9.0, 0), (9.0, true));
    assert_eq!(scale(&[2.0, 4.0, 8.0], &[2.0, 4.0, 8.0], Scaler::MaxObserved), [0.25, 0.5, 1.0]);
    assert_eq!(scale(&[80.0], &[], Scaler::FixedRange { upper: 100.0 }), [0.8]);
    assert_eq!(scale(&[37.5], &[], Scaler::FixedRange { upper: 100.0 }), [0.375]);
    assert_eq!(invert(0.3), 0.7);
    assert_eq!(invert(1.0), 0.0);
}

fn metric_vector() -> impl Strategy<Value = MetricVector> {
    (
        (0.0..=100.0f64, 0u64..60, 0u64..20, 0u64..40, 0u64..15, 0u64..8),
        (1u64..400, 0u64..25, 0u64..80, 0.0..5.0f64, 0.0..=100.0f64, 1.0..1e9f64),
    )
        .prop_map(|((mi, conv, refac, comments, warn, err), (loc, methods, cc, bugs, cpu, mem))| MetricVector {
            mi,
            convention_count: conv,
            refactor_count: refac,
            comments_to_loc: comments.min(loc) as f64 / loc as f64,
            comment_lines: comments.min(loc),
            sloc: loc.saturating_sub(comments.min(loc)),
            method_count: methods,
            cc_total: cc,
            delivered_bugs: bugs,
            warning_count: warn,
            error_count: err,
            loc,
            cpu_usage: Some(cpu),
            memory_usage: Some(mem),
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn scores_stay_in_range_and_keep_order(group in prop::collection::vec(metric_vector(), 1..8)) {
        let table = MetricSpecTable::builtin();
        let out = process_group("g", &members(group, &[]), table);
        for spec in &table.0 {
            let rows: Vec<_> = out.scores.iter().map(|s| &s.metrics[&spec.metric]).collect();
            let max = rows.iter().map(|m| m.normalized).fold(f64::MIN, f64::max);
            for a in &rows {
                prop_assert!((0.0..=1.0).contains(&a.value), "{} {}", spec.metric, a.value);
                if spec.scaler == Scaler::MaxObserved && max > 0.0 {
                    prop_assert_eq!(a.scaled == 1.0, a.normalized == max, "{}", spec.metric);
                }
                for b in &rows {
                    if a.normalized < b.normalized {
                        prop_assert!(a.scaled <= b.scaled);
                        if spec.inverse {
                            prop_assert!(a.value >= b.value);
                        } else {
                            prop_assert!(a.value <= b.value);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn members_outside_the_reference_are_clamped(
        group in prop::collection::vec(metric_vector(), 2..6),
        reference in prop::collection::vec(any::<bool>(), 6),
    ) {
        let out = process_group("g", &members(group, &reference), MetricSpecTable::builtin());
        for s in &out.scores {
            for m in s.metrics.values() {
                prop_assert!((0.0..=1.0).contains(&m.value));
            }
        }
    }
}

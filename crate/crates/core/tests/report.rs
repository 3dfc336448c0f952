//! Aggregation statistics against frozen numpy values, delta phrasing and
//! export shape.

use std::collections::BTreeMap;

use pelli_core::corpus::{Algorithm, Domain, Tier};
use pelli_core::report::{
    aggregate, export, quantile, Dimension, Observation, RunReport, RuntimeRecord, SolutionRecord,
};
use pelli_core::score::{process_group, GroupMember, MetricId, MetricSpecTable};
use pelli_core::solution::{solution_id, SolutionStatus, BASELINE_PRODUCER};

/// numpy.quantile(values, [0, .25, .5, .75, 1]) and numpy.mean, frozen.
const NUMPY: &[(&[f64], [f64; 5], f64)] = &[
    (&[0.5], [0.5, 0.5, 0.5, 0.5, 0.5], 0.5),
    (&[0.2, 0.9], [0.2, 0.375, 0.55, 0.7250000000000001, 0.9], 0.55),
    (&[0.3, 0.1, 0.7], [0.1, 0.2, 0.3, 0.5, 0.7], 0.3666666666666667),
    (&[0.9, 0.05, 0.4, 0.4, 0.66, 0.12, 1.0], [0.05, 0.26, 0.4, 0.78, 1.0], 0.5042857142857143),
    (&[0.11, 0.52, 0.33, 0.74, 0.95, 0.26, 0.47, 0.68, 0.89, 0.0], [0.0, 0.2775, 0.495, 0.725, 0.95], 0.495),
];

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn obs(id: &str, producer: &str, tier: Option<Tier>, v: f64) -> Observation {
    Observation {
        solution_id: id.into(),
        producer: producer.into(),
        domain: Domain::Hpc,
        tier,
        values: BTreeMap::from([(MetricId::MaintainabilityIndex, v)]),
    }
}

#[test]
fn quartiles_match_numpy() {
    for (values, q, m) in NUMPY {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        for (i, p) in [0.0, 0.25, 0.5, 0.75, 1.0].into_iter().enumerate() {
            assert!(close(quantile(&sorted, p), q[i]), "{values:?} q{p}: {} vs {}", quantile(&sorted, p), q[i]);
        }
        let o: Vec<_> =
            values.iter().enumerate().map(|(i, &v)| obs(&i.to_string(), "alpha", Some(Tier::Short), v)).collect();
        let s = &aggregate(&o, Dimension::Producer).unwrap()[0];
        assert!(close(s.mean, *m));
        assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
        assert_eq!((s.min, s.max), (q[0], q[4]));
    }
}

#[test]
fn nine_percent_above_average() {
    let o = [
        obs("a1", "alpha", Some(Tier::Short), 0.545),
        obs("a2", "alpha", Some(Tier::Long), 0.545),
        obs("b1", "beta", Some(Tier::Short), 0.455),
        obs("b2", "beta", Some(Tier::Long), 0.455),
    ];
    let stats = aggregate(&o, Dimension::Producer).unwrap();
    let alpha = stats.iter().find(|s| s.group == "alpha").unwrap();
    assert!((alpha.average_delta_percent.unwrap() - 9.0).abs() < 1e-9, "{:?}", alpha.average_delta_percent);
    let beta = stats.iter().find(|s| s.group == "beta").unwrap();
    assert!((beta.average_delta_percent.unwrap() + 9.0).abs() < 1e-9);
}

#[test]
fn conservation_over_every_dimension() {
    let o: Vec<_> = (0..12)
        .map(|i| {
            let producer = ["alpha", "beta", BASELINE_PRODUCER][i % 3];
            let tier = if producer == BASELINE_PRODUCER { None } else { Some(Tier::ALL[i % 3]) };
            let mut x = obs(&format!("s{i}"), producer, tier, i as f64 / 12.0);
            x.domain = Domain::ALL[i % 3];
            x
        })
        .collect();
    for dim in Dimension::ALL {
        let total: usize = aggregate(&o, dim).unwrap().iter().map(|s| s.count).sum();
        assert_eq!(total, o.len(), "{dim}");
    }
}

const SOURCES: [&str; 4] = [
    "def f(a):\n    return sorted(a)\n",
    "def f(a):\n    # sort\n    out = list(a)\n    out.sort()\n    return out\n",
    "def f(a):\n    if not a:\n        return a\n    p = a[0]\n    return f([x for x in a[1:] if x < p]) + [p] + f([x for x in a[1:] if x >= p])\n",
    "def F(A):\n    B = list(A)\n    B.sort()\n    return B\n",
];

/// Two producers on one task and two tiers, plus the baseline.
fn sample_report() -> RunReport {
    let mut cells = vec![];
    for (i, producer) in ["alpha", "beta"].into_iter().enumerate() {
        for (j, tier) in [Tier::Short, Tier::Long].into_iter().enumerate() {
            cells.push((producer, Some(tier), SOURCES[(i + j) % 4]));
        }
    }
    cells.push((BASELINE_PRODUCER, None, SOURCES[3]));

    let members: Vec<GroupMember> = cells
        .iter()
        .enumerate()
        .map(|(k, (producer, tier, src))| {
            let mut m = pelli_analyzer::analyze(src).metrics.unwrap();
            m.cpu_usage = Some(20.0 + k as f64);
            m.memory_usage = Some(1e7 * (k + 1) as f64);
            GroupMember {
                solution_id: solution_id("quick_sort", *tier, producer),
                metrics: Some(m),
                in_reference: true,
            }
        })
        .collect();
    let scored = process_group("quick_sort", &members, MetricSpecTable::builtin());
    let solutions = cells
        .iter()
        .zip(&members)
        .zip(scored.scores)
        .map(|(((producer, tier, src), member), sv)| {
            let m = member.metrics.clone().unwrap();
            SolutionRecord {
                solution_id: member.solution_id.clone(),
                task_id: "quick_sort".into(),
                algorithm: Algorithm::QuickSort,
                domain: Algorithm::QuickSort.domain(),
                tier: *tier,
                producer: producer.to_string(),
                status: SolutionStatus::Adequate,
                attempt: 1,
                adjustments: vec![],
                history: vec![],
                lint_counts: pelli_analyzer::analyze(src).counts(),
                runtime: RuntimeRecord {
                    cpu_usage: m.cpu_usage.unwrap(),
                    memory_usage: m.memory_usage.unwrap(),
                    samples: vec![],
                },
                metrics: m,
                scores: sv.metrics,
            }
        })
        .collect();
    RunReport::assemble(serde_json::json!({"mode": "replay"}), "abc".into(), solutions, vec![])
}

#[test]
fn export_shapes() {
    let report = sample_report();
    let dir = tempfile::tempdir().unwrap();
    let written = export(&report, dir.path()).unwrap();
    assert_eq!(written.len(), 4 + 11);

    let scores = std::fs::read_to_string(dir.path().join("scores.csv")).unwrap();
    assert_eq!(scores.lines().next().unwrap(), "solution,metric,raw,processed");
    assert_eq!(scores.lines().count() - 1, 5 * 11);

    let groups = std::fs::read_to_string(dir.path().join("groups.csv")).unwrap();
    let producer_rows = groups.lines().filter(|l| l.starts_with("producer,")).count();
    assert_eq!(producer_rows, 3 * 11, "alpha, beta, baseline");
    let baseline_mi: Vec<&str> = groups
        .lines()
        .find(|l| l.starts_with("producer,baseline,maintainability_index,"))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!((baseline_mi[3], baseline_mi[10]), ("1", "0"));

    let report_json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(!report_json.contains("cpu_usage") && !report_json.contains("memory_usage"));
    let runtime = std::fs::read_to_string(dir.path().join("runtime.json")).unwrap();
    assert!(runtime.contains("cpu_usage"));

    let plot: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("plots/cpu_usage.json")).unwrap()).unwrap();
    assert_eq!(plot["series"]["producer"].as_array().unwrap().len(), 3);
}

#[test]
fn export_is_byte_stable() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    export(&sample_report(), a.path()).unwrap();
    export(&sample_report(), b.path()).unwrap();
    for f in ["report.json", "scores.csv", "groups.csv", "plots/maintainability_index.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn baseline_group_has_zero_delta_in_export() {
    let report = sample_report();
    for g in report.groups.iter().filter(|g| g.group == BASELINE_PRODUCER) {
        assert_eq!(g.baseline_delta_percent, Some(0.0), "{:?}", g.metric);
    }
}

//! Analyzer output checked against values frozen from the independent
//! CPython-based oracle in `tests/oracle/metric_oracle.py`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pelli_analyzer::maintainability::mi_formula;
use pelli_analyzer::{analyze, parse};
use serde_json::Value;

fn dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn load_json(path: PathBuf) -> Value {
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

fn read(dir_name: &str, file: &str) -> String {
    std::fs::read_to_string(dir(dir_name).join(file)).unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn check_fixture(name: &str, source: &str, want: &Value) {
    let tree = parse(source).unwrap_or_else(|e| panic!("{name}: {e}"));
    assert_eq!(tree.node_count() as u64, want["node_count"].as_u64().unwrap(), "{name} node_count");

    let analysis = analyze(source);
    let stats = analysis.stats.as_ref().unwrap();
    let int = |k: &str| want[k].as_u64().unwrap();
    assert_eq!(stats.loc, int("loc"), "{name} loc");
    assert_eq!(stats.sloc, int("sloc"), "{name} sloc");
    assert_eq!(stats.comment_lines, int("comment_lines"), "{name} comment_lines");
    assert_eq!(stats.blank_lines, int("blank_lines"), "{name} blank_lines");
    assert_eq!(stats.method_count, int("method_count"), "{name} method_count");

    let cx = analysis.complexity.as_ref().unwrap();
    assert_eq!(cx.total_cc, int("cc_total"), "{name} cc_total");
    let got: Vec<(String, u64, u64)> = cx.functions.iter().map(|f| (f.name.clone(), f.line as u64, f.cc)).collect();
    let expected: Vec<(String, u64, u64)> = want["cc_functions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| (row[0].as_str().unwrap().to_string(), row[1].as_u64().unwrap(), row[2].as_u64().unwrap()))
        .collect();
    assert_eq!(got, expected, "{name} per-function cc");

    let hal = analysis.halstead.as_ref().unwrap();
    assert_eq!(
        (hal.n1, hal.n2, hal.big_n1, hal.big_n2),
        (int("n1"), int("n2"), int("N1"), int("N2")),
        "{name} halstead counts"
    );
    let volume = want["volume"].as_f64().unwrap();
    assert!(rel_close(hal.volume, volume, 1e-9), "{name} volume {} vs {volume}", hal.volume);
    let bugs = want["delivered_bugs"].as_f64().unwrap();
    assert!(rel_close(hal.delivered_bugs, bugs, 1e-9), "{name} bugs {} vs {bugs}", hal.delivered_bugs);

    let metrics = analysis.metrics.as_ref().unwrap();
    let mi = want["mi"].as_f64().unwrap();
    assert!((metrics.mi - mi).abs() <= 1e-9, "{name} mi {} vs {mi}", metrics.mi);
    let recomputed = mi_formula(hal.volume, cx.total_cc, stats.sloc, stats.comment_lines, stats.loc);
    assert!((metrics.mi - recomputed).abs() <= 1e-9, "{name} mi formula");
}

#[test]
fn fixtures_match_oracle() {
    let expected = load_json(dir("oracle").join("expected_metrics.json"));
    let fixtures = expected["fixtures"].as_object().unwrap();
    assert!(fixtures.len() >= 18);
    for (name, want) in fixtures {
        check_fixture(name, &read("fixtures", name), want);
    }
}

#[test]
fn five_hundred_line_file_matches_oracle() {
    let expected = load_json(dir("oracle").join("expected_large.json"));
    let source = read("large", "five_hundred.py");
    assert_eq!(source.lines().count(), 500);
    check_fixture("five_hundred.py", &source, &expected["fixtures"]["five_hundred.py"]);
}

#[test]
fn five_hundred_line_file_is_fast() {
    let source = read("large", "five_hundred.py");
    let start = Instant::now();
    let analysis = analyze(&source);
    let elapsed = start.elapsed();
    assert!(analysis.is_usable());
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
}

#[test]
fn lint_counts_match_hand_labels() {
    let labels = load_json(dir("oracle").join("lint_labels.json"));
    let fixtures = labels["fixtures"].as_object().unwrap();
    assert!(fixtures.len() >= 18);
    for (name, want) in fixtures {
        let analysis = analyze(&read("fixtures", name));
        let mut got: BTreeMap<String, u64> = BTreeMap::new();
        for f in &analysis.findings {
            *got.entry(f.rule_id.clone()).or_default() += 1;
        }
        let want: BTreeMap<String, u64> =
            want.as_object().unwrap().iter().map(|(k, v)| (k.clone(), v.as_u64().unwrap())).collect();
        assert_eq!(got, want, "{name}");
    }
}

#[test]
fn mi_matches_reference_tool_where_definitions_coincide() {
    let expected = load_json(dir("oracle").join("expected_metrics.json"));
    let want = expected["fixtures"]["mi_reference.py"]["reference_mi"].as_f64().unwrap();
    let got = analyze(&read("fixtures", "mi_reference.py")).metrics.unwrap().mi;
    assert!((got - want).abs() <= 0.5, "{got} vs reference {want}");
}

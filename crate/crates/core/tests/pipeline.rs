//! End-to-end runs over the shipped demo replay store and over stores
//! built on the fly.

use std::path::{Path, PathBuf};
use std::time::Instant;

use pelli_core::config::PipelineConfig;
use pelli_core::corpus::{load_corpus, Tier};
use pelli_core::gateway::{network_requests, ReplayStore, Transcript};
use pelli_core::pipeline::run_pipeline;
use pelli_core::report::{ExclusionReason, RunReport};
use pelli_core::solution::AdequacyReason;
use serde_json::Value;

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn demo_config(out: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::load(&repo().join("demo/config.json")).unwrap();
    cfg.output_dir = out.to_path_buf();
    cfg
}

fn report_json(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn cells(report: &RunReport) -> usize {
    report.solutions.len() + report.exclusions.len()
}

#[test]
fn shipped_replay_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let before = network_requests();
    let start = Instant::now();
    let first = run_pipeline(&demo_config(a.path())).unwrap();
    let elapsed = start.elapsed();
    run_pipeline(&demo_config(b.path())).unwrap();
    assert_eq!(network_requests(), before);
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");

    let bytes_a = std::fs::read(a.path().join("report.json")).unwrap();
    let bytes_b = std::fs::read(b.path().join("report.json")).unwrap();
    assert!(bytes_a == bytes_b, "report.json differs between runs");

    // 3 tasks, each with a baseline and 3 tiers x 2 producers.
    assert_eq!(cells(&first.report), 21);
    assert!(first.report.exclusions.is_empty());
    for s in &first.report.solutions {
        assert_eq!(s.runtime.samples.len(), 5, "{}", s.solution_id);
        assert!(!s.history.is_empty());
        assert!(s.history.last().unwrap().adequate);
    }
    let text = String::from_utf8(bytes_a).unwrap();
    assert!(!text.contains("cpu_usage") && !text.contains("memory_usage"));
}

#[test]
fn shipped_replay_exercises_adjustments_and_follow_ups() {
    let out = tempfile::tempdir().unwrap();
    let report = run_pipeline(&demo_config(out.path())).unwrap().report;
    let find = |id: &str| report.solutions.iter().find(|s| s.solution_id == id).unwrap();

    let kinds = |id: &str| -> Vec<String> { find(id).adjustments.iter().map(|a| format!("{:?}", a.kind)).collect() };
    assert_eq!(kinds("convolution/short/alpha"), ["MissingImport"]);
    assert_eq!(kinds("quick_sort/medium/alpha"), ["EntryPointWrapper"]);
    assert_eq!(kinds("convolution/medium/beta"), ["EntryPointWrapper"]);

    let raised = find("quick_sort/short/beta");
    assert_eq!(raised.attempt, 2);
    assert_eq!(raised.history[0].error.as_deref(), Some("IndexError: list index out of range"));

    let broken = find("rabin_karp/long/beta");
    assert_eq!(broken.attempt, 2);
    assert_eq!(broken.history[0].reasons, [AdequacyReason::FatalParse]);
    assert!(broken.history[0].transcript_id.is_some());
}

/// Copies the shipped store and adds a producer whose every reply fails to
/// parse.
fn store_with_broken_producer(dir: &Path, tasks: &[&str]) {
    let shipped = repo().join("demo/replay");
    std::fs::create_dir_all(dir).unwrap();
    for entry in std::fs::read_dir(&shipped).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), dir.join(entry.file_name())).unwrap();
    }
    let corpus = load_corpus(&repo().join("corpus")).unwrap();
    let store = ReplayStore::new(dir);
    for task in tasks {
        for tier in Tier::ALL {
            for attempt in 1..=3 {
                store
                    .put(&Transcript {
                        provider_id: "gamma".into(),
                        attempt,
                        prompt: corpus.prompt(task, tier).unwrap().text.clone(),
                        raw_text: "```python\ndef broken(:\n    pass\n```\n".into(),
                        metadata: Default::default(),
                    })
                    .unwrap();
            }
        }
    }
}

#[test]
fn unparseable_producer_is_excluded_without_touching_the_others() {
    let tmp = tempfile::tempdir().unwrap();
    let store = tmp.path().join("store");
    store_with_broken_producer(&store, &["quick_sort"]);

    let mut clean = demo_config(&tmp.path().join("clean"));
    clean.tasks = Some(vec!["quick_sort".into()]);
    clean.replay_store = Some(store.clone());
    let mut faulty = clean.clone();
    faulty.output_dir = tmp.path().join("faulty");
    let mut gamma = faulty.providers[0].clone();
    gamma.id = "gamma".into();
    faulty.providers.push(gamma);

    let clean_report = run_pipeline(&clean).unwrap().report;
    let faulty_report = run_pipeline(&faulty).unwrap().report;

    assert_eq!(faulty_report.exclusions.len(), 3);
    for e in &faulty_report.exclusions {
        assert_eq!(e.producer, "gamma");
        assert_eq!(e.reason, ExclusionReason::FatalParse);
        assert_eq!(e.history.len(), 3);
        assert!(e.history.iter().all(|h| h.reasons == [AdequacyReason::FatalParse]));
    }
    assert_eq!(cells(&faulty_report), 1 + 3 * 3);

    // Static scores do not depend on measurements, so they must agree.
    let static_view = |dir: &Path| -> Value { report_json(dir)["solutions"].clone() };
    assert_eq!(static_view(&tmp.path().join("clean")), static_view(&tmp.path().join("faulty")));
    assert_eq!(clean_report.solutions.len(), faulty_report.solutions.len());
}

#[test]
fn missing_transcripts_exclude_only_their_cells() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = demo_config(&tmp.path().join("out"));
    cfg.tasks = Some(vec!["rabin_karp".into()]);
    let mut delta = cfg.providers[0].clone();
    delta.id = "delta".into();
    cfg.providers.push(delta);
    let report = run_pipeline(&cfg).unwrap().report;
    let misses: Vec<&str> = report
        .exclusions
        .iter()
        .filter(|e| e.reason == ExclusionReason::ReplayMiss)
        .map(|e| e.solution_id.as_str())
        .collect();
    assert_eq!(misses, ["rabin_karp/long/delta", "rabin_karp/medium/delta", "rabin_karp/short/delta"]);
    assert_eq!(report.solutions.len(), 7);
    assert_eq!(cells(&report), 1 + 3 * 3);
}

#[test]
fn baseline_only_run_has_zero_baseline_deltas() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = demo_config(&tmp.path().join("out"));
    cfg.tasks = None;
    cfg.providers.clear();
    cfg.runs_per_solution = 1;
    let report = run_pipeline(&cfg).unwrap().report;
    assert_eq!(report.solutions.len(), 9);
    assert!(report.exclusions.is_empty());
    for g in &report.groups {
        assert_eq!(g.baseline_delta_percent, Some(0.0), "{} {} {}", g.dimension, g.group, g.metric);
    }
}

//! Runtime profiler against controlled fixtures and the stub child process.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use pelli_core::corpus::{Algorithm, ArgSpec, EntryPoint, InputFormat, InputSpec, TaskSpec};
use pelli_core::profiler::{Profiler, ProfilerConfig, RunFailure};
use pelli_core::solution::{AdequacyReason, Solution};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn profiler(runs: usize) -> Profiler {
    let mut cfg = ProfilerConfig::new("python3", root().join("../../demo/stub_shim.py"));
    cfg.runs = runs;
    Profiler::new(cfg)
}

fn task(timeout_secs: f64) -> TaskSpec {
    TaskSpec {
        id: "fixture".into(),
        domain: Algorithm::QuickSort.domain(),
        algorithm: Algorithm::QuickSort,
        entry_point: EntryPoint { name: "run".into(), arity: 1 },
        input_spec: InputSpec { format: InputFormat::Json, args: vec![ArgSpec::Int { value: 1 }] },
        timeout_secs,
        allowed_imports: Default::default(),
    }
}

fn fixture(name: &str) -> Solution {
    let text = std::fs::read_to_string(root().join("tests/fixtures/runtime").join(name)).unwrap();
    Solution::baseline("fixture", text)
}

#[test]
fn sleeping_solution_uses_little_cpu() {
    let agg = profiler(5).profile(&fixture("sleep.py"), &task(10.0), 1);
    assert!(agg.success, "{:?}", agg.failure);
    assert_eq!(agg.samples.len(), 5);
    for s in &agg.samples {
        assert!(s.cpu_percent < 10.0, "cpu {}", s.cpu_percent);
        assert!(s.wall_time >= 1.0);
        assert!(s.peak_rss_bytes > 0);
        assert_eq!(s.exit_status, Some(0));
    }
    let mean = agg.samples.iter().map(|s| s.cpu_percent).sum::<f64>() / 5.0;
    assert!((agg.cpu_usage.unwrap() - mean).abs() < 1e-12);
}

#[test]
fn busy_loop_outranks_sleep_on_cpu() {
    let p = profiler(5);
    let busy = p.profile(&fixture("busy.py"), &task(10.0), 1);
    let sleep = p.profile(&fixture("sleep.py"), &task(10.0), 1);
    assert_eq!((busy.samples.len(), sleep.samples.len()), (5, 5));
    assert!(busy.cpu_usage.unwrap() > sleep.cpu_usage.unwrap());
    assert!(busy.samples.iter().all(|s| (0.0..=100.0).contains(&s.cpu_percent)));
}

#[test]
fn allocation_outranks_minimal_on_memory() {
    let p = profiler(5);
    let alloc = p.profile(&fixture("alloc.py"), &task(10.0), 1);
    let minimal = p.profile(&fixture("minimal.py"), &task(10.0), 1);
    assert!(alloc.memory_usage.unwrap() > minimal.memory_usage.unwrap());
    assert!(alloc.memory_usage.unwrap() > 90.0 * 1024.0 * 1024.0);
}

#[test]
fn infinite_loop_times_out() {
    let start = Instant::now();
    let agg = profiler(5).profile(&fixture("forever.py"), &task(2.0), 1);
    assert!(!agg.success);
    assert_eq!(agg.failure, Some(RunFailure::Timeout));
    assert_eq!(agg.samples.len(), 1, "stops after the first failed run");
    let wall = agg.samples[0].wall_time;
    assert!((2.0..2.5).contains(&wall), "wall {wall}");
    assert!(start.elapsed() < Duration::from_secs(4));
}

#[test]
fn sanity_execute_reports_status_only() {
    let p = profiler(1);
    let ok = p.sanity_execute(&fixture("minimal.py"), &task(10.0), 1);
    assert!(ok.ok);
    assert!(ok.shim.unwrap().result_digest.is_some());

    let raised = p.sanity_execute(&fixture("raises.py"), &task(10.0), 1);
    assert!(!raised.ok);
    assert!(raised.stderr_tail.contains("ValueError"));
    assert_eq!(raised.exit_status, Some(4));
    let failure = raised.failure.unwrap();
    assert!(matches!(&failure, RunFailure::SolutionException { type_name, .. } if type_name == "ValueError"));
    assert_eq!(failure.adequacy_reason(), AdequacyReason::LaunchFailure);

    let missing = p.sanity_execute(&fixture("no_entry.py"), &task(10.0), 1);
    assert_eq!(missing.exit_status, Some(3));
    assert_eq!(missing.failure, Some(RunFailure::EntryPointMissing));
    assert_eq!(missing.failure.unwrap().adequacy_reason(), AdequacyReason::ShimProtocol);
}

#[test]
fn missing_interpreter_is_a_launch_failure() {
    let cfg = ProfilerConfig::new("/nonexistent/python", root().join("../../demo/stub_shim.py"));
    let report = Profiler::new(cfg).sanity_execute(&fixture("minimal.py"), &task(5.0), 1);
    assert!(matches!(report.failure, Some(RunFailure::LaunchFailure { .. })));
}

#[test]
fn concurrent_callers_are_serialized() {
    let p = profiler(2);
    let start = Instant::now();
    std::thread::scope(|s| {
        for _ in 0..2 {
            s.spawn(|| {
                let agg = p.profile(&fixture("nap.py"), &task(10.0), 1);
                assert!(agg.success);
            });
        }
    });
    assert!(start.elapsed() >= Duration::from_millis(4 * 150), "{:?}", start.elapsed());
}

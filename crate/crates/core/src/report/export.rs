use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::{Dimension, GroupStat, RunReport};
use crate::error::CoreError;
use crate::score::MetricId;

/// 12 significant digits, shortest form that round-trips that rounding.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CoreError> {
    std::fs::write(path, bytes).map_err(|e| CoreError::io(path, e))
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s.into_bytes()
}

const RUNTIME_KEYS: [&str; 2] = ["cpu_usage", "memory_usage"];

/// The reproducible part of the report.
fn deterministic_view(report: &RunReport) -> Value {
    let mut v = serde_json::to_value(report).expect("report serializes");
    for s in v["solutions"].as_array_mut().into_iter().flatten() {
        let obj = s.as_object_mut().expect("solution is an object");
        obj.remove("runtime");
        for key in RUNTIME_KEYS {
            obj["metrics"].as_object_mut().expect("metrics object").remove(key);
            obj["scores"].as_object_mut().expect("scores object").remove(key);
        }
    }
    v["groups"] = Value::Array(
        report
            .groups
            .iter()
            .filter(|g| !g.metric.is_runtime())
            .map(|g| serde_json::to_value(g).expect("group serializes"))
            .collect(),
    );
    v
}

fn runtime_view(report: &RunReport) -> Value {
    let solutions: Vec<Value> = report
        .solutions
        .iter()
        .map(|s| {
            let scores: BTreeMap<&str, _> =
                s.scores.iter().filter(|(m, _)| m.is_runtime()).map(|(m, sc)| (m.as_str(), sc)).collect();
            json!({
                "solution_id": s.solution_id,
                "cpu_usage": s.runtime.cpu_usage,
                "memory_usage": s.runtime.memory_usage,
                "samples": s.runtime.samples,
                "scores": scores,
            })
        })
        .collect();
    let groups: Vec<&GroupStat> = report.groups.iter().filter(|g| g.metric.is_runtime()).collect();
    json!({ "corpus_hash": report.corpus_hash, "solutions": solutions, "groups": groups })
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<Vec<u8>, CoreError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CoreError::Output(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner().map_err(|e| CoreError::Output(e.to_string()))
}

fn scores_csv(report: &RunReport) -> Result<Vec<u8>, CoreError> {
    let rows = report.solutions.iter().flat_map(|s| {
        s.scores.iter().map(move |(m, sc)| {
            vec![s.solution_id.clone(), m.as_str().to_string(), format_number(sc.raw), format_number(sc.value)]
        })
    });
    csv_bytes(&["solution", "metric", "raw", "processed"], rows)
}

fn groups_csv(report: &RunReport) -> Result<Vec<u8>, CoreError> {
    let rows = report.groups.iter().map(|g| {
        vec![
            g.dimension.as_str().to_string(),
            g.group.clone(),
            g.metric.as_str().to_string(),
            g.count.to_string(),
            format_number(g.mean),
            format_number(g.min),
            format_number(g.q1),
            format_number(g.median),
            format_number(g.q3),
            format_number(g.max),
            opt_number(g.baseline_delta_percent),
            opt_number(g.average_delta_percent),
        ]
    });
    csv_bytes(
        &[
            "dimension",
            "group",
            "metric",
            "count",
            "mean",
            "min",
            "q1",
            "median",
            "q3",
            "max",
            "baseline_delta_percent",
            "average_delta_percent",
        ],
        rows,
    )
}

/// Per-group value series for one metric, for each plain dimension.
fn plot_series(report: &RunReport, metric: MetricId) -> Value {
    let mut dims = serde_json::Map::new();
    for dim in [Dimension::Producer, Dimension::Domain, Dimension::Tier] {
        let mut series: BTreeMap<String, Vec<(String, f64)>> = BTreeMap::new();
        for s in &report.solutions {
            if let Some(sc) = s.scores.get(&metric) {
                series.entry(s.observation().group(dim)).or_default().push((s.solution_id.clone(), sc.value));
            }
        }
        let list: Vec<Value> = series
            .into_iter()
            .map(|(group, pts)| {
                let (ids, values): (Vec<_>, Vec<_>) = pts.into_iter().unzip();
                json!({ "group": group, "solutions": ids, "values": values })
            })
            .collect();
        dims.insert(dim.as_str().to_string(), Value::Array(list));
    }
    json!({ "metric": metric.as_str(), "series": dims })
}

/// Writes every export into `dir` and returns the paths written.
pub fn export(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, CoreError> {
    let plots = dir.join("plots");
    std::fs::create_dir_all(&plots).map_err(|e| CoreError::io(&plots, e))?;
    let mut written = Vec::new();
    let mut put = |path: PathBuf, bytes: Vec<u8>| -> Result<(), CoreError> {
        write_file(&path, &bytes)?;
        written.push(path);
        Ok(())
    };
    put(dir.join("report.json"), pretty(&deterministic_view(report)))?;
    put(dir.join("runtime.json"), pretty(&runtime_view(report)))?;
    put(dir.join("scores.csv"), scores_csv(report)?)?;
    put(dir.join("groups.csv"), groups_csv(report)?)?;
    for m in MetricId::ALL {
        put(plots.join(format!("{}.json", m.as_str())), pretty(&plot_series(report, m)))?;
    }
    Ok(written)
}

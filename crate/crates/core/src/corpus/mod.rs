//! Benchmark tasks, prompt tiers and baseline solutions.
//!
//! On-disk layout under a corpus root:
//!
//! ```text
//! tasks/<id>.json
//! prompts/<id>/{short,medium,long}.txt
//! baselines/<id>.py
//! ```

mod checklist;
mod inputs;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{read_text, CoreError};

pub use checklist::{Checklist, TierRule};
pub use inputs::{standardized_inputs, InputBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "HPC")]
    Hpc,
    #[serde(rename = "ML")]
    Ml,
    DataProcessing,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Hpc, Domain::Ml, Domain::DataProcessing];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Hpc => "HPC",
            Domain::Ml => "ML",
            Domain::DataProcessing => "DataProcessing",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    QuickSort,
    StrassenMatrixMultiplication,
    MonteCarloSimulation,
    Attention,
    Convolution,
    #[serde(rename = "PCA")]
    Pca,
    HuffmanCoding,
    PageRank,
    RabinKarp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::QuickSort,
        Algorithm::StrassenMatrixMultiplication,
        Algorithm::MonteCarloSimulation,
        Algorithm::Attention,
        Algorithm::Convolution,
        Algorithm::Pca,
        Algorithm::HuffmanCoding,
        Algorithm::PageRank,
        Algorithm::RabinKarp,
    ];

    pub fn domain(self) -> Domain {
        match self {
            Algorithm::QuickSort | Algorithm::StrassenMatrixMultiplication | Algorithm::MonteCarloSimulation => {
                Domain::Hpc
            }
            Algorithm::Attention | Algorithm::Convolution | Algorithm::Pca => Domain::Ml,
            Algorithm::HuffmanCoding | Algorithm::PageRank | Algorithm::RabinKarp => Domain::DataProcessing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Short,
    Medium,
    Long,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Short, Tier::Medium, Tier::Long];

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Short => "short",
            Tier::Medium => "medium",
            Tier::Long => "long",
        }
    }

    pub fn parse(s: &str) -> Option<Tier> {
        Tier::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryPoint {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Json,
}

/// One positional argument of the entry point and how to generate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArgSpec {
    IntArray {
        len: usize,
        min: i64,
        max: i64,
    },
    FloatMatrix {
        rows: usize,
        cols: usize,
        min: f64,
        max: f64,
    },
    SquareMatrix {
        size: usize,
        min: f64,
        max: f64,
    },
    /// 0/1 adjacency matrix without self loops; always has at least one edge.
    Adjacency {
        nodes: usize,
        density: f64,
    },
    Text {
        len: usize,
        alphabet: String,
    },
    /// A slice of an earlier `text` argument, so a match is guaranteed.
    Substring {
        of: usize,
        len: usize,
    },
    Int {
        value: i64,
    },
    Float {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    pub format: InputFormat,
    pub args: Vec<ArgSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub id: String,
    pub domain: Domain,
    pub algorithm: Algorithm,
    pub entry_point: EntryPoint,
    pub input_spec: InputSpec,
    pub timeout_secs: f64,
    /// Name used by a solution -> import statement that may be inserted for it.
    #[serde(default)]
    pub allowed_imports: BTreeMap<String, String>,
}

impl TaskSpec {
    fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let id = &self.id;
        if self.algorithm.domain() != self.domain {
            out.push(format!(
                "{id}: {:?} belongs to domain {}, not {}",
                self.algorithm,
                self.algorithm.domain(),
                self.domain
            ));
        }
        if self.entry_point.arity != self.input_spec.args.len() {
            out.push(format!(
                "{id}: entry point arity {} does not match {} input arguments",
                self.entry_point.arity,
                self.input_spec.args.len()
            ));
        }
        if self.timeout_secs.is_nan() || self.timeout_secs <= 0.0 {
            out.push(format!("{id}: timeout must be positive"));
        }
        for (i, arg) in self.input_spec.args.iter().enumerate() {
            match arg {
                ArgSpec::Substring { of, len } => match self.input_spec.args.get(*of) {
                    Some(ArgSpec::Text { len: text_len, .. }) if *of < i && len <= text_len && *len > 0 => {}
                    _ => out.push(format!("{id}: argument {i} must slice an earlier, longer text argument")),
                },
                ArgSpec::Text { alphabet, len } if alphabet.is_empty() || *len == 0 => {
                    out.push(format!("{id}: argument {i} needs a nonempty alphabet and length"))
                }
                ArgSpec::Adjacency { nodes, density } if *nodes < 2 || !(0.0..=1.0).contains(density) => {
                    out.push(format!("{id}: argument {i} needs at least 2 nodes and density in [0,1]"))
                }
                ArgSpec::IntArray { min, max, .. } if min > max => {
                    out.push(format!("{id}: argument {i} has min > max"))
                }
                ArgSpec::FloatMatrix { min, max, .. } | ArgSpec::SquareMatrix { min, max, .. } if min > max => {
                    out.push(format!("{id}: argument {i} has min > max"))
                }
                _ => {}
            }
        }
        if self.algorithm == Algorithm::StrassenMatrixMultiplication {
            let sizes: Vec<usize> = self
                .input_spec
                .args
                .iter()
                .filter_map(|a| match a {
                    ArgSpec::SquareMatrix { size, .. } => Some(*size),
                    _ => None,
                })
                .collect();
            if sizes.len() != 2 || sizes[0] != sizes[1] || !sizes[0].is_power_of_two() {
                out.push(format!("{id}: Strassen inputs must be two square matrices of equal power-of-two size"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptVariant {
    pub task_id: String,
    pub tier: Tier,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub root: PathBuf,
    pub tasks: Vec<TaskSpec>,
    pub prompts: Vec<PromptVariant>,
    /// Task id -> baseline source text.
    pub baselines: BTreeMap<String, String>,
    /// SHA-256 over every corpus file, in path order.
    pub hash: String,
}

impl Corpus {
    pub fn task(&self, id: &str) -> Option<&TaskSpec> {
        self.tasks.iter().find(|t| t.id == id)
    }

    pub fn prompt(&self, task_id: &str, tier: Tier) -> Option<&PromptVariant> {
        self.prompts.iter().find(|p| p.task_id == task_id && p.tier == tier)
    }
}

fn sorted_entries(dir: &Path, errors: &mut Vec<String>) -> Vec<PathBuf> {
    match std::fs::read_dir(dir) {
        Ok(rd) => {
            let mut out: Vec<PathBuf> = rd.filter_map(|e| e.ok().map(|e| e.path())).collect();
            out.sort();
            out
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => {
            errors.push(format!("{}: {e}", dir.display()));
            Vec::new()
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Loads and validates a corpus directory, reporting every violation found.
pub fn load_corpus(root: &Path) -> Result<Corpus, CoreError> {
    let mut errors = Vec::new();
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();
    let mut tasks: Vec<TaskSpec> = Vec::new();
    let mut seen = BTreeSet::new();

    for path in sorted_entries(&root.join("tasks"), &mut errors) {
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) => {
                errors.push(format!("{}: {e}", path.display()));
                continue;
            }
        };
        files.push((format!("tasks/{}", path.file_name().unwrap().to_string_lossy()), bytes.clone()));
        let task: TaskSpec = match serde_json::from_slice(&bytes) {
            Ok(t) => t,
            Err(e) => {
                errors.push(format!("{}: {e}", path.display()));
                continue;
            }
        };
        if task.id != stem(&path) {
            errors.push(format!("{}: file name does not match task id '{}'", path.display(), task.id));
        }
        if !seen.insert(task.id.clone()) {
            errors.push(format!("duplicate task id '{}'", task.id));
            continue;
        }
        errors.extend(task.violations());
        tasks.push(task);
    }
    if tasks.is_empty() && errors.is_empty() {
        return Err(CoreError::Corpus(vec!["no tasks found".into()]));
    }

    if tasks.len() != 9 {
        errors.push(format!("expected 9 tasks, found {}", tasks.len()));
    }
    for domain in Domain::ALL {
        let n = tasks.iter().filter(|t| t.domain == domain).count();
        if n != 3 {
            errors.push(format!("domain {domain} owns {n} tasks, expected 3"));
        }
    }
    for algorithm in Algorithm::ALL {
        let n = tasks.iter().filter(|t| t.algorithm == algorithm).count();
        if n != 1 {
            errors.push(format!("algorithm {algorithm:?} appears {n} times, expected once"));
        }
    }

    let checklist = Checklist::builtin();
    let mut prompts = Vec::new();
    for task in &tasks {
        let mut texts = BTreeMap::new();
        for tier in Tier::ALL {
            let rel = format!("prompts/{}/{}.txt", task.id, tier);
            match std::fs::read(root.join(&rel)) {
                Ok(bytes) => match String::from_utf8(bytes.clone()) {
                    Ok(text) => {
                        files.push((rel, bytes));
                        texts.insert(tier, text.clone());
                        prompts.push(PromptVariant { task_id: task.id.clone(), tier, text });
                    }
                    Err(_) => errors.push(format!("{rel}: not UTF-8")),
                },
                Err(_) => errors.push(format!("missing prompt {rel}")),
            }
        }
        errors.extend(checklist.check(&task.id, &task.entry_point.name, &texts));
    }
    for dir in sorted_entries(&root.join("prompts"), &mut errors) {
        if dir.is_dir() && !seen.contains(&stem(&dir)) {
            errors.push(format!("missing task file for prompts of '{}'", stem(&dir)));
        }
    }

    let mut baselines = BTreeMap::new();
    for path in sorted_entries(&root.join("baselines"), &mut errors) {
        if path.extension().and_then(|e| e.to_str()) != Some("py") {
            continue;
        }
        let id = stem(&path);
        if !seen.contains(&id) {
            errors.push(format!("missing task file for baseline '{id}'"));
            continue;
        }
        match read_text(&path) {
            Ok(text) => {
                files.push((format!("baselines/{id}.py"), text.clone().into_bytes()));
                baselines.insert(id, text);
            }
            Err(e) => errors.push(e.to_string()),
        }
    }

    if !errors.is_empty() {
        return Err(CoreError::Corpus(errors));
    }
    tasks.sort_by(|a, b| a.id.cmp(&b.id));
    prompts.sort_by(|a, b| (&a.task_id, a.tier).cmp(&(&b.task_id, b.tier)));
    files.sort();
    let mut hasher = Sha256::new();
    for (name, bytes) in &files {
        hasher.update(name.as_bytes());
        hasher.update([0]);
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(bytes);
    }
    Ok(Corpus { root: root.to_path_buf(), tasks, prompts, baselines, hash: hex::encode(hasher.finalize()) })
}

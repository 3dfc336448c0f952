//! `pelli`: run evaluations, analyze single files, score metric groups,
//! validate corpora, render refinement prompts and manage replay stores.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pelli_analyzer::lint::{to_json_lines, LintConfig, Registry};
use pelli_analyzer::MetricVector;
use pelli_core::config::{Mode, PipelineConfig};
use pelli_core::corpus::{load_corpus, Tier};
use pelli_core::gateway::{network_requests, render_refinement, AnalysisFindings, ReplayStore, Transcript};
use pelli_core::pipeline::run_pipeline;
use pelli_core::score::{process_group, GroupMember, MetricSpecTable};
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "pelli", version, about = "Code-quality evaluation harness for generated Python solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full generate, gate, analyze, profile, score and report loop.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the mode in the config file.
        #[arg(long)]
        mode: Option<String>,
        /// Overrides the output directory in the config file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print static metrics and lint findings for one Python file as JSON.
    Analyze {
        file: PathBuf,
        /// Extra rule ids to disable.
        #[arg(long = "disable")]
        disable: Vec<String>,
        /// Rule ids to enable even if off by default.
        #[arg(long = "enable")]
        enable: Vec<String>,
        /// Print findings as JSON lines instead of the summary object.
        #[arg(long)]
        findings: bool,
    },
    /// Run the score pipeline on raw metric vectors.
    Score {
        /// JSON array of {solution_id, group, metrics, in_reference?}.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        metric_spec: Option<PathBuf>,
    },
    /// Corpus maintenance.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// Print a refinement prompt built from analysis findings.
    Refine {
        #[arg(long)]
        task: String,
        #[arg(long)]
        tier: String,
        /// Path to a findings JSON file, or the JSON itself.
        #[arg(long)]
        findings: String,
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
    },
    /// Replay store maintenance.
    Replay {
        #[command(subcommand)]
        command: ReplayCommand,
    },
    /// Print the metric preprocessing table in use.
    Specs {
        #[arg(long)]
        metric_spec: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Load a corpus and report every problem found.
    Validate { root: PathBuf },
}

#[derive(Subcommand)]
enum ReplayCommand {
    /// Record one reply for a prompt into a store.
    Add(AddArgs),
}

#[derive(Args)]
struct AddArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    provider: String,
    /// File holding the reply text.
    #[arg(long)]
    reply: PathBuf,
    #[arg(long, default_value_t = 1)]
    attempt: u32,
    /// Take the prompt from a corpus task and tier.
    #[arg(long, requires_all = ["task", "tier"], conflicts_with = "prompt_file")]
    corpus: Option<PathBuf>,
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    tier: Option<String>,
    /// Or give the prompt text in a file.
    #[arg(long)]
    prompt_file: Option<PathBuf>,
}

#[derive(Deserialize)]
struct ScoreInput {
    solution_id: String,
    group: String,
    metrics: Option<MetricVector>,
    #[serde(default = "yes")]
    in_reference: bool,
}

fn yes() -> bool {
    true
}

fn parse_tier(s: &str) -> Result<Tier> {
    Tier::parse(s).with_context(|| format!("unknown tier '{s}' (expected short, medium or long)"))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn specs(path: Option<&Path>) -> Result<MetricSpecTable> {
    Ok(match path {
        Some(p) => MetricSpecTable::load(p)?,
        None => MetricSpecTable::builtin().clone(),
    })
}

fn run(config: &Path, mode: Option<&str>, out: Option<PathBuf>) -> Result<()> {
    let mut cfg = PipelineConfig::load(config)?;
    if let Some(m) = mode {
        cfg.mode = m.parse::<Mode>()?;
    }
    if let Some(o) = out {
        cfg.output_dir = std::env::current_dir()?.join(o);
    }
    let output = run_pipeline(&cfg)?;
    let r = &output.report;
    println!(
        "{} solutions scored, {} excluded, corpus {}",
        r.solutions.len(),
        r.exclusions.len(),
        &r.corpus_hash[..12]
    );
    for e in &r.exclusions {
        println!("  excluded {} ({:?}): {}", e.solution_id, e.reason, e.detail);
    }
    println!("network requests: {}", network_requests());
    println!("wrote {} files to {}", output.written.len(), cfg.resolve(&cfg.output_dir).display());
    Ok(())
}

fn analyze(file: &Path, disable: Vec<String>, enable: Vec<String>, findings: bool) -> Result<()> {
    let source = read(file)?;
    let lint = LintConfig { disabled: disable.into_iter().collect(), enabled: enable.into_iter().collect() };
    let a = pelli_analyzer::analyze_with(&source, Registry::builtin(), &lint);
    if findings {
        print!("{}", to_json_lines(&a.findings));
        return Ok(());
    }
    let out = serde_json::json!({
        "file": file.display().to_string(),
        "metrics": a.metrics,
        "lint_counts": a.counts(),
        "findings": a.findings,
        "syntax_error": a.syntax_error.as_ref().map(|e| e.to_string()),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn score(input: &Path, metric_spec: Option<&Path>) -> Result<()> {
    let rows: Vec<ScoreInput> = serde_json::from_str(&read(input)?).context("parsing score input")?;
    let table = specs(metric_spec)?;
    let mut groups: BTreeMap<String, Vec<GroupMember>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.group).or_default().push(GroupMember {
            solution_id: r.solution_id,
            metrics: r.metrics,
            in_reference: r.in_reference,
        });
    }
    let out: Vec<_> = groups.iter().map(|(k, m)| process_group(k, m, &table)).collect();
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

fn validate(root: &Path) -> Result<bool> {
    match load_corpus(root) {
        Ok(c) => {
            println!(
                "ok: {} tasks, {} prompts, {} baselines, hash {}",
                c.tasks.len(),
                c.prompts.len(),
                c.baselines.len(),
                c.hash
            );
            Ok(true)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(false)
        }
    }
}

fn refine(task: &str, tier: &str, findings: &str, corpus: &Path) -> Result<()> {
    let corpus = load_corpus(corpus)?;
    let tier = parse_tier(tier)?;
    let base = corpus.prompt(task, tier).with_context(|| format!("no prompt for task '{task}'"))?;
    let text = if findings.trim_start().starts_with('{') { findings.to_string() } else { read(Path::new(findings))? };
    let findings: AnalysisFindings = serde_json::from_str(&text).context("parsing findings")?;
    print!("{}", render_refinement(&base.text, &findings));
    Ok(())
}

fn replay_add(a: &AddArgs) -> Result<()> {
    if a.attempt == 0 {
        bail!("attempts are numbered from 1");
    }
    let prompt = match (&a.corpus, &a.prompt_file, &a.task, &a.tier) {
        (Some(root), _, Some(task), Some(tier)) => {
            let corpus = load_corpus(root)?;
            let tier = parse_tier(tier)?;
            corpus.prompt(task, tier).with_context(|| format!("no prompt for task '{task}'"))?.text.clone()
        }
        (None, Some(p), _, _) => read(p)?,
        _ => bail!("give either --corpus with --task and --tier, or --prompt-file"),
    };
    let key = ReplayStore::new(&a.store).put(&Transcript {
        provider_id: a.provider.clone(),
        attempt: a.attempt,
        prompt,
        raw_text: read(&a.reply)?,
        metadata: Default::default(),
    })?;
    println!("{key}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, mode, out } => run(&config, mode.as_deref(), out),
        Command::Analyze { file, disable, enable, findings } => analyze(&file, disable, enable, findings),
        Command::Score { input, metric_spec } => score(&input, metric_spec.as_deref()),
        Command::Corpus { command: CorpusCommand::Validate { root } } => match validate(&root) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::FAILURE,
            Err(e) => Err(e),
        },
        Command::Refine { task, tier, findings, corpus } => refine(&task, &tier, &findings, &corpus),
        Command::Replay { command: ReplayCommand::Add(args) } => replay_add(&args),
        Command::Specs { metric_spec } => specs(metric_spec.as_deref()).map(|t| print!("{}", t.to_pretty_json())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! The evaluation loop: generate, adjust, gate, analyze, profile, score,
//! report.
//!
//! Generation and the adequacy gate run in parallel across cells (one cell
//! per task, tier and provider). Child processes are still admitted one at
//! a time by the profiler. Profiling itself runs in solution-id order.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use pelli_analyzer::lint::{LintConfig, Registry};
use pelli_analyzer::MetricVector;
use rayon::prelude::*;

use crate::adequacy::adequacy;
use crate::adjust::apply_minor_adjustments;
use crate::config::{Mode, PipelineConfig, ProviderConfig};
use crate::corpus::{load_corpus, Corpus, TaskSpec, Tier};
use crate::error::CoreError;
use crate::gateway::{
    Gateway, GatewayError, GenerationMetadata, GenerationRequest, GenerationResult, OpenAiCompatible, Provider,
    RecordingProvider, ReplayProvider, ReplayStore,
};
use crate::profiler::{Profiler, ProfilerConfig, RunFailure};
use crate::report::{export, Exclusion, ExclusionReason, RunReport, RuntimeRecord, SolutionRecord};
use crate::score::{process_group, GroupMember, MetricSpecTable};
use crate::solution::{solution_id, AdequacyReason, AttemptRecord, Solution, SolutionStatus};

pub struct PipelineOutput {
    pub report: RunReport,
    pub written: Vec<PathBuf>,
}

fn live_provider(cfg: &PipelineConfig, p: &ProviderConfig) -> Result<OpenAiCompatible, CoreError> {
    OpenAiCompatible::new(
        &p.id,
        p.endpoint.as_deref().unwrap_or_default(),
        p.model.as_deref().unwrap_or_default(),
        p.api_key_env.as_deref(),
        Duration::from_secs_f64(cfg.request_timeout_secs),
        p.requests_per_minute,
    )
    .map_err(|e| CoreError::Config(e.to_string()))
}

fn build_gateways(cfg: &PipelineConfig) -> Result<Vec<(ProviderConfig, Gateway)>, CoreError> {
    let store = cfg.replay_store.as_ref().map(|p| ReplayStore::new(cfg.resolve(p)));
    cfg.providers
        .iter()
        .map(|p| {
            let provider: Arc<dyn Provider> = match cfg.mode {
                Mode::Replay => Arc::new(ReplayProvider::new(&p.id, store.clone().expect("validated"))),
                Mode::Live => Arc::new(live_provider(cfg, p)?),
                Mode::Record => Arc::new(RecordingProvider::new(
                    Arc::new(live_provider(cfg, p)?),
                    store.clone().expect("validated"),
                )),
            };
            let mut g = Gateway::new(provider);
            g.max_attempts = cfg.max_attempts;
            g.transport_retries = cfg.transport_retries;
            Ok((p.clone(), g))
        })
        .collect()
}

fn profiler_for(cfg: &PipelineConfig) -> Profiler {
    let mut pc = ProfilerConfig::new(cfg.interpreter_path(), cfg.resolve(&cfg.shim));
    pc.runs = cfg.runs_per_solution;
    pc.sample_interval = Duration::from_millis(cfg.sample_interval_ms);
    pc.aggregator = cfg.aggregator;
    pc.timeout_override = cfg.task_timeout_secs.map(Duration::from_secs_f64);
    if let Some(w) = &cfg.work_dir {
        pc.work_dir = cfg.resolve(w);
    }
    Profiler::new(pc)
}

/// A one-line description of a failed run that stays stable across runs.
fn describe(f: &RunFailure) -> String {
    match f {
        RunFailure::Timeout => "timed out".into(),
        RunFailure::LaunchFailure { message } => format!("launch failure: {message}"),
        RunFailure::KilledBySignal { signal } => format!("killed by signal {signal}"),
        RunFailure::NonZeroExit { code } => format!("exit status {code}"),
        RunFailure::EntryPointMissing => "entry point missing".into(),
        RunFailure::SolutionException { type_name, message } => format!("{type_name}: {message}"),
        RunFailure::BadInput => "input bundle rejected".into(),
        RunFailure::ShimProtocol { message } => format!("status protocol: {message}"),
    }
}

enum CellOutcome {
    Adequate(Solution),
    Excluded(Exclusion),
}

struct Cell<'a> {
    task: &'a TaskSpec,
    tier: Option<Tier>,
    provider: Option<&'a (ProviderConfig, Gateway)>,
}

impl Cell<'_> {
    fn producer(&self) -> &str {
        self.provider.map_or(crate::solution::BASELINE_PRODUCER, |(p, _)| p.id.as_str())
    }

    fn exclusion(&self, reason: ExclusionReason, detail: String, history: Vec<AttemptRecord>) -> Exclusion {
        Exclusion {
            solution_id: solution_id(&self.task.id, self.tier, self.producer()),
            task_id: self.task.id.clone(),
            producer: self.producer().to_string(),
            tier: self.tier,
            reason,
            detail,
            history,
        }
    }
}

fn gate(
    solution: Solution,
    task: &TaskSpec,
    profiler: &Profiler,
    seed: u64,
    transcript_id: Option<String>,
) -> (Solution, AttemptRecord) {
    let adjusted = if solution.is_baseline() { solution } else { apply_minor_adjustments(&solution, task) };
    let verdict = adequacy(&adjusted, task, profiler, seed);
    let record = AttemptRecord {
        attempt: adjusted.attempt,
        transcript_id,
        error: verdict.failure.as_ref().map(describe).or(verdict.syntax_error),
        adjustments: adjusted.adjustments.clone(),
        adequate: verdict.adequate,
        reasons: verdict.reasons,
    };
    (adjusted, record)
}

fn run_cell(cell: &Cell, corpus: &Corpus, profiler: &Profiler, seed: u64) -> CellOutcome {
    let task = cell.task;
    let Some((pcfg, gw)) = cell.provider else {
        let source = corpus.baselines.get(&task.id).cloned().unwrap_or_default();
        let (mut sol, record) = gate(Solution::baseline(&task.id, source), task, profiler, seed, None);
        sol.history.push(record.clone());
        if record.adequate {
            sol.status = SolutionStatus::Adequate;
            return CellOutcome::Adequate(sol);
        }
        let detail = format!("baseline failed the adequacy gate: {}", record.error.clone().unwrap_or_default());
        return CellOutcome::Excluded(cell.exclusion(ExclusionReason::Rejected, detail, sol.history));
    };
    let tier = cell.tier.expect("generated cells have a tier");
    let prompt = corpus.prompt(&task.id, tier).expect("corpus validated");
    let req = GenerationRequest::new(&pcfg.id, &prompt.text, pcfg.params.clone());

    let mut history = Vec::new();
    let mut prior: Option<GenerationResult> = None;
    let mut last_reasons = Vec::new();
    for attempt in 1..=gw.max_attempts {
        let result = match &prior {
            None => gw.generate(&req),
            Some(p) => gw.follow_up(&req, p),
        };
        let generated = match result {
            Ok(g) => g,
            Err(e) => {
                history.push(AttemptRecord {
                    attempt,
                    transcript_id: None,
                    error: Some(e.to_string()),
                    adjustments: Vec::new(),
                    adequate: false,
                    reasons: Vec::new(),
                });
                if let GatewayError::ReplayMiss { .. } = e {
                    return CellOutcome::Excluded(cell.exclusion(ExclusionReason::ReplayMiss, e.to_string(), history));
                }
                last_reasons.clear();
                prior = Some(GenerationResult {
                    attempt,
                    raw_text: String::new(),
                    extracted_source: String::new(),
                    metadata: GenerationMetadata::default(),
                    transcript_id: None,
                });
                continue;
            }
        };
        let sol = Solution::new(&task.id, Some(tier), &pcfg.id, attempt, generated.extracted_source.clone());
        let (mut sol, record) = gate(sol, task, profiler, seed, generated.transcript_id.clone());
        let adequate = record.adequate;
        last_reasons = record.reasons.clone();
        history.push(record);
        if adequate {
            sol.status = SolutionStatus::Adequate;
            sol.history = history;
            return CellOutcome::Adequate(sol);
        }
        prior = Some(generated);
    }
    let (reason, detail) = if last_reasons == [AdequacyReason::FatalParse] {
        (ExclusionReason::FatalParse, format!("no parseable solution in {} attempts", gw.max_attempts))
    } else {
        (ExclusionReason::Rejected, format!("no adequate solution in {} attempts", gw.max_attempts))
    };
    CellOutcome::Excluded(cell.exclusion(reason, detail, history))
}

struct Measured {
    solution: Solution,
    task: TaskSpec,
    lint_counts: pelli_analyzer::lint::CategoryCounts,
    metrics: MetricVector,
    runtime: RuntimeRecord,
}

/// Runs the whole loop and writes every export to `config.output_dir`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutput, CoreError> {
    config.validate()?;
    let corpus = load_corpus(&config.resolve(&config.corpus))?;
    let tasks: Vec<&TaskSpec> = match &config.tasks {
        None => corpus.tasks.iter().collect(),
        Some(ids) => ids
            .iter()
            .map(|id| corpus.task(id).ok_or_else(|| CoreError::Config(format!("unknown task '{id}'"))))
            .collect::<Result<_, _>>()?,
    };
    let specs = match &config.metric_spec {
        Some(p) => MetricSpecTable::load(&config.resolve(p))?,
        None => MetricSpecTable::builtin().clone(),
    };
    let gateways = build_gateways(config)?;
    let profiler = profiler_for(config);
    let lint = LintConfig { disabled: config.disabled_rules.clone(), enabled: config.enabled_rules.clone() };

    let mut cells = Vec::new();
    for &task in &tasks {
        if config.include_baselines {
            cells.push(Cell { task, tier: None, provider: None });
        }
        for tier in Tier::ALL {
            for g in &gateways {
                cells.push(Cell { task, tier: Some(tier), provider: Some(g) });
            }
        }
    }
    let outcomes: Vec<CellOutcome> = cells.par_iter().map(|c| run_cell(c, &corpus, &profiler, config.seed)).collect();

    let mut exclusions = Vec::new();
    let mut adequate = Vec::new();
    for o in outcomes {
        match o {
            CellOutcome::Adequate(s) => adequate.push(s),
            CellOutcome::Excluded(e) => exclusions.push(e),
        }
    }
    adequate.sort_by_key(Solution::id);

    let mut measured = Vec::new();
    for sol in adequate {
        let task = corpus.task(&sol.task_id).expect("cell task").clone();
        let analysis = pelli_analyzer::analyze_with(&sol.source_text, Registry::builtin(), &lint);
        let lint_counts = analysis.counts();
        let Some(mut metrics) = analysis.metrics else {
            exclusions.push(Exclusion {
                solution_id: sol.id(),
                task_id: sol.task_id.clone(),
                producer: sol.producer.clone(),
                tier: sol.tier,
                reason: ExclusionReason::FatalParse,
                detail: "analyzer could not parse the adequate solution".into(),
                history: sol.history,
            });
            continue;
        };
        let agg = profiler.profile(&sol, &task, config.seed);
        let (Some(cpu), Some(mem)) = (agg.cpu_usage, agg.memory_usage) else {
            let detail = agg.failure.as_ref().map(describe).unwrap_or_else(|| "no samples".into());
            exclusions.push(Exclusion {
                solution_id: sol.id(),
                task_id: sol.task_id.clone(),
                producer: sol.producer.clone(),
                tier: sol.tier,
                reason: ExclusionReason::ProfileFailed,
                detail,
                history: sol.history,
            });
            continue;
        };
        metrics.cpu_usage = Some(cpu);
        metrics.memory_usage = Some(mem);
        measured.push(Measured {
            solution: sol,
            task,
            lint_counts,
            metrics,
            runtime: RuntimeRecord { cpu_usage: cpu, memory_usage: mem, samples: agg.samples },
        });
    }

    let mut groups: BTreeMap<String, Vec<Measured>> = BTreeMap::new();
    for m in measured {
        groups.entry(m.task.id.clone()).or_default().push(m);
    }
    let records: Vec<SolutionRecord> = groups
        .into_par_iter()
        .flat_map_iter(|(key, members)| {
            let group: Vec<GroupMember> = members
                .iter()
                .map(|m| GroupMember {
                    solution_id: m.solution.id(),
                    metrics: Some(m.metrics.clone()),
                    in_reference: !m.solution.is_baseline() || config.baselines_in_scaling_groups,
                })
                .collect();
            let mut scored: BTreeMap<String, _> =
                process_group(&key, &group, &specs).scores.into_iter().map(|s| (s.solution_id.clone(), s)).collect();
            members
                .into_iter()
                .map(|m| {
                    let sv = scored.remove(&m.solution.id()).expect("every usable member is scored");
                    SolutionRecord {
                        solution_id: m.solution.id(),
                        task_id: m.task.id.clone(),
                        algorithm: m.task.algorithm,
                        domain: m.task.domain,
                        tier: m.solution.tier,
                        producer: m.solution.producer.clone(),
                        status: m.solution.status,
                        attempt: m.solution.attempt,
                        adjustments: m.solution.adjustments,
                        history: m.solution.history,
                        lint_counts: m.lint_counts,
                        metrics: m.metrics,
                        scores: sv.metrics,
                        runtime: m.runtime,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let report = RunReport::assemble(config.snapshot(), corpus.hash.clone(), records, exclusions);
    let written = export(&report, &config.resolve(&config.output_dir))?;
    Ok(PipelineOutput { report, written })
}

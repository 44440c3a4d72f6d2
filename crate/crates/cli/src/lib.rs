//! `plandiv`: generate planning tasks, solve them optimally, embed and select
//! diverse subsets, emit fine-tuning datasets and score model responses.

pub mod config;
pub mod error;
mod experiment;
pub mod manifest;

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use plandiv_core::embedding::{tfidf_embed, EmbeddingSet, Metric};
use plandiv_core::eval::{evaluate_responses, render_histogram, solved_by_length_histogram};
use plandiv_core::generate::generate;
use plandiv_core::io::{read_labels, read_tasks, write_jsonl, write_tasks, LabelRecord};
use plandiv_core::nl::{emit_finetune_dataset, emit_pddl, pddl_plan, read_responses, task_statement};
use plandiv_core::select::{select_cmds, select_random, SelectionResult};
use plandiv_core::solver::{label_corpus, LabeledTask};
use plandiv_core::{DomainKind, Plan, PromptStyle, SolveStatus, TaskInstance};
use serde::Serialize;

pub use config::{stage_seed, Method, PipelineConfig, PromptMode};
pub use error::{CliError, ErrorKind};
use manifest::{sidecar, Manifest};

#[derive(Debug, Parser)]
#[command(name = "plandiv", version, about = "Planning-task curation pipeline")]
pub struct Cli {
    /// Pipeline config (TOML); flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Global seed; every stage derives its own seed from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a file of distinct random tasks.
    Generate(GenerateArgs),
    /// Label tasks with optimal plans.
    Solve(SolveArgs),
    /// Write graph encodings or text embeddings of tasks.
    Embed(EmbedArgs),
    /// Select a subset of tasks by CMDS or uniformly at random.
    Select(SelectArgs),
    /// Write a chat-format fine-tuning dataset from tasks and their plans.
    Emit(EmitArgs),
    /// Score model responses against tasks.
    Validate(ValidateArgs),
    /// Export tasks (and optionally plans) as PDDL.
    Pddl(PddlArgs),
    /// Run generation, solving, selection at every subset size, emission and diversity reporting.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub domain: Option<DomainArg>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub n_blocks: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DomainArg {
    Blocksworld,
    Logistics,
}

impl From<DomainArg> for DomainKind {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Blocksworld => DomainKind::Blocksworld,
            DomainArg::Logistics => DomainKind::Logistics,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    #[arg(long)]
    pub max_seconds: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedKind {
    /// Graph encodings; compare with edit distance.
    Graph,
    /// TF-IDF vectors of the task statements; compare with L2.
    Text,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "graph")]
    pub kind: EmbedKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectMethodArg {
    Cmds,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricArg {
    Edit,
    L2,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Edit => Metric::Edit,
            MetricArg::L2 => Metric::L2,
        }
    }
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    /// Embeddings file; one `{"id", "vector"}` record per line covering every task.
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "cmds")]
    pub method: SelectMethodArg,
    #[arg(long, value_enum, default_value = "edit")]
    pub metric: MetricArg,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmitArgs {
    /// One or more tasks files; records follow file order then line order.
    #[arg(long, required = true, num_args = 1..)]
    pub tasks: Vec<PathBuf>,
    #[arg(long, required = true, num_args = 1..)]
    pub labels: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub prompt: Option<PromptMode>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    /// Responses file; one `{"id", "text"}` record per line.
    #[arg(long)]
    pub responses: PathBuf,
    /// Optimal plans; tasks are solved on the fly when omitted.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PddlArgs {
    #[arg(long)]
    pub tasks: PathBuf,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = jobs;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {} workers: {e}", config.jobs)))?;
    pool.install(|| match cli.command {
        Command::Generate(args) => cmd_generate(config, args),
        Command::Solve(args) => cmd_solve(config, args),
        Command::Embed(args) => cmd_embed(config, args),
        Command::Select(args) => cmd_select(config, args),
        Command::Emit(args) => cmd_emit(config, args),
        Command::Validate(args) => cmd_validate(config, args),
        Command::Pddl(args) => cmd_pddl(config, args),
        Command::Experiment(args) => experiment::run(&config, &args.out_dir),
    })
}

pub(crate) fn tasks_bytes(tasks: &[TaskInstance]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_tasks(tasks, &mut buf).expect("in-memory write");
    buf
}

pub(crate) fn jsonl_bytes<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_jsonl(records, &mut buf).expect("in-memory write");
    buf
}

pub(crate) fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text.into_bytes()
}

fn load_tasks(m: &mut Manifest, path: &Path) -> Result<Vec<TaskInstance>, CliError> {
    let bytes = m.read(path)?;
    read_tasks(&bytes[..]).map_err(|e| CliError::from(e).at(path))
}

fn load_labels(m: &mut Manifest, path: &Path) -> Result<Vec<LabelRecord>, CliError> {
    let bytes = m.read(path)?;
    read_labels(&bytes[..]).map_err(|e| CliError::from(e).at(path))
}

pub(crate) fn prompt_style(mode: PromptMode, domain: DomainKind) -> PromptStyle {
    match mode {
        PromptMode::ZeroShot => PromptStyle::ZeroShot,
        PromptMode::OneShot => PromptStyle::one_shot_reference(domain),
    }
}

pub(crate) fn embed(tasks: &[TaskInstance], kind: EmbedKind) -> Result<EmbeddingSet, CliError> {
    Ok(match kind {
        EmbedKind::Graph => EmbeddingSet::from_tasks(tasks)?.0,
        EmbedKind::Text => {
            let docs: Vec<(String, String)> = tasks.iter().map(|t| (t.id().to_owned(), task_statement(t))).collect();
            tfidf_embed(&docs)?
        }
    })
}

fn cmd_generate(mut config: PipelineConfig, args: GenerateArgs) -> Result<(), CliError> {
    if let Some(d) = args.domain {
        config.generate.domain = d.into();
    }
    if let Some(c) = args.count {
        config.generate.count = c;
    }
    if let Some(n) = args.n_blocks {
        config.generate.n_blocks = n;
    }
    let mut m = Manifest::new("generate", config.seed, &config.generate, None);
    let seed = m.stage("generate", stage_seed(config.seed, "generate"));
    let tasks = generate(&config.generate.spec(seed))?;
    m.write(&args.out, &tasks_bytes(&tasks))?;
    m.save(&sidecar(&args.out))
}

fn cmd_solve(mut config: PipelineConfig, args: SolveArgs) -> Result<(), CliError> {
    if let Some(n) = args.max_nodes {
        config.solve.max_nodes = n;
    }
    if let Some(s) = args.max_seconds {
        config.solve.max_seconds = s;
    }
    let mut m = Manifest::new("solve", config.seed, &config.solve, None);
    let tasks = load_tasks(&mut m, &args.tasks)?;
    let corpus = label_corpus(&tasks, &config.solve);
    let records = LabelRecord::from_corpus(&tasks, &corpus);
    m.write(&args.out, &jsonl_bytes(&records))?;
    m.save(&sidecar(&args.out))?;
    let limited = corpus.unlabeled.iter().filter(|u| u.status == SolveStatus::LimitExceeded).count();
    if limited > 0 {
        return Err(CliError::resource(format!("{limited} tasks hit the search limit; see {}", args.out.display())));
    }
    Ok(())
}

fn cmd_embed(config: PipelineConfig, args: EmbedArgs) -> Result<(), CliError> {
    let mut m = Manifest::new("embed", config.seed, &args.kind, None);
    let tasks = load_tasks(&mut m, &args.tasks)?;
    let set = embed(&tasks, args.kind)?;
    let mut buf = Vec::new();
    set.write_jsonl(&mut buf)?;
    m.write(&args.out, &buf)?;
    m.save(&sidecar(&args.out))
}

#[derive(Serialize)]
struct SelectRecord<'a> {
    method: SelectMethodArg,
    metric: MetricArg,
    k: usize,
    select: &'a config::SelectConfig,
}

fn cmd_select(config: PipelineConfig, args: SelectArgs) -> Result<(), CliError> {
    let record = SelectRecord { method: args.method, metric: args.metric, k: args.k, select: &config.select };
    let mut m = Manifest::new("select", config.seed, &record, Some(&args.out_dir));
    let tasks = load_tasks(&mut m, &args.tasks)?;
    let bytes = m.read(&args.embeddings)?;
    let set =
        EmbeddingSet::read_jsonl(&bytes[..], args.metric.into()).map_err(|e| CliError::from(e).at(&args.embeddings))?;
    let ids: Vec<String> = tasks.iter().map(|t| t.id().to_owned()).collect();
    let set = set.aligned_to(&ids).map_err(|e| CliError::from(e).at(&args.embeddings))?;
    let seed = m.stage("select", stage_seed(config.seed, "select"));
    let result = match args.method {
        SelectMethodArg::Cmds => select_cmds(&set, &config.select.selection(args.k, seed))?,
        SelectMethodArg::Random => select_random(&set, args.k, seed)?,
    };
    let selected: Vec<TaskInstance> = result.selected_indices.iter().map(|&i| tasks[i].clone()).collect();
    m.write(&args.out_dir.join("selection.json"), &json_bytes(&result))?;
    m.write(&args.out_dir.join("selected.jsonl"), &tasks_bytes(&selected))?;
    m.save(&args.out_dir.join("manifest.json"))
}

pub(crate) fn pair_with_plans(
    tasks: &[TaskInstance],
    labels: &HashMap<String, Plan>,
) -> Result<Vec<LabeledTask>, CliError> {
    tasks
        .iter()
        .map(|t| {
            labels
                .get(t.id())
                .map(|plan| LabeledTask { task: t.clone(), plan: plan.clone() })
                .ok_or_else(|| CliError::data(format!("no optimal plan for task {}", t.id())))
        })
        .collect()
}

fn cmd_emit(mut config: PipelineConfig, args: EmitArgs) -> Result<(), CliError> {
    if let Some(p) = args.prompt {
        config.emit.prompt = p;
    }
    let mut m = Manifest::new("emit", config.seed, &config.emit, None);
    let mut tasks = Vec::new();
    for path in &args.tasks {
        tasks.extend(load_tasks(&mut m, path)?);
    }
    let mut plans = HashMap::new();
    for path in &args.labels {
        for rec in load_labels(&mut m, path)? {
            if let Some(plan) = rec.plan {
                plans.insert(rec.id, plan);
            }
        }
    }
    let pairs = pair_with_plans(&tasks, &plans)?;
    let mut buf = Vec::new();
    let mode = config.emit.prompt;
    let n = emit_finetune_dataset(&pairs, |t| prompt_style(mode, t.domain()), &mut buf)?;
    m.write(&args.out, &buf)?;
    m.save(&sidecar(&args.out))?;
    log::info!("wrote {n} records to {}", args.out.display());
    Ok(())
}

fn cmd_validate(config: PipelineConfig, args: ValidateArgs) -> Result<(), CliError> {
    let mut m = Manifest::new("validate", config.seed, &config.solve, Some(&args.out_dir));
    let tasks = load_tasks(&mut m, &args.tasks)?;
    let bytes = m.read(&args.responses)?;
    let responses = read_responses(&bytes[..]).map_err(|e| CliError::from(e).at(&args.responses))?;
    let optimal: HashMap<String, usize> = match &args.labels {
        Some(path) => load_labels(&mut m, path)?.into_iter().filter_map(|r| r.length.map(|l| (r.id, l))).collect(),
        None => label_corpus(&tasks, &config.solve)
            .labeled
            .into_iter()
            .map(|l| (l.task.id().to_owned(), l.plan.len()))
            .collect(),
    };
    let report = evaluate_responses(&tasks, &responses, &optimal).map_err(|e| CliError::from(e).at(&args.responses))?;
    m.write(&args.out_dir.join("report.json"), &json_bytes(&report))?;
    m.write(&args.out_dir.join("report.md"), report.to_markdown().as_bytes())?;
    m.write(&args.out_dir.join("histogram.md"), render_histogram(&solved_by_length_histogram(&report)).as_bytes())?;
    m.save(&args.out_dir.join("manifest.json"))
}

fn cmd_pddl(config: PipelineConfig, args: PddlArgs) -> Result<(), CliError> {
    let mut m = Manifest::new("pddl", config.seed, &serde_json::Value::Null, Some(&args.out_dir));
    let tasks = load_tasks(&mut m, &args.tasks)?;
    let plans: HashMap<String, Plan> = match &args.labels {
        Some(path) => load_labels(&mut m, path)?.into_iter().filter_map(|r| r.plan.map(|p| (r.id, p))).collect(),
        None => HashMap::new(),
    };
    let mut domains_written = Vec::new();
    for task in &tasks {
        let (domain, problem) = emit_pddl(task);
        if !domains_written.contains(&task.domain()) {
            m.write(&args.out_dir.join(format!("domain-{}.pddl", task.domain())), domain.as_bytes())?;
            domains_written.push(task.domain());
        }
        m.write(&args.out_dir.join(format!("{}.pddl", task.id())), problem.as_bytes())?;
        if let Some(plan) = plans.get(task.id()) {
            m.write(&args.out_dir.join(format!("{}.plan", task.id())), pddl_plan(plan).as_bytes())?;
        }
    }
    m.save(&args.out_dir.join("manifest.json"))
}

/// Selection summary without per-point arrays.
#[derive(Debug, Serialize)]
pub(crate) struct SelectionSummary<'a> {
    pub method: &'a str,
    pub k: usize,
    pub seed: u64,
    pub diversity: f64,
    pub selected_ids: &'a [String],
    pub cluster_sizes: &'a [usize],
}

impl<'a> SelectionSummary<'a> {
    pub fn new(method: &'a str, seed: u64, r: &'a SelectionResult) -> Self {
        SelectionSummary {
            method,
            k: r.selected_ids.len(),
            seed,
            diversity: r.diversity,
            selected_ids: &r.selected_ids,
            cluster_sizes: &r.cluster_sizes,
        }
    }
}

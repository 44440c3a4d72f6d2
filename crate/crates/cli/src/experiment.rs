//! Desk-scale reproduction run: one corpus, every method at every subset
//! size, fine-tuning datasets for each selection and a diversity table.

use std::collections::HashMap;
use std::fmt::Write;
use std::path::Path;

use plandiv_core::embedding::EmbeddingSet;
use plandiv_core::generate::{generate, make_imbalanced, split_holdout, DepletedCluster};
use plandiv_core::io::LabelRecord;
use plandiv_core::nl::emit_finetune_dataset;
use plandiv_core::select::{diversity, select_cmds, select_random, SelectionResult};
use plandiv_core::solver::label_corpus;
use plandiv_core::{Plan, SolveStatus, TaskInstance};
use serde::Serialize;

use crate::config::{stage_seed, Method, PipelineConfig};
use crate::error::CliError;
use crate::manifest::Manifest;
use crate::{embed, json_bytes, jsonl_bytes, pair_with_plans, prompt_style, tasks_bytes, EmbedKind, SelectionSummary};

#[derive(Debug, Serialize)]
struct ImbalanceReport<'a> {
    n_before: usize,
    n_after: usize,
    depleted: &'a [DepletedCluster],
}

#[derive(Debug, Clone, Serialize)]
pub struct Spread {
    pub mean: f64,
    pub std: f64,
    pub draws: usize,
}

impl Spread {
    fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var =
            if values.len() > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Spread { mean, std: var.sqrt(), draws: values.len() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiversityRow {
    pub method: &'static str,
    pub k: usize,
    /// Sum of pairwise graph edit distances.
    pub graph: Spread,
    /// Sum of pairwise L2 distances between text embeddings.
    pub text: Spread,
}

fn render_table(rows: &[DiversityRow], ks: &[usize], methods: &[Method]) -> String {
    let mut out =
        String::from("Graph edit diversity (sum of pairwise distances; random: mean ± std over draws)\n\n| method |");
    for k in ks {
        let _ = write!(out, " k={k} |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(ks.len()));
    out.push('\n');
    for method in methods {
        let _ = write!(out, "| {} |", method.name());
        for &k in ks {
            let row = rows.iter().find(|r| r.method == method.name() && r.k == k).expect("row per cell");
            if row.graph.draws > 1 {
                let _ = write!(out, " {:.1} ± {:.1} |", row.graph.mean, row.graph.std);
            } else {
                let _ = write!(out, " {:.1} |", row.graph.mean);
            }
        }
        out.push('\n');
    }
    out
}

pub fn run(config: &PipelineConfig, out: &Path) -> Result<(), CliError> {
    let ex = &config.experiment;
    if ex.random_draws == 0 && ex.methods.contains(&Method::Random) {
        return Err(CliError::usage("experiment.random_draws must be at least 1"));
    }
    let mut m = Manifest::new("experiment", config.seed, config, Some(out));
    let seed = config.seed;

    let tasks = generate(&config.generate.spec(m.stage("generate", stage_seed(seed, "generate"))))?;
    m.write(&out.join("tasks.jsonl"), &tasks_bytes(&tasks))?;
    let (mut train, test) = split_holdout(&tasks, ex.n_test, m.stage("split", stage_seed(seed, "split")))?;

    if let Some(imb) = &config.imbalance {
        let (graph, _) = EmbeddingSet::from_tasks(&train)?;
        let spec = imb.spec(m.stage("imbalance", stage_seed(seed, "imbalance")));
        let outcome = make_imbalanced(&train, graph.vectors(), &spec)?;
        let report =
            ImbalanceReport { n_before: train.len(), n_after: outcome.tasks.len(), depleted: &outcome.depleted };
        m.write(&out.join("imbalance.json"), &json_bytes(&report))?;
        train = outcome.tasks;
    }
    m.write(&out.join("train.jsonl"), &tasks_bytes(&train))?;
    m.write(&out.join("test.jsonl"), &tasks_bytes(&test))?;

    let everything: Vec<TaskInstance> = train.iter().chain(&test).cloned().collect();
    let corpus = label_corpus(&everything, &config.solve);
    m.write(&out.join("labels.jsonl"), &jsonl_bytes(&LabelRecord::from_corpus(&everything, &corpus)))?;
    let limited = corpus.unlabeled.iter().filter(|u| u.status == SolveStatus::LimitExceeded).count();
    if limited > 0 {
        return Err(CliError::resource(format!("{limited} tasks hit the search limit")));
    }
    let plans: HashMap<String, Plan> = corpus.labeled.into_iter().map(|l| (l.task.id().to_owned(), l.plan)).collect();

    let graph = embed(&train, EmbedKind::Graph)?;
    let text = embed(&train, EmbedKind::Text)?;
    for (name, set) in [("graph", &graph), ("text", &text)] {
        let mut buf = Vec::new();
        set.write_jsonl(&mut buf)?;
        m.write(&out.join("embeddings").join(format!("{name}.jsonl")), &buf)?;
    }

    let emit = |m: &mut Manifest, path: &Path, tasks: &[TaskInstance]| -> Result<(), CliError> {
        let pairs = pair_with_plans(tasks, &plans)?;
        let mut buf = Vec::new();
        let mode = config.emit.prompt;
        emit_finetune_dataset(&pairs, |t| prompt_style(mode, t.domain()), &mut buf)?;
        m.write(path, &buf)
    };
    emit(&mut m, &out.join("datasets").join("test.jsonl"), &test)?;

    let mut rows = Vec::new();
    for &k in &ex.k {
        if k == 0 || k > train.len() {
            return Err(CliError::usage(format!("subset size {k} outside [1, {}]", train.len())));
        }
        for &method in &ex.methods {
            let stage = format!("select/{}/k{k}", method.name());
            let draws = if method == Method::Random { ex.random_draws } else { 1 };
            let mut results: Vec<(u64, SelectionResult)> = Vec::with_capacity(draws);
            for d in 0..draws {
                let name = if method == Method::Random { format!("{stage}/draw{d}") } else { stage.clone() };
                let s = m.stage(&name, stage_seed(seed, &name));
                let r = match method {
                    Method::Random => select_random(&graph, k, s)?,
                    Method::CmdsG => select_cmds(&graph, &config.select.selection(k, s))?,
                    Method::CmdsL => select_cmds(&text, &config.select.selection(k, s))?,
                };
                results.push((s, r));
            }
            let graph_div: Vec<f64> = results.iter().map(|(_, r)| diversity(&graph, &r.selected_indices)).collect();
            let text_div: Vec<f64> = results.iter().map(|(_, r)| diversity(&text, &r.selected_indices)).collect();
            rows.push(DiversityRow {
                method: method.name(),
                k,
                graph: Spread::of(&graph_div),
                text: Spread::of(&text_div),
            });

            let (s, first) = &results[0];
            let file = format!("{}_k{k}", method.name());
            #[derive(Serialize)]
            struct SelectionFile<'a> {
                #[serde(flatten)]
                summary: SelectionSummary<'a>,
                coords_2d: &'a Option<Vec<[f64; 2]>>,
            }
            let summary =
                SelectionFile { summary: SelectionSummary::new(method.name(), *s, first), coords_2d: &first.coords_2d };
            m.write(&out.join("selections").join(format!("{file}.json")), &json_bytes(&summary))?;
            let chosen: Vec<TaskInstance> = first.selected_indices.iter().map(|&i| train[i].clone()).collect();
            emit(&mut m, &out.join("datasets").join(format!("{file}.jsonl")), &chosen)?;
        }
    }
    m.write(&out.join("diversity.json"), &json_bytes(&rows))?;
    m.write(&out.join("diversity.md"), render_table(&rows, &ex.k, &ex.methods).as_bytes())?;
    m.save(&out.join("manifest.json"))
}

//! Plan validation by simulation and the corpus metrics: solved rate,
//! optimality rate and solved-by-length histograms.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{apply_action, Plan, TaskInstance, ViolationReason};
use crate::nl::{parse_response, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Valid {
        length: usize,
        optimal_length: Option<usize>,
        is_optimal: Option<bool>,
    },
    ParseError {
        error: ParseError,
    },
    /// `step` is 1-based.
    PreconditionViolation {
        step: usize,
        action: String,
        reason: ViolationReason,
    },
    GoalNotSatisfied {
        length: usize,
    },
    /// No response was given for the task.
    Missing,
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Valid { .. } => "valid",
            Verdict::ParseError { .. } => "parse_error",
            Verdict::PreconditionViolation { .. } => "precondition_violation",
            Verdict::GoalNotSatisfied { .. } => "goal_not_satisfied",
            Verdict::Missing => "missing",
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }

    pub fn is_optimal(&self) -> bool {
        matches!(self, Verdict::Valid { is_optimal: Some(true), .. })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("response for unknown task id {0}")]
    UnknownId(String),
    #[error("more than one response for task id {0}")]
    DuplicateId(String),
}

/// Simulates `plan` from the task's initial state.
pub fn validate_plan(task: &TaskInstance, plan: &Plan) -> Verdict {
    validate_plan_with_oracle(task, plan, None)
}

pub fn validate_plan_with_oracle(task: &TaskInstance, plan: &Plan, optimal_length: Option<usize>) -> Verdict {
    let problem = task.problem();
    let mut state = problem.init();
    for (i, action) in plan.actions().iter().enumerate() {
        match apply_action(&state, action) {
            Ok(next) => state = next,
            Err(v) => return Verdict::PreconditionViolation { step: i + 1, action: v.action, reason: v.reason },
        }
    }
    if !problem.satisfied_by(&state) {
        return Verdict::GoalNotSatisfied { length: plan.len() };
    }
    Verdict::Valid { length: plan.len(), optimal_length, is_optimal: optimal_length.map(|o| o == plan.len()) }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskVerdict {
    pub id: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBucket {
    /// `None` for tasks without an oracle length.
    pub optimal_length: Option<usize>,
    pub attempted: usize,
    pub solved: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub n_tasks: usize,
    pub n_solved: usize,
    pub solved_rate: f64,
    pub n_optimal: usize,
    /// Optimal plans over correct plans; absent when nothing was solved.
    pub optimality_rate: Option<f64>,
    pub histogram: Vec<LengthBucket>,
    pub failures: BTreeMap<String, usize>,
    pub verdicts: Vec<TaskVerdict>,
}

impl CorpusReport {
    /// Aggregates verdicts; the result does not depend on their order.
    pub fn from_verdicts(mut verdicts: Vec<TaskVerdict>, optimal: &HashMap<String, usize>) -> Self {
        verdicts.sort_by(|a, b| a.id.cmp(&b.id));
        let n_tasks = verdicts.len();
        let n_solved = verdicts.iter().filter(|v| v.verdict.is_valid()).count();
        let n_optimal = verdicts.iter().filter(|v| v.verdict.is_optimal()).count();
        let mut buckets: BTreeMap<Option<usize>, (usize, usize)> = BTreeMap::new();
        let mut failures = BTreeMap::new();
        for v in &verdicts {
            let entry = buckets.entry(optimal.get(&v.id).copied()).or_default();
            entry.0 += 1;
            if v.verdict.is_valid() {
                entry.1 += 1;
            } else {
                *failures.entry(v.verdict.kind().to_owned()).or_insert(0) += 1;
            }
        }
        CorpusReport {
            n_tasks,
            n_solved,
            solved_rate: if n_tasks == 0 { 0.0 } else { n_solved as f64 / n_tasks as f64 },
            n_optimal,
            optimality_rate: (n_solved > 0).then(|| n_optimal as f64 / n_solved as f64),
            histogram: buckets
                .into_iter()
                .map(|(optimal_length, (attempted, solved))| LengthBucket { optimal_length, attempted, solved })
                .collect(),
            failures,
            verdicts,
        }
    }

    /// Markdown summary and per-length table.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| metric | value |\n|---|---|");
        let _ = writeln!(out, "| tasks | {} |", self.n_tasks);
        let _ = writeln!(out, "| solved | {} |", self.n_solved);
        let _ = writeln!(out, "| solved rate | {:.4} |", self.solved_rate);
        let _ = writeln!(out, "| optimal | {} |", self.n_optimal);
        match self.optimality_rate {
            Some(r) => {
                let _ = writeln!(out, "| optimality rate | {r:.4} |");
            }
            None => out.push_str("| optimality rate | n/a |\n"),
        }
        for (kind, n) in &self.failures {
            let _ = writeln!(out, "| {kind} | {n} |");
        }
        out.push('\n');
        out.push_str(&render_histogram(&solved_by_length_histogram(self)));
        out
    }
}

/// Parses and validates every response; tasks without one count as failures.
pub fn evaluate_responses(
    tasks: &[TaskInstance],
    responses: &[(String, String)],
    optimal: &HashMap<String, usize>,
) -> Result<CorpusReport, EvalError> {
    let index: HashMap<&str, &TaskInstance> = tasks.iter().map(|t| (t.id(), t)).collect();
    let mut by_id: HashMap<&str, &str> = HashMap::new();
    for (id, text) in responses {
        if !index.contains_key(id.as_str()) {
            return Err(EvalError::UnknownId(id.clone()));
        }
        if by_id.insert(id, text).is_some() {
            return Err(EvalError::DuplicateId(id.clone()));
        }
    }
    let verdicts = tasks
        .par_iter()
        .map(|task| {
            let verdict = match by_id.get(task.id()) {
                None => Verdict::Missing,
                Some(text) => match parse_response(text, task.domain()) {
                    Err(error) => Verdict::ParseError { error },
                    Ok(plan) => validate_plan_with_oracle(task, &plan, optimal.get(task.id()).copied()),
                },
            };
            TaskVerdict { id: task.id().to_owned(), verdict }
        })
        .collect();
    Ok(CorpusReport::from_verdicts(verdicts, optimal))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub optimal_length: Option<usize>,
    pub attempted: usize,
    pub solved: usize,
    pub rate: f64,
}

pub fn solved_by_length_histogram(report: &CorpusReport) -> Vec<HistogramRow> {
    report
        .histogram
        .iter()
        .map(|b| HistogramRow {
            optimal_length: b.optimal_length,
            attempted: b.attempted,
            solved: b.solved,
            rate: if b.attempted == 0 { 0.0 } else { b.solved as f64 / b.attempted as f64 },
        })
        .collect()
}

pub fn render_histogram(rows: &[HistogramRow]) -> String {
    let mut out = String::from("| optimal length | attempted | solved | rate |\n|---|---|---|---|\n");
    for r in rows {
        let len = r.optimal_length.map_or_else(|| "unknown".to_owned(), |l| l.to_string());
        let _ = writeln!(out, "| {len} | {} | {} | {:.4} |", r.attempted, r.solved, r.rate);
    }
    out
}

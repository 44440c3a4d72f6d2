use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{render_plan, render_prompt, PromptStyle};
use crate::domain::{Plan, TaskInstance};
use crate::eval::{validate_plan, Verdict};
use crate::solver::LabeledTask;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: String },
    #[error("plan for task {id} does not validate: {verdict:?}")]
    InvalidPlan { id: String, verdict: Box<Verdict> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinetuneRecord {
    pub messages: Vec<ChatMessage>,
}

pub fn finetune_record(task: &TaskInstance, plan: &Plan, style: &PromptStyle) -> Result<FinetuneRecord, DatasetError> {
    let verdict = validate_plan(task, plan);
    if !verdict.is_valid() {
        return Err(DatasetError::InvalidPlan { id: task.id().to_owned(), verdict: Box::new(verdict) });
    }
    Ok(FinetuneRecord {
        messages: vec![
            ChatMessage { role: "user".into(), content: render_prompt(task, style) },
            ChatMessage { role: "assistant".into(), content: render_plan(plan) },
        ],
    })
}

/// Writes one chat record per pair, in input order; returns the record count.
///
/// `style_for` picks the prompt style per task, so one-shot prompts over a
/// mixed corpus can use an example from each task's own domain.
pub fn emit_finetune_dataset(
    pairs: &[LabeledTask],
    style_for: impl Fn(&TaskInstance) -> PromptStyle,
    mut w: impl Write,
) -> Result<usize, DatasetError> {
    let records =
        pairs.iter().map(|p| finetune_record(&p.task, &p.plan, &style_for(&p.task))).collect::<Result<Vec<_>, _>>()?;
    for r in &records {
        serde_json::to_writer(&mut w, r).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(records.len())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseRecord {
    pub id: String,
    pub text: String,
}

pub fn write_responses(responses: &[(String, String)], mut w: impl Write) -> Result<(), DatasetError> {
    for (id, text) in responses {
        let rec = ResponseRecord { id: id.clone(), text: text.clone() };
        serde_json::to_writer(&mut w, &rec).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_responses(r: impl BufRead) -> Result<Vec<(String, String)>, DatasetError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ResponseRecord =
            serde_json::from_str(&line).map_err(|e| DatasetError::Format { line: i + 1, msg: e.to_string() })?;
        if !seen.insert(rec.id.clone()) {
            return Err(DatasetError::DuplicateId { line: i + 1, id: rec.id });
        }
        out.push((rec.id, rec.text));
    }
    Ok(out)
}

pub fn ingest_responses(path: &Path) -> Result<Vec<(String, String)>, DatasetError> {
    read_responses(BufReader::new(File::open(path)?))
}

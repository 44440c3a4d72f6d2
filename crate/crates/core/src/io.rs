//! Newline-delimited JSON files for tasks and solver labels.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Plan, TaskInstance};
use crate::solver::{LabeledCorpus, SolveStatus};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_jsonl<T: Serialize>(records: &[T], mut w: impl Write) -> Result<(), FileError> {
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Records with their 1-based line numbers; blank lines are skipped.
pub fn read_jsonl<T: DeserializeOwned>(r: impl BufRead) -> Result<Vec<(usize, T)>, FileError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| FileError::Format { line: i + 1, msg: e.to_string() })?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

pub fn write_tasks(tasks: &[TaskInstance], w: impl Write) -> Result<(), FileError> {
    write_jsonl(tasks, w)
}

/// Reads a tasks file; ids are re-derived from content and must be unique.
pub fn read_tasks(r: impl BufRead) -> Result<Vec<TaskInstance>, FileError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, task) in read_jsonl::<TaskInstance>(r)? {
        if !seen.insert(task.id().to_owned()) {
            return Err(FileError::DuplicateId { line, id: task.id().to_owned() });
        }
        out.push(task);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelRecord {
    pub id: String,
    pub status: SolveStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<Plan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
}

impl LabelRecord {
    pub fn from_corpus(tasks: &[TaskInstance], corpus: &LabeledCorpus) -> Vec<LabelRecord> {
        let mut labeled = corpus.labeled.iter().peekable();
        let mut unlabeled = corpus.unlabeled.iter().peekable();
        tasks
            .iter()
            .filter_map(|t| {
                if let Some(l) = labeled.next_if(|l| l.task.id() == t.id()) {
                    let plan = l.plan.clone();
                    Some(LabelRecord {
                        id: t.id().to_owned(),
                        status: SolveStatus::Solved,
                        length: Some(plan.len()),
                        plan: Some(plan),
                    })
                } else {
                    unlabeled.next_if(|u| u.id == t.id()).map(|u| LabelRecord {
                        id: u.id.clone(),
                        status: u.status,
                        plan: None,
                        length: None,
                    })
                }
            })
            .collect()
    }
}

pub fn read_labels(r: impl BufRead) -> Result<Vec<LabelRecord>, FileError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, rec) in read_jsonl::<LabelRecord>(r)? {
        if !seen.insert(rec.id.clone()) {
            return Err(FileError::DuplicateId { line, id: rec.id });
        }
        if rec.plan.as_ref().map(Plan::len) != rec.length {
            return Err(FileError::Format { line, msg: "length disagrees with plan".into() });
        }
        out.push(rec);
    }
    Ok(out)
}

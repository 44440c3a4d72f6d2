//! Planning-task data curation: generation, optimal solving, graph embedding,
//! clustering-based diverse subset selection, prompt/plan codecs and plan
//! evaluation for Blocksworld and Logistics.

pub mod domain;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod generate;
pub mod io;
pub mod nl;
pub mod select;
pub mod solver;

pub use domain::{
    applicable_actions, apply_action, canonical_digest, Action, DomainKind, Plan, PlanningDomain, Problem, State,
    TaskInstance, TaskMeta,
};
pub use error::{Error, Result};
pub use eval::{validate_plan, CorpusReport, Verdict};
pub use nl::{parse_plan, render_plan, render_prompt, render_task, PromptStyle};
pub use select::{SelectionConfig, SelectionResult};
pub use solver::{solve_optimal, LabeledTask, SolveLimits, SolveResult, SolveStatus};

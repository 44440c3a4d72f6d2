//! Shared fixtures for the benchmarks.

use plandiv_core::embedding::EmbeddingSet;
use plandiv_core::generate::{generate, GenSpec, LogisticsRanges};
use plandiv_core::TaskInstance;

pub fn blocksworld_corpus(n_blocks: usize, count: usize, seed: u64) -> Vec<TaskInstance> {
    generate(&GenSpec::blocksworld(n_blocks, count, seed)).expect("corpus fits in the task space")
}

pub fn logistics_corpus(count: usize, seed: u64) -> Vec<TaskInstance> {
    generate(&GenSpec::logistics(LogisticsRanges::default(), count, seed)).expect("corpus fits in the task space")
}

pub fn graph_embeddings(tasks: &[TaskInstance]) -> EmbeddingSet {
    EmbeddingSet::from_tasks(tasks).expect("single-domain corpus").0
}

//! Optimal plans by blind search over the reachable state graph.
//!
//! Breadth-first search with duplicate detection returns a shortest plan under
//! unit action costs. Successors are expanded in `applicable` order, which makes
//! the returned plan unique per task.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Action, Blocksworld, Logistics, Plan, PlanningDomain, Problem, TaskInstance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveLimits {
    pub max_nodes: usize,
    pub max_seconds: f64,
}

impl Default for SolveLimits {
    fn default() -> Self {
        SolveLimits { max_nodes: 5_000_000, max_seconds: 60.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Solved,
    Unsolvable,
    LimitExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    #[default]
    BreadthFirst,
    /// Best-first on path cost with a zero heuristic; a cross-check for BFS.
    UniformCost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub plan: Option<Plan>,
    pub expanded: usize,
    pub elapsed: Duration,
}

impl SolveResult {
    pub fn length(&self) -> Option<usize> {
        self.plan.as_ref().map(Plan::len)
    }
}

struct Search<D: PlanningDomain> {
    states: Vec<D::State>,
    parent: Vec<Option<(usize, D::Action)>>,
    index: HashMap<D::State, usize>,
}

impl<D: PlanningDomain> Search<D> {
    fn new(init: &D::State) -> Self {
        let mut index = HashMap::new();
        index.insert(init.clone(), 0);
        Search { states: vec![init.clone()], parent: vec![None], index }
    }

    /// Registers `state` if unseen; returns its node id when new.
    fn discover(&mut self, state: D::State, from: usize, action: D::Action) -> Option<usize> {
        match self.index.entry(state) {
            Entry::Occupied(_) => None,
            Entry::Vacant(v) => {
                let id = self.states.len();
                self.states.push(v.key().clone());
                v.insert(id);
                self.parent.push(Some((from, action)));
                Some(id)
            }
        }
    }

    fn path_to(&self, mut node: usize) -> Vec<D::Action> {
        let mut actions = Vec::new();
        while let Some((prev, action)) = &self.parent[node] {
            actions.push(action.clone());
            node = *prev;
        }
        actions.reverse();
        actions
    }
}

type Outcome<A> = (SolveStatus, Option<Vec<A>>, usize);

fn over_budget(expanded: usize, started: Instant, limits: &SolveLimits) -> bool {
    expanded >= limits.max_nodes || (expanded.is_multiple_of(1024) && started.elapsed().as_secs_f64() > limits.max_seconds)
}

fn breadth_first<D: PlanningDomain>(init: &D::State, goal: &D::Goal, limits: &SolveLimits) -> Outcome<D::Action> {
    let started = Instant::now();
    if D::satisfies(init, goal) {
        return (SolveStatus::Solved, Some(Vec::new()), 0);
    }
    let mut search = Search::<D>::new(init);
    let mut frontier = VecDeque::from([0usize]);
    let mut expanded = 0;
    while let Some(node) = frontier.pop_front() {
        if over_budget(expanded, started, limits) {
            return (SolveStatus::LimitExceeded, None, expanded);
        }
        expanded += 1;
        let state = search.states[node].clone();
        for action in D::applicable(&state) {
            let next = D::apply(&state, &action).expect("applicable actions apply");
            let done = D::satisfies(&next, goal);
            if let Some(id) = search.discover(next, node, action) {
                if done {
                    return (SolveStatus::Solved, Some(search.path_to(id)), expanded);
                }
                frontier.push_back(id);
            }
        }
    }
    (SolveStatus::Unsolvable, None, expanded)
}

fn uniform_cost<D: PlanningDomain>(init: &D::State, goal: &D::Goal, limits: &SolveLimits) -> Outcome<D::Action> {
    let started = Instant::now();
    let mut search = Search::<D>::new(init);
    let mut closed = vec![false];
    // (g, discovery order) keeps the pop order deterministic.
    let mut open = BinaryHeap::from([Reverse((0usize, 0usize))]);
    let mut expanded = 0;
    while let Some(Reverse((g, node))) = open.pop() {
        if closed[node] {
            continue;
        }
        if D::satisfies(&search.states[node], goal) {
            return (SolveStatus::Solved, Some(search.path_to(node)), expanded);
        }
        if over_budget(expanded, started, limits) {
            return (SolveStatus::LimitExceeded, None, expanded);
        }
        closed[node] = true;
        expanded += 1;
        let state = search.states[node].clone();
        for action in D::applicable(&state) {
            let next = D::apply(&state, &action).expect("applicable actions apply");
            if let Some(id) = search.discover(next, node, action) {
                closed.push(false);
                open.push(Reverse((g + 1, id)));
            }
        }
    }
    (SolveStatus::Unsolvable, None, expanded)
}

fn run<D: PlanningDomain>(
    init: &D::State,
    goal: &D::Goal,
    limits: &SolveLimits,
    mode: SearchMode,
    wrap: impl Fn(D::Action) -> Action,
) -> SolveResult {
    let started = Instant::now();
    let (status, actions, expanded) = match mode {
        SearchMode::BreadthFirst => breadth_first::<D>(init, goal, limits),
        SearchMode::UniformCost => uniform_cost::<D>(init, goal, limits),
    };
    SolveResult {
        status,
        plan: actions.map(|a| a.into_iter().map(&wrap).collect()),
        expanded,
        elapsed: started.elapsed(),
    }
}

pub fn solve_problem(problem: &Problem, limits: &SolveLimits, mode: SearchMode) -> SolveResult {
    match problem {
        Problem::Blocksworld { init, goal } => run::<Blocksworld>(init, goal, limits, mode, Action::Blocksworld),
        Problem::Logistics { init, goal } => run::<Logistics>(init, goal, limits, mode, Action::Logistics),
    }
}

/// Shortest plan by breadth-first search.
pub fn solve_optimal(task: &TaskInstance, limits: &SolveLimits) -> SolveResult {
    solve_problem(task.problem(), limits, SearchMode::BreadthFirst)
}

/// Optimal plan length, or `None` when the search did not finish with a plan.
pub fn optimal_length(problem: &Problem, limits: &SolveLimits) -> Option<usize> {
    solve_problem(problem, limits, SearchMode::BreadthFirst).length()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledTask {
    pub task: TaskInstance,
    pub plan: Plan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unlabeled {
    pub id: String,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledCorpus {
    pub labeled: Vec<LabeledTask>,
    pub unlabeled: Vec<Unlabeled>,
}

/// Pairs every task with an optimal plan; order follows the input.
pub fn label_corpus(tasks: &[TaskInstance], limits: &SolveLimits) -> LabeledCorpus {
    let results: Vec<SolveResult> = tasks.par_iter().map(|t| solve_optimal(t, limits)).collect();
    let mut out = LabeledCorpus::default();
    for (task, result) in tasks.iter().zip(results) {
        match result.plan {
            Some(plan) => out.labeled.push(LabeledTask { task: task.clone(), plan }),
            None => out.unlabeled.push(Unlabeled { id: task.id().to_owned(), status: result.status }),
        }
    }
    out
}

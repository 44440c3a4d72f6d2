//! Executable semantics for the two planning domains and the task/plan types
//! shared by every other module.

pub mod blocksworld;
pub mod logistics;

use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use blocksworld::{BlockId, Blocksworld, BlocksworldAction, BlocksworldGoal, BlocksworldState, Support, PALETTE};
pub use logistics::{
    AirplaneId, Location, Logistics, LogisticsAction, LogisticsGoal, LogisticsState, LogisticsTopology, PackageId,
    PackagePosition, TruckId,
};

/// STRIPS-style transition semantics of one domain.
pub trait PlanningDomain {
    type State: Clone + Eq + Hash;
    type Goal;
    type Action: Clone;

    /// Successor state, or the first failed precondition.
    fn apply(state: &Self::State, action: &Self::Action) -> Result<Self::State, Violation>;

    /// Every action `apply` accepts in `state`, ordered by kind then object index.
    fn applicable(state: &Self::State) -> Vec<Self::Action>;

    fn satisfies(state: &Self::State, goal: &Self::Goal) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationReason {
    HandNotEmpty,
    NotHolding,
    BlockNotClear,
    TargetNotClear,
    NotOnTable,
    NotOnClaimedSupport,
    SameObject,
    UnknownObject,
    PackageNotAtLocation,
    PackageNotInVehicle,
    VehicleNotAtLocation,
    TruckWrongCity,
    NotAnAirport,
    DomainMismatch,
}

impl fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().unwrap_or("unknown"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("precondition violated by {action}: {reason}")]
pub struct Violation {
    pub action: String,
    pub reason: ViolationReason,
}

impl Violation {
    pub fn new(action: String, reason: ViolationReason) -> Self {
        Violation { action, reason }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid task: {0}")]
pub struct InvalidTask(pub String);

impl InvalidTask {
    pub fn new(msg: impl Into<String>) -> Self {
        InvalidTask(msg.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Blocksworld,
    Logistics,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::Blocksworld => "blocksworld",
            DomainKind::Logistics => "logistics",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum State {
    Blocksworld(BlocksworldState),
    Logistics(LogisticsState),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Action {
    Blocksworld(BlocksworldAction),
    Logistics(LogisticsAction),
}

impl Action {
    pub fn domain(&self) -> DomainKind {
        match self {
            Action::Blocksworld(_) => DomainKind::Blocksworld,
            Action::Logistics(_) => DomainKind::Logistics,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Blocksworld(a) => a.fmt(f),
            Action::Logistics(a) => a.fmt(f),
        }
    }
}

impl From<BlocksworldAction> for Action {
    fn from(a: BlocksworldAction) -> Self {
        Action::Blocksworld(a)
    }
}

impl From<LogisticsAction> for Action {
    fn from(a: LogisticsAction) -> Self {
        Action::Logistics(a)
    }
}

/// Domain-dispatching successor function.
pub fn apply_action(state: &State, action: &Action) -> Result<State, Violation> {
    match (state, action) {
        (State::Blocksworld(s), Action::Blocksworld(a)) => Blocksworld::apply(s, a).map(State::Blocksworld),
        (State::Logistics(s), Action::Logistics(a)) => Logistics::apply(s, a).map(State::Logistics),
        _ => Err(Violation::new(action.to_string(), ViolationReason::DomainMismatch)),
    }
}

pub fn applicable_actions(state: &State) -> Vec<Action> {
    match state {
        State::Blocksworld(s) => Blocksworld::applicable(s).into_iter().map(Action::from).collect(),
        State::Logistics(s) => Logistics::applicable(s).into_iter().map(Action::from).collect(),
    }
}

/// An ordered action sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Plan(pub Vec<Action>);

impl Plan {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }
}

impl FromIterator<Action> for Plan {
    fn from_iter<I: IntoIterator<Item = Action>>(iter: I) -> Self {
        Plan(iter.into_iter().collect())
    }
}

/// Initial state plus goal for one domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "domain", rename_all = "lowercase")]
pub enum Problem {
    Blocksworld { init: BlocksworldState, goal: BlocksworldGoal },
    Logistics { init: LogisticsState, goal: LogisticsGoal },
}

impl Problem {
    pub fn domain(&self) -> DomainKind {
        match self {
            Problem::Blocksworld { .. } => DomainKind::Blocksworld,
            Problem::Logistics { .. } => DomainKind::Logistics,
        }
    }

    pub fn init(&self) -> State {
        match self {
            Problem::Blocksworld { init, .. } => State::Blocksworld(init.clone()),
            Problem::Logistics { init, .. } => State::Logistics(init.clone()),
        }
    }

    pub fn satisfied_by(&self, state: &State) -> bool {
        match (self, state) {
            (Problem::Blocksworld { goal, .. }, State::Blocksworld(s)) => Blocksworld::satisfies(s, goal),
            (Problem::Logistics { goal, .. }, State::Logistics(s)) => Logistics::satisfies(s, goal),
            _ => false,
        }
    }

    /// Structural checks that do not involve the goal-at-init rule.
    pub fn check(&self) -> Result<(), InvalidTask> {
        match self {
            Problem::Blocksworld { init, goal } => {
                if goal.max_block().index() >= init.n_blocks() {
                    return Err(InvalidTask::new("goal mentions a block absent from the initial state"));
                }
                if !init.hand_empty() {
                    return Err(InvalidTask::new("initial state must have an empty hand"));
                }
                Ok(())
            }
            Problem::Logistics { init, goal } => goal.check_against(init),
        }
    }

    pub fn meta(&self) -> TaskMeta {
        match self {
            Problem::Blocksworld { init, .. } => TaskMeta::Blocksworld { n_blocks: init.n_blocks() },
            Problem::Logistics { init, .. } => {
                let t = init.topology();
                TaskMeta::Logistics {
                    n_cities: t.n_cities as usize,
                    n_locations: t.locations_per_city as usize,
                    n_airplanes: t.n_airplanes as usize,
                    n_packages: init.n_packages(),
                }
            }
        }
    }

    /// Hex SHA-256 of the canonical JSON form, truncated to 128 bits.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("problem serializes");
        let hash = Sha256::digest(&canonical);
        hex::encode(&hash[..16])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskMeta {
    Blocksworld { n_blocks: usize },
    Logistics { n_cities: usize, n_locations: usize, n_airplanes: usize, n_packages: usize },
}

/// A validated planning task whose goal does not already hold initially.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTask")]
pub struct TaskInstance {
    id: String,
    meta: TaskMeta,
    #[serde(flatten)]
    problem: Problem,
}

#[derive(Deserialize)]
struct RawTask {
    id: String,
    #[serde(flatten)]
    problem: Problem,
}

impl TryFrom<RawTask> for TaskInstance {
    type Error = InvalidTask;

    fn try_from(raw: RawTask) -> Result<Self, Self::Error> {
        let task = TaskInstance::new(raw.problem)?;
        if task.id != raw.id {
            return Err(InvalidTask::new(format!("id {} does not match content digest {}", raw.id, task.id)));
        }
        Ok(task)
    }
}

impl TaskInstance {
    pub fn new(problem: Problem) -> Result<Self, InvalidTask> {
        problem.check()?;
        if problem.satisfied_by(&problem.init()) {
            return Err(InvalidTask::new("goal already holds in the initial state"));
        }
        Ok(TaskInstance { id: problem.digest(), meta: problem.meta(), problem })
    }

    pub fn blocksworld(init: BlocksworldState, goal: BlocksworldGoal) -> Result<Self, InvalidTask> {
        Self::new(Problem::Blocksworld { init, goal })
    }

    pub fn logistics(init: LogisticsState, goal: LogisticsGoal) -> Result<Self, InvalidTask> {
        Self::new(Problem::Logistics { init, goal })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain(&self) -> DomainKind {
        self.problem.domain()
    }

    pub fn meta(&self) -> TaskMeta {
        self.meta
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    /// Number of blocks, or number of packages for Logistics.
    pub fn size(&self) -> usize {
        match self.meta {
            TaskMeta::Blocksworld { n_blocks } => n_blocks,
            TaskMeta::Logistics { n_packages, .. } => n_packages,
        }
    }
}

/// Stable digest of a task's domain, init and goal.
pub fn canonical_digest(task: &TaskInstance) -> String {
    task.problem.digest()
}

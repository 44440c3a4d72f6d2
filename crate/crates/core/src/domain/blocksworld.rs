//! Four-operator Blocksworld.
//!
//! A state maps every block to what it rests on: the table, another block, or
//! the hand. `clear`, `ontable` and `handempty` are derived from that map.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{InvalidTask, PlanningDomain, Violation, ViolationReason};

/// Block colors, in index order. Block `i` is always `PALETTE[i]`.
pub const PALETTE: [&str; 8] = ["red", "blue", "orange", "yellow", "green", "cyan", "magenta", "white"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockId(u8);

impl BlockId {
    pub fn new(index: usize) -> Option<Self> {
        (index < PALETTE.len()).then_some(BlockId(index as u8))
    }

    pub fn from_color(color: &str) -> Option<Self> {
        PALETTE.iter().position(|c| c.eq_ignore_ascii_case(color)).map(|i| BlockId(i as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn color(self) -> &'static str {
        PALETTE[self.index()]
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.color())
    }
}

impl Serialize for BlockId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.color())
    }
}

impl<'de> Deserialize<'de> for BlockId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let color = String::deserialize(d)?;
        BlockId::from_color(&color).ok_or_else(|| serde::de::Error::custom(format!("unknown block color `{color}`")))
    }
}

/// What a block rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    Table,
    On(BlockId),
    Hand,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Support>", into = "Vec<Support>")]
pub struct BlocksworldState {
    support: Vec<Support>,
}

impl BlocksworldState {
    /// Builds a state from per-block supports, checking every invariant.
    pub fn new(support: Vec<Support>) -> Result<Self, InvalidTask> {
        let state = BlocksworldState { support };
        state.check()?;
        Ok(state)
    }

    /// All blocks on the table, hand empty.
    pub fn all_on_table(n_blocks: usize) -> Self {
        BlocksworldState { support: vec![Support::Table; n_blocks] }
    }

    /// Builds a hand-empty state from towers listed bottom to top.
    pub fn from_towers(n_blocks: usize, towers: &[Vec<BlockId>]) -> Result<Self, InvalidTask> {
        let mut support = vec![None; n_blocks];
        for tower in towers {
            let mut below = Support::Table;
            for &b in tower {
                let slot = support
                    .get_mut(b.index())
                    .ok_or_else(|| InvalidTask::new(format!("block {b} outside {n_blocks}-block state")))?;
                if slot.is_some() {
                    return Err(InvalidTask::new(format!("block {b} appears twice")));
                }
                *slot = Some(below);
                below = Support::On(b);
            }
        }
        let support = support
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| InvalidTask::new(format!("block {} missing", PALETTE[i]))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(support)
    }

    pub fn n_blocks(&self) -> usize {
        self.support.len()
    }

    pub fn blocks(&self) -> impl Iterator<Item = BlockId> + '_ {
        (0..self.support.len()).map(|i| BlockId(i as u8))
    }

    pub fn support(&self, b: BlockId) -> Support {
        self.support[b.index()]
    }

    pub fn supports(&self) -> &[Support] {
        &self.support
    }

    pub fn holding(&self) -> Option<BlockId> {
        self.support.iter().position(|s| *s == Support::Hand).map(|i| BlockId(i as u8))
    }

    pub fn hand_empty(&self) -> bool {
        self.holding().is_none()
    }

    pub fn on_table(&self, b: BlockId) -> bool {
        self.support(b) == Support::Table
    }

    /// No block rests on `b` and `b` is not held.
    pub fn clear(&self, b: BlockId) -> bool {
        self.support(b) != Support::Hand && !self.support.contains(&Support::On(b))
    }

    /// The `on(above, below)` relation, ordered by the upper block.
    pub fn on_pairs(&self) -> Vec<(BlockId, BlockId)> {
        self.support
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Support::On(below) => Some((BlockId(i as u8), *below)),
                _ => None,
            })
            .collect()
    }

    fn contains(&self, b: BlockId) -> bool {
        b.index() < self.support.len()
    }

    fn check(&self) -> Result<(), InvalidTask> {
        let n = self.support.len();
        if n == 0 || n > PALETTE.len() {
            return Err(InvalidTask::new(format!("block count {n} outside 1..={}", PALETTE.len())));
        }
        if self.support.iter().filter(|s| **s == Support::Hand).count() > 1 {
            return Err(InvalidTask::new("more than one block held"));
        }
        let mut seen_below = vec![false; n];
        for (i, s) in self.support.iter().enumerate() {
            if let Support::On(below) = *s {
                if below.index() >= n {
                    return Err(InvalidTask::new(format!("block {below} outside {n}-block state")));
                }
                if below.index() == i {
                    return Err(InvalidTask::new(format!("block {below} rests on itself")));
                }
                if self.support[below.index()] == Support::Hand {
                    return Err(InvalidTask::new(format!("block {below} is held but supports a block")));
                }
                if std::mem::replace(&mut seen_below[below.index()], true) {
                    return Err(InvalidTask::new(format!("two blocks rest on {below}")));
                }
            }
        }
        // Acyclic: walking down from any block reaches the table or hand in < n steps.
        for start in 0..n {
            let mut cur = self.support[start];
            let mut steps = 0;
            while let Support::On(b) = cur {
                steps += 1;
                if steps > n {
                    return Err(InvalidTask::new("support relation has a cycle"));
                }
                cur = self.support[b.index()];
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<Support>> for BlocksworldState {
    type Error = InvalidTask;

    fn try_from(support: Vec<Support>) -> Result<Self, Self::Error> {
        Self::new(support)
    }
}

impl From<BlocksworldState> for Vec<Support> {
    fn from(state: BlocksworldState) -> Self {
        state.support
    }
}

/// A partial goal: a set of `on(above, below)` atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(BlockId, BlockId)>", into = "Vec<(BlockId, BlockId)>")]
pub struct BlocksworldGoal {
    on: BTreeSet<(BlockId, BlockId)>,
}

impl BlocksworldGoal {
    pub fn new(atoms: impl IntoIterator<Item = (BlockId, BlockId)>) -> Result<Self, InvalidTask> {
        let on: BTreeSet<_> = atoms.into_iter().collect();
        if on.is_empty() {
            return Err(InvalidTask::new("goal has no atoms"));
        }
        let mut above_seen = BTreeSet::new();
        let mut below_seen = BTreeSet::new();
        for &(above, below) in &on {
            if above == below {
                return Err(InvalidTask::new(format!("goal puts {above} on itself")));
            }
            if !above_seen.insert(above) {
                return Err(InvalidTask::new(format!("goal puts {above} on two blocks")));
            }
            if !below_seen.insert(below) {
                return Err(InvalidTask::new(format!("goal puts two blocks on {below}")));
            }
        }
        // With unique "above" entries the relation is a functional graph; follow it to detect cycles.
        for &(start, _) in &on {
            let mut cur = start;
            for _ in 0..=on.len() {
                match on.iter().find(|(a, _)| *a == cur) {
                    Some(&(_, b)) if b == start => return Err(InvalidTask::new("goal relation has a cycle")),
                    Some(&(_, b)) => cur = b,
                    None => break,
                }
            }
        }
        Ok(BlocksworldGoal { on })
    }

    /// The on-relation of a hand-empty state, if it has any stacked pair.
    pub fn from_state(state: &BlocksworldState) -> Result<Self, InvalidTask> {
        Self::new(state.on_pairs())
    }

    pub fn atoms(&self) -> impl Iterator<Item = (BlockId, BlockId)> + '_ {
        self.on.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.on.len()
    }

    pub fn is_empty(&self) -> bool {
        self.on.is_empty()
    }

    pub fn max_block(&self) -> BlockId {
        self.on.iter().map(|&(a, b)| a.max(b)).max().expect("goal is non-empty")
    }
}

impl TryFrom<Vec<(BlockId, BlockId)>> for BlocksworldGoal {
    type Error = InvalidTask;

    fn try_from(atoms: Vec<(BlockId, BlockId)>) -> Result<Self, Self::Error> {
        Self::new(atoms)
    }
}

impl From<BlocksworldGoal> for Vec<(BlockId, BlockId)> {
    fn from(goal: BlocksworldGoal) -> Self {
        goal.on.into_iter().collect()
    }
}

/// Variant order is the deterministic action-kind order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum BlocksworldAction {
    PickUp { block: BlockId },
    PutDown { block: BlockId },
    Stack { block: BlockId, target: BlockId },
    Unstack { block: BlockId, from: BlockId },
}

impl BlocksworldAction {
    pub fn name(&self) -> &'static str {
        match self {
            BlocksworldAction::PickUp { .. } => "pick-up",
            BlocksworldAction::PutDown { .. } => "put-down",
            BlocksworldAction::Stack { .. } => "stack",
            BlocksworldAction::Unstack { .. } => "unstack",
        }
    }

    /// The block the hand manipulates.
    pub fn block(&self) -> BlockId {
        match *self {
            BlocksworldAction::PickUp { block }
            | BlocksworldAction::PutDown { block }
            | BlocksworldAction::Stack { block, .. }
            | BlocksworldAction::Unstack { block, .. } => block,
        }
    }
}

impl fmt::Display for BlocksworldAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlocksworldAction::PickUp { block } => write!(f, "pick-up({block})"),
            BlocksworldAction::PutDown { block } => write!(f, "put-down({block})"),
            BlocksworldAction::Stack { block, target } => write!(f, "stack({block}, {target})"),
            BlocksworldAction::Unstack { block, from } => write!(f, "unstack({block}, {from})"),
        }
    }
}

pub struct Blocksworld;

impl PlanningDomain for Blocksworld {
    type State = BlocksworldState;
    type Goal = BlocksworldGoal;
    type Action = BlocksworldAction;

    fn apply(state: &BlocksworldState, action: &BlocksworldAction) -> Result<BlocksworldState, Violation> {
        use BlocksworldAction::*;
        use ViolationReason::*;

        let fail = |reason| Err(Violation::new(action.to_string(), reason));
        for b in [Some(action.block()), other_block(action)].into_iter().flatten() {
            if !state.contains(b) {
                return fail(UnknownObject);
            }
        }
        let mut next = state.clone();
        match *action {
            PickUp { block } => {
                if !state.hand_empty() {
                    return fail(HandNotEmpty);
                }
                if !state.on_table(block) {
                    return fail(NotOnTable);
                }
                if !state.clear(block) {
                    return fail(BlockNotClear);
                }
                next.support[block.index()] = Support::Hand;
            }
            Unstack { block, from } => {
                if block == from {
                    return fail(SameObject);
                }
                if !state.hand_empty() {
                    return fail(HandNotEmpty);
                }
                if state.support(block) != Support::On(from) {
                    return fail(NotOnClaimedSupport);
                }
                if !state.clear(block) {
                    return fail(BlockNotClear);
                }
                next.support[block.index()] = Support::Hand;
            }
            PutDown { block } => {
                if state.holding() != Some(block) {
                    return fail(NotHolding);
                }
                next.support[block.index()] = Support::Table;
            }
            Stack { block, target } => {
                if block == target {
                    return fail(SameObject);
                }
                if state.holding() != Some(block) {
                    return fail(NotHolding);
                }
                if !state.clear(target) {
                    return fail(TargetNotClear);
                }
                next.support[block.index()] = Support::On(target);
            }
        }
        Ok(next)
    }

    fn applicable(state: &BlocksworldState) -> Vec<BlocksworldAction> {
        let clear: Vec<BlockId> = state.blocks().filter(|&b| state.clear(b)).collect();
        match state.holding() {
            None => {
                let mut actions: Vec<_> = clear
                    .iter()
                    .filter(|&&b| state.on_table(b))
                    .map(|&block| BlocksworldAction::PickUp { block })
                    .collect();
                actions.extend(clear.iter().filter_map(|&block| match state.support(block) {
                    Support::On(from) => Some(BlocksworldAction::Unstack { block, from }),
                    _ => None,
                }));
                actions
            }
            Some(block) => std::iter::once(BlocksworldAction::PutDown { block })
                .chain(clear.iter().map(|&target| BlocksworldAction::Stack { block, target }))
                .collect(),
        }
    }

    fn satisfies(state: &BlocksworldState, goal: &BlocksworldGoal) -> bool {
        goal.atoms().all(|(above, below)| state.contains(above) && state.support(above) == Support::On(below))
    }
}

fn other_block(action: &BlocksworldAction) -> Option<BlockId> {
    match *action {
        BlocksworldAction::Stack { target, .. } => Some(target),
        BlocksworldAction::Unstack { from, .. } => Some(from),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(color: &str) -> BlockId {
        BlockId::from_color(color).unwrap()
    }

    /// Blue on yellow on orange on red, hand empty.
    fn reference_init() -> BlocksworldState {
        BlocksworldState::from_towers(4, &[vec![b("red"), b("orange"), b("yellow"), b("blue")]]).unwrap()
    }

    #[test]
    fn unstack_top_block() {
        let next =
            Blocksworld::apply(&reference_init(), &BlocksworldAction::Unstack { block: b("blue"), from: b("yellow") })
                .unwrap();
        assert_eq!(next.holding(), Some(b("blue")));
        assert!(next.clear(b("yellow")));
        assert!(!next.clear(b("blue")));
    }

    #[test]
    fn put_down_held_block() {
        let s = BlocksworldState::new(vec![Support::Hand, Support::Table]).unwrap();
        let next = Blocksworld::apply(&s, &BlocksworldAction::PutDown { block: b("red") }).unwrap();
        assert!(next.on_table(b("red")));
        assert!(next.hand_empty());
    }

    #[test]
    fn pick_up_covered_block_fails() {
        let err = Blocksworld::apply(&reference_init(), &BlocksworldAction::PickUp { block: b("red") }).unwrap_err();
        assert_eq!(err.reason, ViolationReason::BlockNotClear);
    }

    #[test]
    fn applicable_in_reference_init() {
        assert_eq!(
            Blocksworld::applicable(&reference_init()),
            vec![BlocksworldAction::Unstack { block: b("blue"), from: b("yellow") }]
        );
    }

    #[test]
    fn applicable_all_on_table() {
        let acts = Blocksworld::applicable(&BlocksworldState::all_on_table(5));
        assert_eq!(acts.len(), 5);
        assert!(acts.iter().all(|a| matches!(a, BlocksworldAction::PickUp { .. })));
    }

    #[test]
    fn applicable_while_holding() {
        // holding red; blue on table, orange on blue, yellow on table
        let s =
            BlocksworldState::new(vec![Support::Hand, Support::Table, Support::On(b("blue")), Support::Table]).unwrap();
        assert_eq!(
            Blocksworld::applicable(&s),
            vec![
                BlocksworldAction::PutDown { block: b("red") },
                BlocksworldAction::Stack { block: b("red"), target: b("orange") },
                BlocksworldAction::Stack { block: b("red"), target: b("yellow") },
            ]
        );
    }

    #[test]
    fn rejects_malformed_states() {
        assert!(BlocksworldState::new(vec![Support::Hand, Support::Hand]).is_err());
        assert!(BlocksworldState::new(vec![Support::On(b("blue")), Support::On(b("red"))]).is_err());
        assert!(BlocksworldState::new(vec![Support::On(b("red"))]).is_err());
        assert!(BlocksworldState::new(vec![Support::Table, Support::On(b("red")), Support::On(b("red"))]).is_err());
        assert!(BlocksworldState::new(vec![Support::On(b("blue")), Support::Hand]).is_err());
    }

    #[test]
    fn rejects_malformed_goals() {
        assert!(BlocksworldGoal::new([]).is_err());
        assert!(BlocksworldGoal::new([(b("red"), b("blue")), (b("red"), b("orange"))]).is_err());
        assert!(BlocksworldGoal::new([(b("red"), b("blue")), (b("blue"), b("red"))]).is_err());
        assert!(BlocksworldGoal::new([(b("red"), b("red"))]).is_err());
    }

    #[test]
    fn goal_check_is_partial() {
        let goal = BlocksworldGoal::new([(b("orange"), b("red"))]).unwrap();
        assert!(Blocksworld::satisfies(&reference_init(), &goal));
        let goal = BlocksworldGoal::new([(b("red"), b("blue"))]).unwrap();
        assert!(!Blocksworld::satisfies(&reference_init(), &goal));
    }

    #[test]
    fn state_serializes_as_support_list() {
        let json = serde_json::to_string(&reference_init()).unwrap();
        assert_eq!(json, r#"["table",{"on":"yellow"},{"on":"red"},{"on":"orange"}]"#);
        let back: BlocksworldState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, reference_init());
        assert!(serde_json::from_str::<BlocksworldState>(r#"[{"on":"blue"},{"on":"red"}]"#).is_err());
    }
}

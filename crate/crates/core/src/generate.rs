//! Seeded, de-duplicated task corpora for both domains, plus the corpus
//! transformations used by experiments: holdout split, cluster-based
//! imbalancing and mixed-domain composition.

use std::collections::{BTreeSet, HashSet};

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    BlockId, BlocksworldGoal, BlocksworldState, DomainKind, Location, LogisticsGoal, LogisticsState, LogisticsTopology,
    PackageId, PackagePosition, TaskInstance, PALETTE,
};
use crate::select::{kmeans, KMeansParams};

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("requested {requested} distinct tasks but only {available} exist for this setting")]
    Exhausted { requested: usize, available: u128 },
    #[error("found only {found} of {requested} distinct tasks within {draws} draws")]
    BudgetExhausted { requested: usize, found: usize, draws: usize },
    #[error("invalid generation spec: {0}")]
    Spec(String),
}

/// Inclusive integer range `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub lo: u8,
    pub hi: u8,
}

impl Span {
    pub const fn new(lo: u8, hi: u8) -> Self {
        Span { lo, hi }
    }

    fn sample(self, rng: &mut impl Rng) -> u8 {
        rng.gen_range(self.lo..=self.hi)
    }

    fn values(self) -> impl Iterator<Item = u8> {
        self.lo..=self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogisticsRanges {
    pub cities: Span,
    pub locations: Span,
    pub airplanes: Span,
    pub packages: Span,
}

impl Default for LogisticsRanges {
    fn default() -> Self {
        LogisticsRanges {
            cities: Span::new(2, 2),
            locations: Span::new(2, 3),
            airplanes: Span::new(1, 2),
            packages: Span::new(1, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub domain: DomainKind,
    pub count: usize,
    pub seed: u64,
    #[serde(default = "default_blocks")]
    pub n_blocks: usize,
    #[serde(default)]
    pub logistics: LogisticsRanges,
}

fn default_blocks() -> usize {
    4
}

impl GenSpec {
    pub fn blocksworld(n_blocks: usize, count: usize, seed: u64) -> Self {
        GenSpec { domain: DomainKind::Blocksworld, count, seed, n_blocks, logistics: LogisticsRanges::default() }
    }

    pub fn logistics(ranges: LogisticsRanges, count: usize, seed: u64) -> Self {
        GenSpec { domain: DomainKind::Logistics, count, seed, n_blocks: default_blocks(), logistics: ranges }
    }
}

pub fn generate(spec: &GenSpec) -> Result<Vec<TaskInstance>, GenError> {
    match spec.domain {
        DomainKind::Blocksworld => gen_blocksworld(spec),
        DomainKind::Logistics => gen_logistics(spec),
    }
}

/// Number of ways to arrange `n` labeled blocks into `k` unordered towers: n!/k! * C(n-1, k-1).
fn tower_partitions(n: usize, k: usize) -> u128 {
    let fact = |m: usize| (1..=m as u128).product::<u128>();
    let binom = |a: usize, b: usize| fact(a) / (fact(b) * fact(a - b));
    fact(n) / fact(k) * binom(n - 1, k - 1)
}

/// Total number of complete (hand-empty) states with `n` blocks.
pub fn count_blocksworld_states(n: usize) -> u128 {
    (1..=n).map(|k| tower_partitions(n, k)).sum()
}

/// Uniform sample over hand-empty arrangements of `n_blocks` blocks.
///
/// Draws the tower count with probability proportional to the number of
/// arrangements having that many towers, then a uniform permutation cut at
/// uniformly chosen gaps. Each arrangement with `k` towers arises from exactly
/// `k!` of the equally likely (permutation, cut set) outcomes.
pub fn random_complete_blocksworld_state(n_blocks: usize, rng: &mut impl Rng) -> BlocksworldState {
    assert!((1..=PALETTE.len()).contains(&n_blocks), "block count outside palette");
    let total = count_blocksworld_states(n_blocks);
    let mut ticket = rng.gen_range(0..total);
    let mut k = 1;
    loop {
        let w = tower_partitions(n_blocks, k);
        if ticket < w {
            break;
        }
        ticket -= w;
        k += 1;
    }
    let mut order: Vec<BlockId> = (0..n_blocks).map(|i| BlockId::new(i).unwrap()).collect();
    order.shuffle(rng);
    let mut cuts: Vec<usize> = index::sample(rng, n_blocks - 1, k - 1).into_vec();
    cuts.sort_unstable();
    let mut towers = Vec::with_capacity(k);
    let mut start = 0;
    for cut in cuts.into_iter().map(|c| c + 1).chain(std::iter::once(n_blocks)) {
        towers.push(order[start..cut].to_vec());
        start = cut;
    }
    BlocksworldState::from_towers(n_blocks, &towers).expect("towers partition the blocks")
}

/// Every hand-empty arrangement of `n_blocks` blocks, in sorted order.
pub fn enumerate_blocksworld_states(n_blocks: usize) -> Vec<BlocksworldState> {
    // Insert blocks one at a time: as a new tower or into any gap of any tower.
    let mut arrangements: Vec<Vec<Vec<BlockId>>> = vec![vec![]];
    for i in 0..n_blocks {
        let block = BlockId::new(i).unwrap();
        let mut next = Vec::new();
        for towers in &arrangements {
            let mut fresh = towers.clone();
            fresh.push(vec![block]);
            next.push(fresh);
            for t in 0..towers.len() {
                for pos in 0..=towers[t].len() {
                    let mut placed = towers.clone();
                    placed[t].insert(pos, block);
                    next.push(placed);
                }
            }
        }
        arrangements = next;
    }
    let states: BTreeSet<_> =
        arrangements.iter().map(|towers| BlocksworldState::from_towers(n_blocks, towers).unwrap()).collect();
    states.into_iter().collect()
}

/// Exact number of distinct Blocksworld tasks the generator can produce.
pub fn blocksworld_task_space(n_blocks: usize) -> u128 {
    let states = enumerate_blocksworld_states(n_blocks);
    let on_sets: Vec<BTreeSet<_>> = states.iter().map(|s| s.on_pairs().into_iter().collect()).collect();
    let goals: Vec<&BTreeSet<_>> = on_sets.iter().filter(|g| !g.is_empty()).collect();
    on_sets.iter().map(|init| goals.iter().filter(|g| !g.is_subset(init)).count() as u128).sum()
}

/// Exact number of distinct Logistics tasks reachable from `ranges`.
pub fn logistics_task_space(ranges: &LogisticsRanges) -> u128 {
    let mut total = 0u128;
    for c in ranges.cities.values() {
        for l in ranges.locations.values() {
            for a in ranges.airplanes.values() {
                for p in ranges.packages.values() {
                    let locs = (c as u128) * (l as u128);
                    let placements = (l as u128).pow(c as u32) * (c as u128).pow(a as u32);
                    let packages = locs.pow(p as u32);
                    total += placements * packages * (packages - 1);
                }
            }
        }
    }
    total
}

fn draw_budget(count: usize) -> usize {
    (count * 200).max(200_000)
}

pub fn gen_blocksworld(spec: &GenSpec) -> Result<Vec<TaskInstance>, GenError> {
    let n = spec.n_blocks;
    if !(2..=PALETTE.len()).contains(&n) {
        return Err(GenError::Spec(format!("n_blocks must be in [2, {}], got {n}", PALETTE.len())));
    }
    if n <= 4 {
        let available = blocksworld_task_space(n);
        if spec.count as u128 > available {
            return Err(GenError::Exhausted { requested: spec.count, available });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    collect_distinct(spec.count, || {
        let init = random_complete_blocksworld_state(n, &mut rng);
        let goal_state = random_complete_blocksworld_state(n, &mut rng);
        let goal = BlocksworldGoal::from_state(&goal_state).ok()?;
        TaskInstance::blocksworld(init, goal).ok()
    })
}

pub fn gen_logistics(spec: &GenSpec) -> Result<Vec<TaskInstance>, GenError> {
    let r = spec.logistics;
    for (name, span) in
        [("cities", r.cities), ("locations", r.locations), ("airplanes", r.airplanes), ("packages", r.packages)]
    {
        if span.lo > span.hi || (span.lo == 0 && name != "airplanes") {
            return Err(GenError::Spec(format!("bad {name} range [{}, {}]", span.lo, span.hi)));
        }
    }
    let available = logistics_task_space(&r);
    if spec.count as u128 > available {
        return Err(GenError::Exhausted { requested: spec.count, available });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    collect_distinct(spec.count, || {
        let topo = LogisticsTopology::new(
            r.cities.sample(&mut rng),
            r.locations.sample(&mut rng),
            r.airplanes.sample(&mut rng),
        )
        .ok()?;
        let n_packages = r.packages.sample(&mut rng);
        let trucks = (0..topo.n_cities).map(|_| rng.gen_range(0..topo.locations_per_city)).collect();
        let airplanes = (0..topo.n_airplanes).map(|_| rng.gen_range(0..topo.n_cities)).collect();
        let random_location = |rng: &mut ChaCha8Rng| {
            Location::new(rng.gen_range(0..topo.n_cities), rng.gen_range(0..topo.locations_per_city))
        };
        let packages = (0..n_packages).map(|_| PackagePosition::At(random_location(&mut rng))).collect();
        let goal = LogisticsGoal::new((0..n_packages).map(|p| (PackageId(p), random_location(&mut rng)))).ok()?;
        let init = LogisticsState::new(topo, packages, trucks, airplanes).ok()?;
        TaskInstance::logistics(init, goal).ok()
    })
}

fn collect_distinct(
    count: usize,
    mut draw: impl FnMut() -> Option<TaskInstance>,
) -> Result<Vec<TaskInstance>, GenError> {
    let budget = draw_budget(count);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        if draws == budget {
            return Err(GenError::BudgetExhausted { requested: count, found: out.len(), draws });
        }
        draws += 1;
        if let Some(task) = draw() {
            if seen.insert(task.id().to_owned()) {
                out.push(task);
            }
        }
    }
    Ok(out)
}

/// Uniformly holds out `n_test` tasks; both halves keep corpus order.
pub fn split_holdout(
    corpus: &[TaskInstance],
    n_test: usize,
    seed: u64,
) -> Result<(Vec<TaskInstance>, Vec<TaskInstance>), GenError> {
    if n_test > corpus.len() {
        return Err(GenError::Spec(format!("cannot hold out {n_test} of {} tasks", corpus.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut is_test = vec![false; corpus.len()];
    for i in index::sample(&mut rng, corpus.len(), n_test) {
        is_test[i] = true;
    }
    let (test, train): (Vec<_>, Vec<_>) = corpus.iter().cloned().zip(is_test).partition(|(_, t)| *t);
    Ok((train.into_iter().map(|(t, _)| t).collect(), test.into_iter().map(|(t, _)| t).collect()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceSpec {
    /// Fraction of clusters to deplete.
    pub p: f64,
    pub j_min: usize,
    pub j_max: usize,
    pub n_clusters: usize,
    pub seed: u64,
}

impl Default for ImbalanceSpec {
    fn default() -> Self {
        ImbalanceSpec { p: 0.5, j_min: 1, j_max: 5, n_clusters: 100, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepletedCluster {
    pub cluster: usize,
    pub original_size: usize,
    pub retained: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImbalanceOutcome {
    /// Surviving tasks in original corpus order.
    pub tasks: Vec<TaskInstance>,
    /// Cluster of every input task.
    pub assignment: Vec<usize>,
    pub depleted: Vec<DepletedCluster>,
}

/// Clusters the corpus, then shrinks a `p` fraction of clusters to `j` random members each.
pub fn make_imbalanced(
    corpus: &[TaskInstance],
    encodings: &[Vec<f64>],
    spec: &ImbalanceSpec,
) -> Result<ImbalanceOutcome, GenError> {
    if encodings.len() != corpus.len() {
        return Err(GenError::Spec("encodings are not aligned with the corpus".into()));
    }
    if !(0.0..=1.0).contains(&spec.p) {
        return Err(GenError::Spec(format!("p must be in [0, 1], got {}", spec.p)));
    }
    if spec.j_min < 1 || spec.j_min > spec.j_max {
        return Err(GenError::Spec(format!("bad retention range [{}, {}]", spec.j_min, spec.j_max)));
    }
    if spec.n_clusters == 0 || spec.n_clusters > corpus.len() {
        return Err(GenError::Spec(format!(
            "n_clusters {} must be in [1, corpus size {}]",
            spec.n_clusters,
            corpus.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let params = KMeansParams { seed: rng.gen(), ..KMeansParams::default() };
    let clustering = kmeans(encodings, spec.n_clusters, &params);

    let mut members = vec![Vec::new(); spec.n_clusters];
    for (i, &c) in clustering.assignment.iter().enumerate() {
        members[c].push(i);
    }
    let n_depleted = (spec.p * spec.n_clusters as f64 - 1e-9).ceil().max(0.0) as usize;
    let mut chosen = index::sample(&mut rng, spec.n_clusters, n_depleted).into_vec();
    chosen.sort_unstable();

    let mut keep = vec![true; corpus.len()];
    let mut depleted = Vec::with_capacity(n_depleted);
    for cluster in chosen {
        let group = &members[cluster];
        let j = rng.gen_range(spec.j_min..=spec.j_max).min(group.len());
        let retained: HashSet<usize> = index::sample(&mut rng, group.len(), j).into_iter().collect();
        for (pos, &i) in group.iter().enumerate() {
            keep[i] = retained.contains(&pos);
        }
        depleted.push(DepletedCluster { cluster, original_size: group.len(), retained: j });
    }
    let tasks = corpus.iter().zip(&keep).filter(|(_, k)| **k).map(|(t, _)| t.clone()).collect();
    Ok(ImbalanceOutcome { tasks, assignment: clustering.assignment, depleted })
}

/// `k` uniform samples from each corpus, concatenated and shuffled.
pub fn mix_corpora(a: &[TaskInstance], b: &[TaskInstance], k: usize, seed: u64) -> Result<Vec<TaskInstance>, GenError> {
    if k > a.len() || k > b.len() {
        return Err(GenError::Spec(format!("k = {k} exceeds a corpus of size {}", a.len().min(b.len()))));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mixed: Vec<TaskInstance> = index::sample(&mut rng, a.len(), k).into_iter().map(|i| a[i].clone()).collect();
    mixed.extend(index::sample(&mut rng, b.len(), k).into_iter().map(|i| b[i].clone()));
    mixed.shuffle(&mut rng);
    Ok(mixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn closed_form_state_counts() {
        let counts: Vec<u128> = (1..=6).map(count_blocksworld_states).collect();
        assert_eq!(counts, vec![1, 3, 13, 73, 501, 4051]);
        for n in 1..=6 {
            assert_eq!(enumerate_blocksworld_states(n).len() as u128, count_blocksworld_states(n));
        }
    }

    #[test]
    fn single_block_sampler_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(random_complete_blocksworld_state(1, &mut rng), BlocksworldState::all_on_table(1));
        }
    }

    #[test]
    fn sampler_hits_every_three_block_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut seen = HashMap::new();
        for _ in 0..5000 {
            *seen.entry(random_complete_blocksworld_state(3, &mut rng)).or_insert(0) += 1;
        }
        assert_eq!(seen.len(), 13);
    }

    #[test]
    fn three_block_space_and_exhaustion() {
        assert_eq!(blocksworld_task_space(3), 132);
        assert_eq!(blocksworld_task_space(4), 4968);
        let all = gen_blocksworld(&GenSpec::blocksworld(3, 132, 9)).unwrap();
        assert_eq!(all.iter().map(|t| t.id()).collect::<HashSet<_>>().len(), 132);
        assert_eq!(
            gen_blocksworld(&GenSpec::blocksworld(3, 133, 9)).unwrap_err(),
            GenError::Exhausted { requested: 133, available: 132 }
        );
    }

    #[test]
    fn generation_is_seeded() {
        let a = gen_blocksworld(&GenSpec::blocksworld(5, 50, 3)).unwrap();
        let b = gen_blocksworld(&GenSpec::blocksworld(5, 50, 3)).unwrap();
        let c = gen_blocksworld(&GenSpec::blocksworld(5, 50, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_block_counts_outside_palette() {
        assert!(matches!(gen_blocksworld(&GenSpec::blocksworld(1, 1, 0)), Err(GenError::Spec(_))));
        assert!(matches!(gen_blocksworld(&GenSpec::blocksworld(9, 1, 0)), Err(GenError::Spec(_))));
    }

    #[test]
    fn logistics_defaults() {
        let tasks = gen_logistics(&GenSpec::logistics(LogisticsRanges::default(), 300, 5)).unwrap();
        assert_eq!(tasks.len(), 300);
        for t in &tasks {
            let crate::TaskMeta::Logistics { n_cities, n_locations, n_airplanes, n_packages } = t.meta() else {
                panic!("wrong domain")
            };
            assert_eq!(n_cities, 2);
            assert!((2..=3).contains(&n_locations));
            assert!((1..=2).contains(&n_airplanes));
            assert!((1..=2).contains(&n_packages));
        }
    }

    #[test]
    fn logistics_space_matches_enumeration_for_one_setting() {
        // 2 cities x 2 locations, 1 airplane, 1 package: 4 truck placements, 2 airplane
        // placements, 4 package locations, 3 destinations that differ.
        let r = LogisticsRanges {
            cities: Span::new(2, 2),
            locations: Span::new(2, 2),
            airplanes: Span::new(1, 1),
            packages: Span::new(1, 1),
        };
        assert_eq!(logistics_task_space(&r), 96);
        let all = gen_logistics(&GenSpec::logistics(r, 96, 1)).unwrap();
        assert_eq!(all.len(), 96);
        assert!(gen_logistics(&GenSpec::logistics(r, 97, 1)).is_err());
    }

    #[test]
    fn holdout_is_disjoint() {
        let tasks = gen_blocksworld(&GenSpec::blocksworld(4, 200, 1)).unwrap();
        let (train, test) = split_holdout(&tasks, 30, 7).unwrap();
        assert_eq!((train.len(), test.len()), (170, 30));
        let train_ids: HashSet<_> = train.iter().map(|t| t.id()).collect();
        assert!(test.iter().all(|t| !train_ids.contains(t.id())));
    }

    #[test]
    fn mix_sizes() {
        let a = gen_blocksworld(&GenSpec::blocksworld(4, 120, 1)).unwrap();
        let b = gen_logistics(&GenSpec::logistics(LogisticsRanges::default(), 120, 1)).unwrap();
        let mixed = mix_corpora(&a, &b, 100, 3).unwrap();
        assert_eq!(mixed.len(), 200);
        assert_eq!(mixed.iter().filter(|t| t.domain() == DomainKind::Blocksworld).count(), 100);
        assert!(mix_corpora(&a, &b, 0, 3).unwrap().is_empty());
        assert!(mix_corpora(&a, &b, 121, 3).is_err());
    }
}

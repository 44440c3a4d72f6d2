//! Task embeddings and the distances CMDS clusters with.
//!
//! The graph encoding treats objects as nodes and predicates as directed
//! edges. Each configuration (initial state, goal) becomes one indicator per
//! possible edge; the two halves are concatenated. When a corpus mixes task
//! sizes every slot is shifted by one so that 0 marks an edge whose endpoint
//! does not exist, 1 an absent edge and 2 a present edge.

use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{PackagePosition, Problem, TaskInstance, TaskMeta};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("task {id} has size {size:?}, larger than the layout {pad:?}")]
    Size { id: String, size: PadSize, pad: PadSize },
    #[error("layouts differ: {0}")]
    LayoutMismatch(String),
    #[error("corpus mixes domains")]
    MixedDomains,
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: String },
    #[error("id {0} is not part of the corpus")]
    UnknownId(String),
    #[error("line {line}: expected dimension {expected}, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Object counts a layout reserves slots for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PadSize {
    Blocks(usize),
    Logistics { cities: usize, locations: usize, airplanes: usize, packages: usize },
}

impl PadSize {
    fn of(task: &TaskInstance) -> PadSize {
        match task.meta() {
            TaskMeta::Blocksworld { n_blocks } => PadSize::Blocks(n_blocks),
            TaskMeta::Logistics { n_cities, n_locations, n_airplanes, n_packages } => PadSize::Logistics {
                cities: n_cities,
                locations: n_locations,
                airplanes: n_airplanes,
                packages: n_packages,
            },
        }
    }

    fn fits_in(&self, pad: &PadSize) -> bool {
        match (self, pad) {
            (PadSize::Blocks(a), PadSize::Blocks(b)) => a <= b,
            (
                PadSize::Logistics { cities, locations, airplanes, packages },
                PadSize::Logistics { cities: c, locations: l, airplanes: a, packages: p },
            ) => cities <= c && locations <= l && airplanes <= a && packages <= p,
            _ => false,
        }
    }

    fn max(self, other: PadSize) -> Option<PadSize> {
        match (self, other) {
            (PadSize::Blocks(a), PadSize::Blocks(b)) => Some(PadSize::Blocks(a.max(b))),
            (
                PadSize::Logistics { cities, locations, airplanes, packages },
                PadSize::Logistics { cities: c, locations: l, airplanes: a, packages: p },
            ) => Some(PadSize::Logistics {
                cities: cities.max(c),
                locations: locations.max(l),
                airplanes: airplanes.max(a),
                packages: packages.max(p),
            }),
            _ => None,
        }
    }
}

/// Slot layout shared by every encoding in a corpus.
///
/// Blocksworld, per half: one slot per ordered pair `(i, j)`, `i != j`,
/// row-major over `i`, meaning `on(i, j)`.
///
/// Logistics, per half, in order: package x position (locations city-major,
/// then trucks, then airplanes); truck x location of its own city;
/// airplane x city airport. The goal half only ever marks package edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphLayout {
    pub pad: PadSize,
    pub shifted: bool,
}

impl GraphLayout {
    pub fn new(pad: PadSize, shifted: bool) -> Self {
        GraphLayout { pad, shifted }
    }

    /// Pads to the largest task; shifts only when sizes differ.
    pub fn for_corpus(tasks: &[TaskInstance]) -> Result<Self, EmbedError> {
        let mut sizes = tasks.iter().map(PadSize::of);
        let first = sizes.next().ok_or_else(|| EmbedError::LayoutMismatch("empty corpus".into()))?;
        let mut pad = first;
        let mut mixed = false;
        for s in sizes {
            mixed |= s != first;
            pad = pad.max(s).ok_or(EmbedError::MixedDomains)?;
        }
        Ok(GraphLayout { pad, shifted: mixed })
    }

    pub fn half_len(&self) -> usize {
        match self.pad {
            PadSize::Blocks(n) => n * n.saturating_sub(1),
            PadSize::Logistics { cities, locations, airplanes, packages } => {
                let positions = cities * locations + cities + airplanes;
                packages * positions + cities * locations + airplanes * cities
            }
        }
    }

    pub fn len(&self) -> usize {
        2 * self.half_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphEncoding {
    pub values: Vec<u8>,
    pub layout: GraphLayout,
}

impl GraphEncoding {
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }
}

/// Slot-filling helper: `exists` marks slots whose endpoints are present in the task.
struct HalfWriter<'a> {
    out: &'a mut Vec<u8>,
    shifted: bool,
}

impl HalfWriter<'_> {
    fn push(&mut self, exists: bool, edge: bool) {
        let v = match (self.shifted, exists) {
            (true, false) => 0,
            (true, true) => 1 + edge as u8,
            (false, _) => edge as u8,
        };
        self.out.push(v);
    }
}

pub fn encode_graph(task: &TaskInstance, layout: &GraphLayout) -> Result<GraphEncoding, EmbedError> {
    let size = PadSize::of(task);
    if !size.fits_in(&layout.pad) {
        return Err(EmbedError::Size { id: task.id().to_owned(), size, pad: layout.pad });
    }
    let mut values = Vec::with_capacity(layout.len());
    let mut w = HalfWriter { out: &mut values, shifted: layout.shifted };
    match (task.problem(), layout.pad) {
        (Problem::Blocksworld { init, goal }, PadSize::Blocks(pad)) => {
            let n = init.n_blocks();
            let mut init_edges = vec![false; pad * pad];
            for (a, b) in init.on_pairs() {
                init_edges[a.index() * pad + b.index()] = true;
            }
            let mut goal_edges = vec![false; pad * pad];
            for (a, b) in goal.atoms() {
                goal_edges[a.index() * pad + b.index()] = true;
            }
            for edges in [&init_edges, &goal_edges] {
                for i in 0..pad {
                    for j in (0..pad).filter(|&j| j != i) {
                        w.push(i < n && j < n, edges[i * pad + j]);
                    }
                }
            }
        }
        (Problem::Logistics { init, goal }, PadSize::Logistics { cities, locations, airplanes, packages }) => {
            let topo = init.topology();
            let (tc, tl, ta, tp) = (
                topo.n_cities as usize,
                topo.locations_per_city as usize,
                topo.n_airplanes as usize,
                init.n_packages(),
            );
            let mut goal_at = vec![None; tp];
            for &(p, loc) in goal.destinations() {
                goal_at[p.0 as usize] = Some(PackagePosition::At(loc));
            }
            let init_at: Vec<Option<PackagePosition>> = init.packages().iter().copied().map(Some).collect();
            for (half, package_pos) in [(0, &init_at), (1, &goal_at)] {
                for p in 0..packages {
                    let pos = package_pos.get(p).copied().flatten();
                    for c in 0..cities {
                        for l in 0..locations {
                            let edge = matches!(pos, Some(PackagePosition::At(loc)) if loc.city as usize == c && loc.index as usize == l);
                            w.push(p < tp && c < tc && l < tl, edge);
                        }
                    }
                    for c in 0..cities {
                        let edge = matches!(pos, Some(PackagePosition::InTruck(t)) if t.0 as usize == c);
                        w.push(p < tp && c < tc, edge);
                    }
                    for a in 0..airplanes {
                        let edge = matches!(pos, Some(PackagePosition::InAirplane(x)) if x.0 as usize == a);
                        w.push(p < tp && a < ta, edge);
                    }
                }
                for c in 0..cities {
                    for l in 0..locations {
                        let edge =
                            half == 0 && c < tc && init.truck_at(crate::domain::TruckId(c as u8)).index as usize == l;
                        w.push(c < tc && l < tl, edge);
                    }
                }
                for a in 0..airplanes {
                    for c in 0..cities {
                        let edge = half == 0
                            && a < ta
                            && init.airplane_at(crate::domain::AirplaneId(a as u8)).city as usize == c;
                        w.push(a < ta && c < tc, edge);
                    }
                }
            }
        }
        _ => return Err(EmbedError::LayoutMismatch(format!("{} task vs {:?} layout", task.domain(), layout.pad))),
    }
    debug_assert_eq!(values.len(), layout.len());
    Ok(GraphEncoding { values, layout: *layout })
}

/// Number of slots whose values differ.
pub fn edit_distance(a: &GraphEncoding, b: &GraphEncoding) -> Result<usize, EmbedError> {
    if a.layout != b.layout {
        return Err(EmbedError::LayoutMismatch(format!("{:?} vs {:?}", a.layout, b.layout)));
    }
    Ok(a.values.iter().zip(&b.values).filter(|(x, y)| x != y).count())
}

pub fn l2_distance(a: &[f64], b: &[f64]) -> Result<f64, EmbedError> {
    if a.len() != b.len() {
        return Err(EmbedError::LayoutMismatch(format!("lengths {} vs {}", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Count of differing coordinates.
    Edit,
    L2,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Edit => a.iter().zip(b).filter(|(x, y)| x != y).count() as f64,
            Metric::L2 => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSet {
    ids: Vec<String>,
    vectors: Vec<Vec<f64>>,
    metric: Metric,
}

impl EmbeddingSet {
    pub fn new(ids: Vec<String>, vectors: Vec<Vec<f64>>, metric: Metric) -> Result<Self, EmbedError> {
        if ids.len() != vectors.len() {
            return Err(EmbedError::LayoutMismatch(format!("{} ids for {} vectors", ids.len(), vectors.len())));
        }
        let mut seen = HashSet::new();
        for (line, id) in ids.iter().enumerate() {
            if !seen.insert(id) {
                return Err(EmbedError::DuplicateId { line: line + 1, id: id.clone() });
            }
        }
        if let Some(first) = vectors.first() {
            if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != first.len()) {
                return Err(EmbedError::DimensionMismatch { line: i + 1, expected: first.len(), found: v.len() });
            }
        }
        Ok(EmbeddingSet { ids, vectors, metric })
    }

    /// Graph encodings of a single-domain corpus under the edit metric.
    pub fn from_tasks(tasks: &[TaskInstance]) -> Result<(Self, GraphLayout), EmbedError> {
        let layout = GraphLayout::for_corpus(tasks)?;
        let vectors =
            tasks.iter().map(|t| encode_graph(t, &layout).map(|e| e.to_f64())).collect::<Result<Vec<_>, _>>()?;
        let ids = tasks.iter().map(|t| t.id().to_owned()).collect();
        Ok((EmbeddingSet::new(ids, vectors, Metric::Edit)?, layout))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.metric.distance(&self.vectors[i], &self.vectors[j])
    }

    /// Reorders (and checks) the set to follow `ids`.
    pub fn aligned_to(&self, ids: &[String]) -> Result<Self, EmbedError> {
        let index: BTreeMap<&str, usize> = self.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let vectors = ids
            .iter()
            .map(|id| {
                index
                    .get(id.as_str())
                    .map(|&i| self.vectors[i].clone())
                    .ok_or_else(|| EmbedError::UnknownId(id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        EmbeddingSet::new(ids.to_vec(), vectors, self.metric)
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { self.distance(i.min(j), i.max(j)) }).collect())
            .collect();
        DistanceMatrix { n, data: rows.concat() }
    }

    /// Writes one `{"id": ..., "vector": [...]}` record per line.
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<(), EmbedError> {
        for (id, v) in self.ids.iter().zip(&self.vectors) {
            let line = serde_json::to_string(&EmbeddingRecord { id: id.clone(), vector: v.clone() })
                .expect("records serialize");
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn read_jsonl(r: impl BufRead, metric: Metric) -> Result<Self, EmbedError> {
        let mut ids = Vec::new();
        let mut vectors: Vec<Vec<f64>> = Vec::new();
        let mut seen = HashSet::new();
        for (i, line) in r.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: EmbeddingRecord =
                serde_json::from_str(&line).map_err(|e| EmbedError::Format { line: line_no, msg: e.to_string() })?;
            if !seen.insert(rec.id.clone()) {
                return Err(EmbedError::DuplicateId { line: line_no, id: rec.id });
            }
            if let Some(first) = vectors.first() {
                if first.len() != rec.vector.len() {
                    return Err(EmbedError::DimensionMismatch {
                        line: line_no,
                        expected: first.len(),
                        found: rec.vector.len(),
                    });
                }
            }
            ids.push(rec.id);
            vectors.push(rec.vector);
        }
        Ok(EmbeddingSet { ids, vectors, metric })
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbeddingRecord {
    id: String,
    vector: Vec<f64>,
}

/// Loads externally produced embeddings (L2 metric), optionally checking that
/// every id belongs to `corpus_ids`.
pub fn load_external_embeddings(
    path: &std::path::Path,
    corpus_ids: Option<&[String]>,
) -> Result<EmbeddingSet, EmbedError> {
    let file = std::fs::File::open(path)?;
    let set = EmbeddingSet::read_jsonl(std::io::BufReader::new(file), Metric::L2)?;
    if let Some(corpus) = corpus_ids {
        let known: HashSet<&str> = corpus.iter().map(String::as_str).collect();
        if let Some(id) = set.ids.iter().find(|id| !known.contains(id.as_str())) {
            return Err(EmbedError::UnknownId(id.clone()));
        }
    }
    Ok(set)
}

/// Symmetric, zero-diagonal, row-major distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from the upper triangle of `f`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        DistanceMatrix { n: self.n, data: self.data.iter().map(|d| d * factor).collect() }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_')).filter(|t| !t.is_empty()).map(str::to_lowercase).collect()
}

/// Word 1- to 3-gram TF-IDF vectors (smoothed idf, unit L2 norm).
///
/// Offline fallback for language embeddings. Unigrams alone cannot tell apart
/// two statements that only swap which block sits on which, so short n-grams
/// are included.
pub fn tfidf_embed(docs: &[(String, String)]) -> Result<EmbeddingSet, EmbedError> {
    let term_counts: Vec<BTreeMap<String, f64>> = docs
        .iter()
        .map(|(_, text)| {
            let tokens = tokenize(text);
            let mut counts = BTreeMap::new();
            for n in 1..=3 {
                for gram in tokens.windows(n) {
                    *counts.entry(gram.join(" ")).or_insert(0.0) += 1.0;
                }
            }
            counts
        })
        .collect();
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for counts in &term_counts {
        for term in counts.keys() {
            *df.entry(term.as_str()).or_insert(0) += 1;
        }
    }
    let vocab: BTreeMap<&str, usize> = df.keys().enumerate().map(|(i, t)| (*t, i)).collect();
    let n_docs = docs.len() as f64;
    let vectors = term_counts
        .iter()
        .map(|counts| {
            let total: f64 = counts.values().sum();
            let mut v = vec![0.0; vocab.len()];
            for (term, c) in counts {
                let idf = ((1.0 + n_docs) / (1.0 + df[term.as_str()] as f64)).ln() + 1.0;
                v[vocab[term.as_str()]] = c / total * idf;
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
            }
            v
        })
        .collect();
    EmbeddingSet::new(docs.iter().map(|(id, _)| id.clone()).collect(), vectors, Metric::L2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BlockId, BlocksworldGoal, BlocksworldState};

    fn b(c: &str) -> BlockId {
        BlockId::from_color(c).unwrap()
    }

    fn task(n: usize, init: &[Vec<&str>], goal: &[(&str, &str)]) -> TaskInstance {
        let towers: Vec<Vec<BlockId>> = init.iter().map(|t| t.iter().map(|c| b(c)).collect()).collect();
        TaskInstance::blocksworld(
            BlocksworldState::from_towers(n, &towers).unwrap(),
            BlocksworldGoal::new(goal.iter().map(|(a, c)| (b(a), b(c)))).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn padding_marks_missing_blocks() {
        let t = task(3, &[vec!["red", "blue"], vec!["orange"]], &[("red", "orange")]);
        let layout = GraphLayout::new(PadSize::Blocks(5), true);
        let enc = encode_graph(&t, &layout).unwrap();
        assert_eq!(enc.values.len(), 40);
        let mut k = 0;
        for half in 0..2 {
            for i in 0..5 {
                for j in (0..5).filter(|&j| j != i) {
                    let v = enc.values[k];
                    if i >= 3 || j >= 3 {
                        assert_eq!(v, 0);
                    } else {
                        let edge = if half == 0 { (i, j) == (1, 0) } else { (i, j) == (0, 2) };
                        assert_eq!(v, if edge { 2 } else { 1 }, "slot {k}");
                    }
                    k += 1;
                }
            }
        }
    }

    #[test]
    fn oversized_task_is_rejected() {
        let t = task(3, &[vec!["red", "blue", "orange"]], &[("red", "orange")]);
        let layout = GraphLayout::new(PadSize::Blocks(2), false);
        assert!(matches!(encode_graph(&t, &layout), Err(EmbedError::Size { .. })));
    }

    #[test]
    fn corpus_layout_shifts_only_for_mixed_sizes() {
        let a = task(2, &[vec!["red", "blue"]], &[("red", "blue")]);
        let b2 = task(2, &[vec!["blue", "red"]], &[("blue", "red")]);
        let c = task(3, &[vec!["red", "blue"], vec!["orange"]], &[("red", "orange")]);
        assert_eq!(
            GraphLayout::for_corpus(&[a.clone(), b2.clone()]).unwrap(),
            GraphLayout::new(PadSize::Blocks(2), false)
        );
        assert_eq!(GraphLayout::for_corpus(&[a, c]).unwrap(), GraphLayout::new(PadSize::Blocks(3), true));
    }

    #[test]
    fn distances_basic() {
        assert_eq!(l2_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert!(l2_distance(&[0.0], &[1.0, 2.0]).is_err());
        let t = task(2, &[vec!["red", "blue"]], &[("red", "blue")]);
        let u = task(3, &[vec!["red", "blue"], vec!["orange"]], &[("red", "orange")]);
        let e = encode_graph(&t, &GraphLayout::new(PadSize::Blocks(2), false)).unwrap();
        let f = encode_graph(&u, &GraphLayout::new(PadSize::Blocks(3), false)).unwrap();
        assert_eq!(edit_distance(&e, &e).unwrap(), 0);
        assert!(edit_distance(&e, &f).is_err());
    }

    #[test]
    fn embeddings_file_round_trip_and_errors() {
        let set =
            EmbeddingSet::new(vec!["a".into(), "b".into()], vec![vec![1.0, 2.5], vec![-1.0, 0.0]], Metric::L2).unwrap();
        let mut buf = Vec::new();
        set.write_jsonl(&mut buf).unwrap();
        assert_eq!(EmbeddingSet::read_jsonl(&buf[..], Metric::L2).unwrap(), set);
        assert!(EmbeddingSet::read_jsonl(&b""[..], Metric::L2).unwrap().is_empty());

        let dup = b"{\"id\":\"a\",\"vector\":[1]}\n{\"id\":\"a\",\"vector\":[2]}\n";
        assert!(matches!(EmbeddingSet::read_jsonl(&dup[..], Metric::L2), Err(EmbedError::DuplicateId { line: 2, .. })));
        let dim = b"{\"id\":\"a\",\"vector\":[1]}\n{\"id\":\"b\",\"vector\":[2,3]}\n";
        assert!(matches!(
            EmbeddingSet::read_jsonl(&dim[..], Metric::L2),
            Err(EmbedError::DimensionMismatch { line: 2, .. })
        ));
        let bad = b"{\"id\":\"a\",\"vector\":[1]}\nnot json\n";
        assert!(matches!(EmbeddingSet::read_jsonl(&bad[..], Metric::L2), Err(EmbedError::Format { line: 2, .. })));
    }

    #[test]
    fn external_ids_checked_against_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.jsonl");
        std::fs::write(&path, "{\"id\":\"x\",\"vector\":[1,2]}\n").unwrap();
        let corpus = vec!["y".to_string()];
        assert!(matches!(load_external_embeddings(&path, Some(&corpus)), Err(EmbedError::UnknownId(_))));
        assert_eq!(load_external_embeddings(&path, None).unwrap().len(), 1);
    }

    #[test]
    fn tfidf_properties() {
        let docs = vec![
            ("a".to_string(), "the red block is clear".to_string()),
            ("b".to_string(), "the red block is clear".to_string()),
            ("c".to_string(), "location_0_0 airport".to_string()),
        ];
        let set = tfidf_embed(&docs).unwrap();
        assert_eq!(set.vectors()[0], set.vectors()[1]);
        let dot: f64 = set.vectors()[0].iter().zip(&set.vectors()[2]).map(|(x, y)| x * y).sum();
        assert_eq!(dot, 0.0);
    }

    #[test]
    fn singleton_matrix() {
        let set = EmbeddingSet::new(vec!["a".into()], vec![vec![1.0]], Metric::Edit).unwrap();
        let m = set.distance_matrix();
        assert_eq!((m.len(), m.get(0, 0)), (1, 0.0));
    }
}

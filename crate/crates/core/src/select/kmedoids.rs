//! PAM-style k-medoids over a precomputed distance matrix.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embedding::DistanceMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct KMedoidsResult {
    pub assignment: Vec<usize>,
    /// Point index of each cluster's medoid.
    pub medoids: Vec<usize>,
    /// Total distance to the assigned medoid, after build and after every accepted swap.
    pub cost_history: Vec<f64>,
}

impl KMedoidsResult {
    pub fn cost(&self) -> f64 {
        *self.cost_history.last().expect("build records a cost")
    }
}

fn assign(matrix: &DistanceMatrix, medoids: &[usize]) -> (Vec<usize>, f64) {
    let mut total = 0.0;
    let assignment = (0..matrix.len())
        .map(|i| {
            let (mut best, mut best_d) = (0, f64::INFINITY);
            for (c, &m) in medoids.iter().enumerate() {
                let d = matrix.get(i, m);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            total += best_d;
            best
        })
        .collect();
    (assignment, total)
}

/// Greedy BUILD followed by first-improvement swaps, scanned in a seeded order,
/// until a full pass finds no improving swap.
pub fn kmedoids(matrix: &DistanceMatrix, k: usize, seed: u64) -> KMedoidsResult {
    let n = matrix.len();
    assert!(k >= 1 && k <= n, "k = {k} outside [1, {n}]");

    // BUILD: each step adds the point that lowers total cost the most.
    let mut nearest = vec![f64::INFINITY; n];
    let mut medoids = Vec::with_capacity(k);
    let mut is_medoid = vec![false; n];
    for _ in 0..k {
        let mut best = (usize::MAX, f64::INFINITY);
        for cand in (0..n).filter(|&c| !is_medoid[c]) {
            let cost: f64 = (0..n).map(|i| nearest[i].min(matrix.get(i, cand))).sum();
            if cost < best.1 {
                best = (cand, cost);
            }
        }
        let m = best.0;
        medoids.push(m);
        is_medoid[m] = true;
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(matrix.get(i, m));
        }
    }

    let (mut assignment, mut cost) = assign(matrix, &medoids);
    let mut history = vec![cost];
    let mut near = NearestTwo::compute(matrix, &medoids);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    loop {
        pairs.clear();
        for slot in 0..k {
            for cand in (0..n).filter(|&c| !is_medoid[c]) {
                pairs.push((slot, cand));
            }
        }
        pairs.shuffle(&mut rng);
        let mut improved = false;
        for &(slot, cand) in &pairs {
            if is_medoid[cand] {
                continue;
            }
            let delta = near.swap_delta(matrix, slot, cand);
            if delta < -1e-12 * cost.abs().max(1.0) {
                is_medoid[medoids[slot]] = false;
                is_medoid[cand] = true;
                medoids[slot] = cand;
                near = NearestTwo::compute(matrix, &medoids);
                (assignment, cost) = assign(matrix, &medoids);
                history.push(cost);
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    KMedoidsResult { assignment, medoids, cost_history: history }
}

/// Nearest and second-nearest medoid distance per point.
struct NearestTwo {
    slot: Vec<usize>,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl NearestTwo {
    fn compute(matrix: &DistanceMatrix, medoids: &[usize]) -> Self {
        let n = matrix.len();
        let mut out = NearestTwo { slot: vec![0; n], first: vec![f64::INFINITY; n], second: vec![f64::INFINITY; n] };
        for i in 0..n {
            for (s, &m) in medoids.iter().enumerate() {
                let d = matrix.get(i, m);
                if d < out.first[i] {
                    out.second[i] = out.first[i];
                    out.first[i] = d;
                    out.slot[i] = s;
                } else if d < out.second[i] {
                    out.second[i] = d;
                }
            }
        }
        out
    }

    /// Change in total cost from replacing the medoid in `slot` with `cand`.
    fn swap_delta(&self, matrix: &DistanceMatrix, slot: usize, cand: usize) -> f64 {
        (0..matrix.len())
            .map(|i| {
                let to_cand = matrix.get(i, cand);
                let kept = if self.slot[i] == slot { self.second[i] } else { self.first[i] };
                kept.min(to_cand) - self.first[i]
            })
            .sum()
    }
}

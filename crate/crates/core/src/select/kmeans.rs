//! Lloyd's k-means with k-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansParams {
    pub seed: u64,
    pub max_iter: usize,
    pub rel_tol: f64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams { seed: 0, max_iter: 100, rel_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Inertia after each Lloyd iteration.
    pub inertia_history: Vec<f64>,
}

impl KMeansResult {
    pub fn inertia(&self) -> f64 {
        self.inertia_history.last().copied().unwrap_or(0.0)
    }
}

pub fn squared_l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Index of the nearest centroid; ties go to the smallest index.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_l2(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = vec![points[rng.gen_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| squared_l2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut ticket = rng.gen::<f64>() * total;
            let mut chosen = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    chosen = Some(i);
                    if ticket < w {
                        break;
                    }
                    ticket -= w;
                }
            }
            chosen.expect("positive total weight")
        } else {
            // Every point coincides with a centroid; duplicates get re-spread by repair.
            rng.gen_range(0..n)
        };
        let c = points[pick].clone();
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(squared_l2(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Clusters `points` into `k` groups. Deterministic for a given seed regardless
/// of the rayon pool size: assignments are computed independently per point
/// and every reduction runs sequentially in index order.
pub fn kmeans(points: &[Vec<f64>], k: usize, params: &KMeansParams) -> KMeansResult {
    let n = points.len();
    assert!(k >= 1 && k <= n, "k = {k} outside [1, {n}]");
    let dim = points[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let mut assignment = vec![usize::MAX; n];
    let mut history: Vec<f64> = Vec::new();

    for _ in 0..params.max_iter.max(1) {
        let nearest_all: Vec<(usize, f64)> = points.par_iter().map(|p| nearest(p, &centroids)).collect();
        let changed = nearest_all.iter().zip(&assignment).any(|((c, _), a)| c != a);
        assignment = nearest_all.iter().map(|(c, _)| *c).collect();
        let mut dist: Vec<f64> = nearest_all.iter().map(|(_, d)| *d).collect();

        repair_empty(&mut assignment, &mut dist, k);

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += x;
            }
        }
        for (c, sum) in sums.into_iter().enumerate() {
            centroids[c] = sum.into_iter().map(|s| s / counts[c] as f64).collect();
        }
        let inertia: f64 = points.iter().zip(&assignment).map(|(p, &c)| squared_l2(p, &centroids[c])).sum();
        let prev = history.last().copied();
        history.push(inertia);
        if !changed {
            break;
        }
        if let Some(prev) = prev {
            if prev <= 0.0 || (prev - inertia).abs() / prev < params.rel_tol {
                break;
            }
        }
    }
    KMeansResult { assignment, centroids, inertia_history: history }
}

/// Gives every empty cluster the point farthest from its current centroid,
/// taking points only from clusters that keep at least one member.
fn repair_empty(assignment: &mut [usize], dist: &mut [f64], k: usize) {
    let mut counts = vec![0usize; k];
    for &c in assignment.iter() {
        counts[c] += 1;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut best: Option<usize> = None;
        for i in 0..assignment.len() {
            if counts[assignment[i]] > 1 && best.is_none_or(|b| dist[i] > dist[b]) {
                best = Some(i);
            }
        }
        let i = best.expect("k <= n guarantees a donor cluster");
        counts[assignment[i]] -= 1;
        counts[empty] += 1;
        assignment[i] = empty;
        dist[i] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_points(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect()).collect()
    }

    #[test]
    fn k_equals_n_is_exact() {
        let pts = random_points(20, 3, 1);
        let r = kmeans(&pts, 20, &KMeansParams::default());
        assert_eq!(r.inertia(), 0.0);
        let mut a = r.assignment.clone();
        a.sort_unstable();
        a.dedup();
        assert_eq!(a.len(), 20);
    }

    #[test]
    fn separated_pairs() {
        let pts = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![10.0, 10.0], vec![10.0, 11.0]];
        let r = kmeans(&pts, 2, &KMeansParams::default());
        assert_eq!(r.assignment[0], r.assignment[1]);
        assert_eq!(r.assignment[2], r.assignment[3]);
        assert_ne!(r.assignment[0], r.assignment[2]);
        let mut cs = r.centroids.clone();
        cs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(cs, vec![vec![0.0, 0.5], vec![10.0, 10.5]]);
    }

    #[test]
    fn inertia_never_increases() {
        for seed in 0..10 {
            let pts = random_points(300, 4, seed);
            let r = kmeans(&pts, 12, &KMeansParams { seed, max_iter: 100, rel_tol: 0.0 });
            for w in r.inertia_history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", r.inertia_history);
            }
        }
    }

    #[test]
    fn no_empty_clusters_with_duplicates() {
        let mut pts = vec![vec![1.0, 1.0]; 10];
        pts.push(vec![5.0, 5.0]);
        let r = kmeans(&pts, 4, &KMeansParams::default());
        for c in 0..4 {
            assert!(r.assignment.contains(&c));
        }
    }

    #[test]
    fn seeded_determinism_across_pools() {
        let pts = random_points(500, 6, 3);
        let p = KMeansParams { seed: 11, ..Default::default() };
        let a = kmeans(&pts, 25, &p);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| kmeans(&pts, 25, &p));
        assert_eq!(a, b);
    }
}

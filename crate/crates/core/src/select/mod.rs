//! Clustering-based maximum diversity sampling (CMDS) and its baselines.
//!
//! CMDS embeds the corpus, optionally reduces dimension, clusters into `k`
//! groups and keeps the member closest to each cluster center.

mod kmeans;
mod kmedoids;
mod reduce;

pub use kmeans::{kmeans, squared_l2, KMeansParams, KMeansResult};
pub use kmedoids::{kmedoids, KMedoidsResult};
pub use reduce::{classical_mds, pca, Reduced, Reduction};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(test)]
use crate::embedding::Metric;
use crate::embedding::{DistanceMatrix, EmbeddingSet};

#[derive(Debug, Error, PartialEq)]
pub enum SelectError {
    #[error("subset size {k} outside [1, {n}]")]
    SubsetSize { k: usize, n: usize },
    #[error("reduction dimension must be at least 1")]
    ZeroDim,
    #[error("exact search supports at most {max} points, got {n}")]
    TooLarge { n: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterAlgo {
    KMeans,
    KMedoids,
}

/// Where "closest to the centroid" is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NearestSpace {
    /// The (possibly reduced) space the clustering ran in.
    #[default]
    Clustering,
    /// The original embedding; the center is the mean of the members' original vectors.
    Original,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub k: usize,
    pub reduction: Reduction,
    pub cluster_algo: ClusterAlgo,
    pub seed: u64,
    pub max_iter: usize,
    pub rel_tol: f64,
    #[serde(default)]
    pub nearest_in: NearestSpace,
}

impl SelectionConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        SelectionConfig {
            k,
            reduction: Reduction::Mds(2),
            cluster_algo: ClusterAlgo::KMeans,
            seed,
            max_iter: 100,
            rel_tol: 1e-6,
            nearest_in: NearestSpace::Clustering,
        }
    }

    fn check(&self, n: usize) -> Result<(), SelectError> {
        if self.k == 0 || self.k > n {
            return Err(SelectError::SubsetSize { k: self.k, n });
        }
        if matches!(self.reduction, Reduction::Pca(0) | Reduction::Mds(0)) {
            return Err(SelectError::ZeroDim);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMethod {
    Cmds(SelectionConfig),
    Random { k: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Ordered by cluster index for CMDS, by draw order for random.
    pub selected_ids: Vec<String>,
    pub selected_indices: Vec<usize>,
    /// Cluster of every input point (empty for random selection).
    pub assignment: Vec<usize>,
    pub cluster_sizes: Vec<usize>,
    /// Centroid coordinates (k-means) or medoid coordinates, in clustering space.
    pub centers: Vec<Vec<f64>>,
    /// Sum of pairwise distances among the selection, in the original metric.
    pub diversity: f64,
    /// 2-D coordinates of every point when the reduction produced exactly two axes.
    pub coords_2d: Option<Vec<[f64; 2]>>,
    pub method: SelectionMethod,
}

/// Sum of pairwise distances among `indices`, accumulated in index-pair order.
pub fn diversity(set: &EmbeddingSet, indices: &[usize]) -> f64 {
    let mut total = 0.0;
    for (a, &i) in indices.iter().enumerate() {
        for &j in &indices[a + 1..] {
            total += set.distance(i, j);
        }
    }
    total
}

pub fn matrix_diversity(matrix: &DistanceMatrix, indices: &[usize]) -> f64 {
    let mut total = 0.0;
    for (a, &i) in indices.iter().enumerate() {
        for &j in &indices[a + 1..] {
            total += matrix.get(i, j);
        }
    }
    total
}

/// Selects `config.k` points, one per cluster.
pub fn select_cmds(set: &EmbeddingSet, config: &SelectionConfig) -> Result<SelectionResult, SelectError> {
    let n = set.len();
    config.check(n)?;
    let k = config.k;

    let coords: Vec<Vec<f64>> = match config.reduction {
        Reduction::None => set.vectors().to_vec(),
        Reduction::Pca(dim) => pca(set.vectors(), dim).coords,
        Reduction::Mds(dim) => classical_mds(&set.distance_matrix(), dim).coords,
    };
    let coords_2d = match config.reduction {
        Reduction::Pca(2) | Reduction::Mds(2) => Some(coords.iter().map(|p| [p[0], p[1]]).collect()),
        _ => None,
    };

    let (assignment, centers, selected) = match config.cluster_algo {
        ClusterAlgo::KMeans => {
            let params = KMeansParams { seed: config.seed, max_iter: config.max_iter, rel_tol: config.rel_tol };
            let km = kmeans(&coords, k, &params);
            let selected = match config.nearest_in {
                NearestSpace::Clustering => nearest_to_centers(&coords, &km.assignment, &km.centroids),
                NearestSpace::Original => {
                    let means = cluster_means(set.vectors(), &km.assignment, k);
                    nearest_to_centers(set.vectors(), &km.assignment, &means)
                }
            };
            (km.assignment, km.centroids, selected)
        }
        ClusterAlgo::KMedoids => {
            let matrix = match config.reduction {
                Reduction::None => set.distance_matrix(),
                _ => DistanceMatrix::from_fn(n, |i, j| squared_l2(&coords[i], &coords[j]).sqrt()),
            };
            let km = kmedoids(&matrix, k, config.seed);
            let centers = km.medoids.iter().map(|&m| coords[m].clone()).collect();
            (km.assignment, centers, km.medoids)
        }
    };

    let mut cluster_sizes = vec![0; k];
    for &c in &assignment {
        cluster_sizes[c] += 1;
    }
    Ok(SelectionResult {
        selected_ids: selected.iter().map(|&i| set.ids()[i].clone()).collect(),
        diversity: diversity(set, &selected),
        selected_indices: selected,
        assignment,
        cluster_sizes,
        centers,
        coords_2d,
        method: SelectionMethod::Cmds(config.clone()),
    })
}

fn cluster_means(points: &[Vec<f64>], assignment: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = points.first().map_or(0, |p| p.len());
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignment) {
        counts[c] += 1;
        for (s, x) in sums[c].iter_mut().zip(p) {
            *s += x;
        }
    }
    sums.into_iter().zip(counts).map(|(s, c)| s.into_iter().map(|x| x / c.max(1) as f64).collect()).collect()
}

/// Per cluster, the member with the smallest squared distance to its center;
/// ties go to the smallest point index.
pub fn nearest_to_centers(points: &[Vec<f64>], assignment: &[usize], centers: &[Vec<f64>]) -> Vec<usize> {
    let mut best: Vec<Option<(usize, f64)>> = vec![None; centers.len()];
    for (i, (p, &c)) in points.iter().zip(assignment).enumerate() {
        let d = squared_l2(p, &centers[c]);
        if best[c].is_none_or(|(_, bd)| d < bd) {
            best[c] = Some((i, d));
        }
    }
    best.into_iter().map(|b| b.expect("every cluster has a member").0).collect()
}

/// Uniform sample of `k` points without replacement.
pub fn select_random(set: &EmbeddingSet, k: usize, seed: u64) -> Result<SelectionResult, SelectError> {
    let n = set.len();
    if k == 0 || k > n {
        return Err(SelectError::SubsetSize { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let selected = index::sample(&mut rng, n, k).into_vec();
    Ok(SelectionResult {
        selected_ids: selected.iter().map(|&i| set.ids()[i].clone()).collect(),
        diversity: diversity(set, &selected),
        selected_indices: selected,
        assignment: Vec::new(),
        cluster_sizes: Vec::new(),
        centers: Vec::new(),
        coords_2d: None,
        method: SelectionMethod::Random { k, seed },
    })
}

pub const EXACT_MDP_MAX_N: usize = 20;

/// Exhaustive maximum-diversity subset; ties resolve to the lexicographically
/// smallest index set.
pub fn exact_mdp(matrix: &DistanceMatrix, k: usize) -> Result<(Vec<usize>, f64), SelectError> {
    let n = matrix.len();
    if n > EXACT_MDP_MAX_N {
        return Err(SelectError::TooLarge { n, max: EXACT_MDP_MAX_N });
    }
    if k == 0 || k > n {
        return Err(SelectError::SubsetSize { k, n });
    }
    let mut current: Vec<usize> = (0..k).collect();
    let mut best = (current.clone(), matrix_diversity(matrix, &current));
    // Lexicographic combination walk.
    loop {
        let mut i = k;
        while i > 0 && current[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        current[i - 1] += 1;
        for j in i..k {
            current[j] = current[j - 1] + 1;
        }
        let d = matrix_diversity(matrix, &current);
        if d > best.1 {
            best = (current.clone(), d);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn points_set(points: Vec<Vec<f64>>, metric: Metric) -> EmbeddingSet {
        EmbeddingSet::new((0..points.len()).map(|i| format!("t{i}")).collect(), points, metric).unwrap()
    }

    fn random_set(n: usize, seed: u64) -> EmbeddingSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        points_set((0..n).map(|_| (0..3).map(|_| rng.gen::<f64>()).collect()).collect(), Metric::L2)
    }

    #[test]
    fn k_equals_n_selects_all() {
        let set = random_set(15, 1);
        let r = select_cmds(&set, &SelectionConfig::new(15, 0)).unwrap();
        let mut idx = r.selected_indices.clone();
        idx.sort_unstable();
        assert_eq!(idx, (0..15).collect::<Vec<_>>());
        let r = select_random(&set, 15, 3).unwrap();
        assert_eq!(r.selected_ids.len(), 15);
    }

    #[test]
    fn k_one_picks_point_nearest_global_mean() {
        let set = points_set(vec![vec![0.0], vec![1.0], vec![2.0], vec![10.0]], Metric::L2);
        let r = select_cmds(&set, &SelectionConfig::new(1, 0)).unwrap();
        // mean is 3.25
        assert_eq!(r.selected_indices, vec![2]);
    }

    #[test]
    fn rejects_bad_k() {
        let set = random_set(5, 1);
        assert_eq!(select_cmds(&set, &SelectionConfig::new(6, 0)).unwrap_err(), SelectError::SubsetSize { k: 6, n: 5 });
        assert!(select_random(&set, 0, 0).is_err());
    }

    #[test]
    fn diversity_small_cases() {
        let set = points_set(vec![vec![0.0, 0.0], vec![3.0, 4.0]], Metric::L2);
        assert_eq!(diversity(&set, &[0]), 0.0);
        assert_eq!(diversity(&set, &[0, 1]), 5.0);
    }

    #[test]
    fn diversity_matches_double_loop() {
        let set = random_set(60, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let subset = index::sample(&mut rng, 60, 30).into_vec();
            let mut brute = 0.0;
            for &i in &subset {
                for &j in &subset {
                    if i != j {
                        let d: f64 = set.vectors()[i]
                            .iter()
                            .zip(&set.vectors()[j])
                            .map(|(a, b)| (a - b).powi(2))
                            .sum::<f64>()
                            .sqrt();
                        brute += d;
                    }
                }
            }
            assert!((diversity(&set, &subset) - brute / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_mdp_small() {
        let m = DistanceMatrix::from_fn(3, |i, j| (i as f64 - j as f64).abs());
        assert_eq!(exact_mdp(&m, 2).unwrap(), (vec![0, 2], 2.0));
        assert_eq!(exact_mdp(&m, 3).unwrap().0, vec![0, 1, 2]);
        let big = DistanceMatrix::from_fn(21, |_, _| 1.0);
        assert!(matches!(exact_mdp(&big, 2), Err(SelectError::TooLarge { .. })));
        // all ties -> lexicographically smallest
        let flat = DistanceMatrix::from_fn(6, |_, _| 1.0);
        assert_eq!(exact_mdp(&flat, 3).unwrap().0, vec![0, 1, 2]);
    }

    #[test]
    fn scaling_metric_scales_diversity_only() {
        let set = random_set(80, 2);
        let scaled =
            points_set(set.vectors().iter().map(|v| v.iter().map(|x| x * 3.0).collect()).collect(), Metric::L2);
        let a = select_cmds(&set, &SelectionConfig::new(8, 5)).unwrap();
        let b = select_cmds(&scaled, &SelectionConfig::new(8, 5)).unwrap();
        assert_eq!(a.selected_ids, b.selected_ids);
        assert!((b.diversity - 3.0 * a.diversity).abs() < 1e-9 * b.diversity);
    }

    #[test]
    fn mds_and_pca_pipelines_produce_valid_selections() {
        let set = random_set(40, 7);
        for reduction in [Reduction::Pca(2), Reduction::Mds(2)] {
            for algo in [ClusterAlgo::KMeans, ClusterAlgo::KMedoids] {
                let cfg = SelectionConfig { reduction, cluster_algo: algo, ..SelectionConfig::new(5, 1) };
                let r = select_cmds(&set, &cfg).unwrap();
                assert_eq!(r.selected_ids.len(), 5);
                assert_eq!(r.coords_2d.as_ref().unwrap().len(), 40);
                let clusters: std::collections::HashSet<_> =
                    r.selected_indices.iter().map(|&i| r.assignment[i]).collect();
                assert_eq!(clusters.len(), 5);
            }
        }
    }

    #[test]
    fn original_space_nearest_switch() {
        let set = random_set(50, 8);
        let base = SelectionConfig { reduction: Reduction::None, ..SelectionConfig::new(6, 1) };
        let cfg = SelectionConfig { nearest_in: NearestSpace::Original, ..base.clone() };
        let r = select_cmds(&set, &cfg).unwrap();
        // with no reduction the two spaces coincide
        assert_eq!(r.selected_indices, select_cmds(&set, &base).unwrap().selected_indices);
    }
}

//! Linear dimension reduction: PCA on coordinates, classical MDS on distances.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", content = "dim", rename_all = "lowercase")]
pub enum Reduction {
    None,
    Pca(usize),
    Mds(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduced {
    pub coords: Vec<Vec<f64>>,
    /// Number of components with non-negligible variance; `< dim` means zero padding.
    pub rank: usize,
}

const EIGEN_EPS: f64 = 1e-9;

/// Top `dim` eigenpairs of a symmetric matrix, largest first.
fn top_eigen(m: DMatrix<f64>, dim: usize) -> Vec<(f64, Vec<f64>)> {
    let n = m.nrows();
    if n >= SUBSPACE_MIN_N && dim + SUBSPACE_EXTRA < n / 4 {
        if let Some(pairs) = subspace_eigen(&m, dim) {
            return pairs;
        }
        log::debug!("subspace iteration did not converge; using a full decomposition");
    }
    full_eigen(m, dim)
}

fn full_eigen(m: DMatrix<f64>, dim: usize) -> Vec<(f64, Vec<f64>)> {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    order
        .into_iter()
        .take(dim)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
        .collect()
}

const SUBSPACE_MIN_N: usize = 400;
const SUBSPACE_EXTRA: usize = 10;
const SUBSPACE_MAX_ITER: usize = 3000;
const SUBSPACE_TOL: f64 = 1e-10;

/// Block subspace iteration with Rayleigh-Ritz. Converges to the eigenvalues of
/// largest magnitude, so the answer is accepted only when every wanted pair has
/// a small residual and is positive and larger than any unresolved magnitude.
fn subspace_eigen(m: &DMatrix<f64>, dim: usize) -> Option<Vec<(f64, Vec<f64>)>> {
    let n = m.nrows();
    let p = dim + SUBSPACE_EXTRA;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q = DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0)).qr().q();
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE) * n as f64;
    for _ in 0..SUBSPACE_MAX_ITER {
        let z = m * &q;
        let small = q.transpose() * &z;
        let small = (&small + small.transpose()) * 0.5;
        let eig = SymmetricEigen::new(small);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()).then(a.cmp(&b)));
        let vecs = &q * &eig.eigenvectors;
        let mut by_value = order.clone();
        by_value.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
        let wanted = &by_value[..dim];
        let tail = eig.eigenvalues[order[p - 1]].abs();
        let converged = wanted.iter().all(|&i| {
            let lambda = eig.eigenvalues[i];
            let v = vecs.column(i);
            let residual = (m * v - v * lambda).norm();
            lambda > tail && residual <= SUBSPACE_TOL * scale
        });
        if converged {
            return Some(
                wanted.iter().map(|&i| (eig.eigenvalues[i], vecs.column(i).iter().copied().collect())).collect(),
            );
        }
        q = z.qr().q();
    }
    None
}

/// Flips each output axis so its largest-magnitude coordinate is positive.
fn fix_signs(coords: &mut [Vec<f64>], dim: usize) {
    for axis in 0..dim {
        let mut pivot = 0.0f64;
        for p in coords.iter() {
            if p[axis].abs() > pivot.abs() + 1e-12 {
                pivot = p[axis];
            }
        }
        if pivot < 0.0 {
            for p in coords.iter_mut() {
                p[axis] = -p[axis];
            }
        }
    }
}

fn warn_rank(method: &str, rank: usize, dim: usize) {
    if rank < dim {
        log::warn!("{method}: only {rank} informative components for dim {dim}; padding with zeros");
    }
}

/// Projection onto the top `dim` principal components.
///
/// Works from whichever Gram form is smaller, so wide sparse embeddings stay cheap.
pub fn pca(points: &[Vec<f64>], dim: usize) -> Reduced {
    let n = points.len();
    let d = points.first().map_or(0, |p| p.len());
    let mut x = DMatrix::from_fn(n, d, |i, j| points[i][j]);
    for j in 0..d {
        let mean = x.column(j).mean();
        x.column_mut(j).add_scalar_mut(-mean);
    }
    let mut coords = vec![vec![0.0; dim]; n];
    let mut rank = 0;
    if d <= n {
        let cov = x.transpose() * &x;
        for (axis, (val, vec)) in top_eigen(cov, dim).into_iter().enumerate() {
            if val <= EIGEN_EPS {
                break;
            }
            rank += 1;
            let v = nalgebra::DVector::from_vec(vec);
            let scores = &x * v;
            for i in 0..n {
                coords[i][axis] = scores[i];
            }
        }
    } else {
        // Scores are u * sqrt(lambda) for eigenpairs of X X^T.
        let gram = &x * x.transpose();
        for (axis, (val, vec)) in top_eigen(gram, dim).into_iter().enumerate() {
            if val <= EIGEN_EPS {
                break;
            }
            rank += 1;
            for i in 0..n {
                coords[i][axis] = vec[i] * val.sqrt();
            }
        }
    }
    warn_rank("pca", rank, dim);
    fix_signs(&mut coords, dim);
    Reduced { coords, rank }
}

/// Classical (Torgerson) multidimensional scaling.
pub fn classical_mds(matrix: &DistanceMatrix, dim: usize) -> Reduced {
    let n = matrix.len();
    let sq = DMatrix::from_fn(n, n, |i, j| matrix.get(i, j).powi(2));
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).mean()).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let mut coords = vec![vec![0.0; dim]; n];
    let mut rank = 0;
    for (axis, (val, vec)) in top_eigen(b, dim).into_iter().enumerate() {
        if val <= EIGEN_EPS {
            break;
        }
        rank += 1;
        for i in 0..n {
            coords[i][axis] = vec[i] * val.sqrt();
        }
    }
    warn_rank("mds", rank, dim);
    fix_signs(&mut coords, dim);
    Reduced { coords, rank }
}

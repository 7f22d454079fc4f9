//! Cyclic Jacobi eigensolver for real symmetric matrices.

use num_traits::Float;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<F> {
    /// Eigenvalues sorted in descending order.
    pub values: Vec<F>,
    /// `vectors[k]` is a unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<F>>,
    pub sweeps: usize,
}

pub const DEFAULT_OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

fn off_diagonal_norm<F: Float>(a: &[Vec<F>]) -> F {
    let mut s = F::zero();
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                s = s + *v * *v;
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes `a` (assumed symmetric) by cyclic Jacobi rotations in row-major
/// pair order, stopping once the off-diagonal Frobenius norm falls below `tol`
/// or a sweep leaves the matrix unchanged.
pub fn symmetric_eigen<F: Float>(a: &[Vec<F>], tol: F) -> SymmetricEigen<F> {
    let n = a.len();
    let mut m: Vec<Vec<F>> = a.to_vec();
    let mut v: Vec<Vec<F>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
        .collect();
    let two = F::one() + F::one();
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && off_diagonal_norm(&m) >= tol {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                if apq == F::zero() {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + F::one()).sqrt());
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                if s == F::zero() {
                    continue;
                }
                rotated = true;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[j][j]
            .partial_cmp(&m[i][i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    SymmetricEigen {
        values: order.iter().map(|&i| m[i][i]).collect(),
        vectors: order
            .iter()
            .map(|&i| (0..n).map(|k| v[k][i]).collect())
            .collect(),
        sweeps,
    }
}

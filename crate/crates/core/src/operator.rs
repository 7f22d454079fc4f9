//! Row-stochastic operators, probability measures and the operations that
//! combine them.

use crate::eigen::{symmetric_eigen, DEFAULT_OFF_DIAGONAL_TOL};
use crate::error::{Error, Result};
use crate::index::ProductIndex;
use crate::matrix::Matrix;
use crate::scalar::{sum, Scalar};
use crate::spectral::{Spectrum, DEFAULT_GROUPING_TOL};

/// Default cap on the dimension of a tensor product (`2^24`).
pub const DEFAULT_KRON_CAP: usize = 1 << 24;

/// A probability measure on `0..dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<T> {
    weights: Vec<T>,
}

impl<T: Scalar> Measure<T> {
    /// Non-negative weights summing to one.
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some(index) = weights.iter().position(|w| w.is_negative()) {
            return Err(Error::NonPositiveWeight { index });
        }
        let total = sum(&weights);
        if !total.approx_eq(&T::one()) {
            return Err(Error::WeightSumMismatch {
                sum: total.to_repr(),
            });
        }
        Ok(Measure { weights })
    }

    /// Like [`Measure::new`] but every weight must be strictly positive.
    pub fn strict(weights: Vec<T>) -> Result<Self> {
        if let Some(index) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::NonPositiveWeight { index });
        }
        Self::new(weights)
    }

    pub fn uniform(dim: usize) -> Self {
        Measure {
            weights: vec![T::from_ratio(1, dim as i64); dim],
        }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn is_strict(&self) -> bool {
        self.weights.iter().all(|w| w.is_positive())
    }

    pub fn to_f64(&self) -> Measure<f64> {
        Measure {
            weights: self.weights.iter().map(Scalar::to_f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovOperator<T> {
    matrix: Matrix<T>,
    index: Option<ProductIndex>,
}

impl<T: Scalar> MarkovOperator<T> {
    /// Validates squareness, non-negativity and unit row sums.
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        if matrix.rows() == 0 {
            return Err(Error::EmptySequence);
        }
        for i in 0..matrix.rows() {
            let row = matrix.row(i);
            if let Some(col) = row.iter().position(|v| v.is_negative()) {
                return Err(Error::NegativeEntry { row: i, col });
            }
            let s = sum(row);
            if !s.approx_eq(&T::one()) {
                return Err(Error::RowSum {
                    row: i,
                    sum: s.to_repr(),
                });
            }
        }
        Ok(MarkovOperator {
            matrix,
            index: None,
        })
    }

    pub fn with_index(matrix: Matrix<T>, index: ProductIndex) -> Result<Self> {
        let mut op = Self::new(matrix)?;
        op.set_index(Some(index))?;
        Ok(op)
    }

    pub fn set_index(&mut self, index: Option<ProductIndex>) -> Result<()> {
        if let Some(idx) = &index {
            if idx.dim() != self.dim() {
                return Err(Error::DimMismatch {
                    expected: self.dim(),
                    found: idx.dim(),
                });
            }
        }
        self.index = index;
        Ok(())
    }

    /// `U_q`: every entry `1/q`.
    pub fn uniform(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidRadix { radix: q });
        }
        Ok(MarkovOperator {
            matrix: Matrix::filled(q, q, T::from_ratio(1, q as i64)),
            index: None,
        })
    }

    /// `I_q`.
    pub fn identity(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidRadix { radix: q });
        }
        Ok(MarkovOperator {
            matrix: Matrix::identity(q),
            index: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.matrix
    }

    pub fn index(&self) -> Option<&ProductIndex> {
        self.index.as_ref()
    }

    pub fn entry(&self, x: usize, y: usize) -> &T {
        self.matrix.get(x, y)
    }

    pub fn row(&self, x: usize) -> &[T] {
        self.matrix.row(x)
    }

    /// `p(x, B) = Σ_{y ∈ B} p(x, y)`.
    pub fn mass_into(&self, x: usize, set: &[usize]) -> T {
        let row = self.row(x);
        set.iter().fold(T::zero(), |acc, &y| acc + row[y].clone())
    }

    /// Tensor product with the first operator most significant.
    pub fn kron(ops: &[&Self]) -> Result<Self> {
        Self::kron_with_cap(ops, DEFAULT_KRON_CAP)
    }

    pub fn kron_with_cap(ops: &[&Self], cap: usize) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptySequence)?;
        let mut dim = 1usize;
        for op in ops {
            dim = dim.saturating_mul(op.dim());
            if dim > cap {
                return Err(Error::Overflow { dim, cap });
            }
        }
        let mut matrix = first.matrix.clone();
        for op in &ops[1..] {
            matrix = matrix.kron(&op.matrix);
        }
        let mut radices = Vec::new();
        for op in ops {
            match &op.index {
                Some(idx) => radices.extend_from_slice(idx.radices()),
                None if op.dim() >= 2 => radices.push(op.dim()),
                None => {}
            }
        }
        let index = if radices.is_empty() {
            None
        } else {
            Some(ProductIndex::new(radices)?)
        };
        Ok(MarkovOperator { matrix, index })
    }

    /// `Σ w_k · op_k`. The index of the first operator is kept.
    pub fn convex_combination(weights: &[T], ops: &[Self]) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::EmptySequence);
        }
        if weights.len() != ops.len() {
            return Err(Error::DimMismatch {
                expected: ops.len(),
                found: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|w| w.is_negative()) {
            return Err(Error::NonPositiveWeight { index });
        }
        let total = sum(weights);
        if !total.approx_eq(&T::one()) {
            return Err(Error::WeightSumMismatch {
                sum: total.to_repr(),
            });
        }
        let dim = ops[0].dim();
        let mut matrix = Matrix::zeros(dim, dim);
        for (w, op) in weights.iter().zip(ops) {
            if op.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: op.dim(),
                });
            }
            if w.is_zero() {
                continue;
            }
            matrix = matrix.add(&op.matrix.scale(w))?;
        }
        Ok(MarkovOperator {
            matrix,
            index: ops[0].index.clone(),
        })
    }

    /// First pair `(x, y)` violating `π(x)p(x,y) = π(y)p(y,x)`, if any.
    pub fn balance_violation(&self, pi: &Measure<T>) -> Result<Option<(usize, usize)>> {
        if pi.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: pi.dim(),
            });
        }
        let w = pi.weights();
        for x in 0..self.dim() {
            for y in (x + 1)..self.dim() {
                let lhs = w[x].clone() * self.entry(x, y).clone();
                let rhs = w[y].clone() * self.entry(y, x).clone();
                if !lhs.approx_eq(&rhs) {
                    return Ok(Some((x, y)));
                }
            }
        }
        Ok(None)
    }

    pub fn detailed_balance(&self, pi: &Measure<T>) -> Result<bool> {
        Ok(self.balance_violation(pi)?.is_none())
    }

    /// Eigenvalues (descending, grouped) and eigenvectors of `P`, computed
    /// through the symmetrization `S[x][y] = sqrt(π(x)/π(y)) p(x,y)`.
    pub fn spectrum(&self, pi: &Measure<T>) -> Result<Spectrum> {
        self.spectrum_with_tol(pi, DEFAULT_GROUPING_TOL)
    }

    pub fn spectrum_with_tol(&self, pi: &Measure<T>, grouping_tol: f64) -> Result<Spectrum> {
        if let Some((x, y)) = self.balance_violation(pi)? {
            return Err(Error::NotReversible { x, y });
        }
        let w: Vec<f64> = pi.weights().iter().map(Scalar::to_f64).collect();
        if let Some(index) = w.iter().position(|&v| v <= 0.0) {
            return Err(Error::NonPositiveWeight { index });
        }
        let n = self.dim();
        let s: Vec<Vec<f64>> = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| (w[x] / w[y]).sqrt() * self.entry(x, y).to_f64())
                    .collect()
            })
            .collect();
        // S is symmetric up to rounding; average to feed an exactly symmetric input
        let s: Vec<Vec<f64>> = (0..n)
            .map(|x| (0..n).map(|y| 0.5 * (s[x][y] + s[y][x])).collect())
            .collect();
        let eig = symmetric_eigen(&s, DEFAULT_OFF_DIAGONAL_TOL);
        let vectors = eig
            .vectors
            .iter()
            .map(|v| v.iter().zip(&w).map(|(a, wx)| a / wx.sqrt()).collect())
            .collect();
        Ok(Spectrum::from_values(eig.values, grouping_tol).with_eigenvectors(vectors))
    }

    /// The unique stationary distribution `πP = π`, found by Gaussian elimination.
    pub fn stationary_distribution(&self) -> Result<Measure<T>> {
        let n = self.dim();
        // rows of (Pᵀ - I), the last replaced by the normalization Σπ = 1
        let mut a: Vec<Vec<T>> = (0..n)
            .map(|i| {
                let mut row: Vec<T> = (0..n).map(|j| self.entry(j, i).clone()).collect();
                row[i] = row[i].clone() - T::one();
                row.push(T::zero());
                row
            })
            .collect();
        a[n - 1] = vec![T::one(); n + 1];
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| !a[r][col].is_negligible())
                .max_by(|&x, &y| {
                    a[x][col]
                        .abs()
                        .partial_cmp(&a[y][col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .ok_or(Error::NotIrreducible)?;
            a.swap(col, pivot);
            let pivot_row = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone() / pivot_row[col].clone();
                for c in col..=n {
                    row[c] = row[c].clone() - f.clone() * pivot_row[c].clone();
                }
            }
        }
        let weights: Vec<T> = (0..n).map(|i| a[i][n].clone() / a[i][i].clone()).collect();
        Measure::new(weights)
    }

    pub fn to_f64(&self) -> MarkovOperator<f64> {
        MarkovOperator {
            matrix: self.matrix.map(Scalar::to_f64),
            index: self.index.clone(),
        }
    }

    /// Checks that the chain is symmetric (`p(x,y) = p(y,x)`), i.e. reversible for the uniform measure.
    pub fn is_symmetric(&self) -> bool {
        self.matrix.approx_eq(&self.matrix.transpose())
    }
}

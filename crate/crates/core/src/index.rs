//! Mixed-radix codec between tuples `(x₁, …, x_n)` and flat state indices.
//! Coordinate 1 is the most significant digit.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductIndex {
    radices: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl ProductIndex {
    pub fn new(radices: Vec<usize>) -> Result<Self> {
        if radices.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some(&radix) = radices.iter().find(|&&r| r < 2) {
            return Err(Error::InvalidRadix { radix });
        }
        let mut strides = vec![1usize; radices.len()];
        let mut dim = 1usize;
        for k in (0..radices.len()).rev() {
            strides[k] = dim;
            dim = dim.checked_mul(radices[k]).ok_or(Error::Overflow {
                dim: usize::MAX,
                cap: usize::MAX,
            })?;
        }
        Ok(ProductIndex {
            radices,
            strides,
            dim,
        })
    }

    /// `q^n` states.
    pub fn uniform(q: usize, n: usize) -> Result<Self> {
        Self::new(vec![q; n])
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    /// Number of coordinates.
    pub fn len(&self) -> usize {
        self.radices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn encode(&self, tuple: &[usize]) -> Result<usize> {
        if tuple.len() != self.radices.len() {
            return Err(Error::DimMismatch {
                expected: self.radices.len(),
                found: tuple.len(),
            });
        }
        let mut x = 0;
        for (k, (&v, &r)) in tuple.iter().zip(&self.radices).enumerate() {
            if v >= r {
                return Err(Error::IndexOutOfRange { index: v, bound: r });
            }
            x += v * self.strides[k];
        }
        Ok(x)
    }

    /// Panics if `x >= dim`.
    pub fn decode(&self, x: usize) -> Vec<usize> {
        assert!(x < self.dim, "state {x} out of range {}", self.dim);
        self.radices
            .iter()
            .zip(&self.strides)
            .map(|(&r, &s)| (x / s) % r)
            .collect()
    }

    /// Digit `k` (0-based coordinate) of state `x`.
    pub fn digit(&self, x: usize, k: usize) -> usize {
        (x / self.strides[k]) % self.radices[k]
    }

    /// The state obtained by replacing digit `k` of `x` with `v`.
    pub fn with_digit(&self, x: usize, k: usize, v: usize) -> usize {
        x - self.digit(x, k) * self.strides[k] + v * self.strides[k]
    }

    /// Renders a state as its digit string, e.g. `"010"` (radices ≤ 10) or `"0.1.10"`.
    pub fn label(&self, x: usize) -> String {
        let digits = self.decode(x);
        if self.radices.iter().all(|&r| r <= 10) {
            digits.iter().map(|d| d.to_string()).collect()
        } else {
            digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Parses a digit string produced by [`ProductIndex::label`].
    pub fn parse_label(&self, s: &str) -> Result<usize> {
        let digits: Vec<usize> = if s.contains('.') {
            s.split('.')
                .map(|d| d.parse().map_err(|_| Error::Format(format!("bad state label {s:?}"))))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Format(format!("bad state label {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        self.encode(&digits)
    }
}

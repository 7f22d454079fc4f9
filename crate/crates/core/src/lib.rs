//! Markov chains on poset block structures: generalized crested products,
//! Insect chains, exact lumpings and their spectra.
//!
//! Everything numeric is generic over [`Scalar`], implemented for exact
//! [`Rational`] arithmetic and for `f64`/`f32`.

// Index loops mirror the matrix formulas; errors carry witnesses by value.
#![allow(clippy::needless_range_loop, clippy::result_large_err)]

pub mod eigen;
pub mod error;
pub mod formats;
pub mod index;
pub mod lumping;
pub mod matrix;
pub mod operator;
pub mod poset;
pub mod product;
pub mod scalar;
pub mod search;
pub mod spectral;
pub mod tree;
pub mod wreath;

pub use error::{Error, Result, Witness};
pub use index::ProductIndex;
pub use lumping::{LumpedChain, Partition};
pub use matrix::Matrix;
pub use operator::{Measure, MarkovOperator};
pub use poset::{AncestralFamily, ElemSet, Poset};
pub use product::CrestedSpec;
pub use scalar::Scalar;
pub use spectral::Spectrum;
pub use tree::TreeInsect;
pub use wreath::{BlockStructure, Permutation, WreathGenerator};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
pub type ExactOperator = MarkovOperator<Rational>;
pub type FloatOperator = MarkovOperator<f64>;
pub type ExactMeasure = Measure<Rational>;
pub type FloatMeasure = Measure<f64>;
pub type ExactCrestedSpec = CrestedSpec<Rational>;

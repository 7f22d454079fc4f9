use thiserror::Error;

/// Lumpability failure witness: two states of part `part` whose transition
/// mass into part `target` differs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub part: usize,
    pub target: usize,
    pub x: usize,
    pub x_prime: usize,
    pub sum_x: String,
    pub sum_x_prime: String,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "p({}, L{}) = {} but p({}, L{}) = {} within part L{}",
            self.x, self.target, self.sum_x, self.x_prime, self.target, self.sum_x_prime, self.part
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("poset must have between 1 and 64 elements, got {n}")]
    PosetSize { n: usize },
    #[error("relation is not reflexive at element {element}")]
    ReflexivityViolation { element: usize },
    #[error("relation is not antisymmetric: {a} and {b} are mutually related")]
    AntisymmetryViolation { a: usize, b: usize },
    #[error("relation is not transitive: {a} <= {b} <= {c} but not {a} <= {c}")]
    TransitivityViolation { a: usize, b: usize, c: usize },
    #[error("redundant cover pairs {pairs:?}; the transitive reduction is {reduction:?}")]
    RedundantCover {
        pairs: Vec<(usize, usize)>,
        reduction: Vec<(usize, usize)>,
    },
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("enumeration over {n} elements exceeds the cap of {cap}")]
    SizeLimit { n: usize, cap: usize },
    #[error("deleting every element leaves an empty poset")]
    EmptyResult,
    #[error("no cover chain leads from {from} to {to}")]
    Unreachable { from: String, to: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("row {row} sums to {sum}, not 1")]
    RowSum { row: usize, sum: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("weights sum to {sum}, not 1")]
    WeightSumMismatch { sum: String },
    #[error("weight {index} is not strictly positive")]
    NonPositiveWeight { index: usize },
    #[error("tensor dimension {dim} exceeds the cap of {cap}")]
    Overflow { dim: usize, cap: usize },
    #[error("empty operator sequence")]
    EmptySequence,
    #[error("radix {radix} is invalid (must be >= 2)")]
    InvalidRadix { radix: usize },
    #[error("operator is not in detailed balance with the measure at ({x}, {y})")]
    NotReversible { x: usize, y: usize },
    #[error("the chain has no unique stationary distribution")]
    NotIrreducible,
    #[error("the Insect construction needs equal factor sizes")]
    UnequalFactorSizes,
    #[error("alpha denominator {value} on cover {from} -> {to} is not positive")]
    DegenerateDenominator { from: String, to: String, value: String },

    #[error("invalid partition: {reason}")]
    InvalidPartition { reason: String },
    #[error("not lumpable: {witness}")]
    NotLumpable { witness: Witness },
    #[error("partition of factor {factor} does not lump it: {witness}")]
    FactorNotLumpable { factor: usize, witness: Witness },
    #[error("table of element {element} has no entry for key {key:?}")]
    TableIncomplete { element: usize, key: Vec<usize> },
    #[error("table value of element {element} at key {key:?} does not lump the factor: {witness}")]
    ValueNotLumping {
        element: usize,
        key: Vec<usize>,
        witness: Witness,
    },
    #[error("internal consistency check failed: {0}")]
    ConstructionMismatch(String),

    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("operator not invariant under generator {generator}: p({x},{y}) changes")]
    NotInvariant { generator: usize, x: usize, y: usize },
    #[error("projected parts {a} and {b} overlap without being equal")]
    ProjectionClash { a: usize, b: usize },
    #[error("reconstructed generators do not reproduce the partition")]
    ReconstructionMismatch,
    #[error("ambient size {size} exceeds the cap of {cap}")]
    AmbientTooLarge { size: String, cap: usize },

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Variant name, used as the `error` field of structured CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::PosetSize { .. } => "PosetSize",
            Error::ReflexivityViolation { .. } => "ReflexivityViolation",
            Error::AntisymmetryViolation { .. } => "AntisymmetryViolation",
            Error::TransitivityViolation { .. } => "TransitivityViolation",
            Error::RedundantCover { .. } => "RedundantCover",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::SizeLimit { .. } => "SizeLimit",
            Error::EmptyResult => "EmptyResult",
            Error::Unreachable { .. } => "Unreachable",
            Error::NotSquare { .. } => "NotSquare",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::RowSum { .. } => "RowSum",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::WeightSumMismatch { .. } => "WeightSumMismatch",
            Error::NonPositiveWeight { .. } => "NonPositiveWeight",
            Error::Overflow { .. } => "Overflow",
            Error::EmptySequence => "EmptySequence",
            Error::InvalidRadix { .. } => "InvalidRadix",
            Error::NotReversible { .. } => "NotReversible",
            Error::NotIrreducible => "NotIrreducible",
            Error::UnequalFactorSizes => "UnequalFactorSizes",
            Error::DegenerateDenominator { .. } => "DegenerateDenominator",
            Error::InvalidPartition { .. } => "InvalidPartition",
            Error::NotLumpable { .. } => "NotLumpable",
            Error::FactorNotLumpable { .. } => "FactorNotLumpable",
            Error::TableIncomplete { .. } => "TableIncomplete",
            Error::ValueNotLumping { .. } => "ValueNotLumping",
            Error::ConstructionMismatch(_) => "ConstructionMismatch",
            Error::NotAPermutation(_) => "NotAPermutation",
            Error::NotInvariant { .. } => "NotInvariant",
            Error::ProjectionClash { .. } => "ProjectionClash",
            Error::ReconstructionMismatch => "ReconstructionMismatch",
            Error::AmbientTooLarge { .. } => "AmbientTooLarge",
            Error::Format(_) => "Format",
        }
    }

    /// Whether the error stems from malformed input rather than a domain condition.
    pub fn is_malformed_input(&self) -> bool {
        matches!(self, Error::Format(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

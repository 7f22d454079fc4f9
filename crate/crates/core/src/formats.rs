//! JSON file formats. Each `*Json` type is the serde shape on disk; the
//! `to_*`/`from_*` helpers convert to and from the validated domain types.
//! Scalars are written as strings (`"num/den"` for rationals).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Witness};
use crate::index::ProductIndex;
use crate::lumping::{GeneralizedLumpingSpec, Partition};
use crate::matrix::Matrix;
use crate::operator::{MarkovOperator, Measure};
use crate::poset::Poset;
use crate::product::{CrestedSpec, InsectCoefficients};
use crate::scalar::Scalar;
use crate::spectral::{Eigenvalue, Spectrum};
use crate::wreath::{BlockStructure, Permutation, WreathGenerator};
use crate::Rational;

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

/// Parses any of the `*Json` shapes from a string.
pub fn parse<'a, J: Deserialize<'a>>(text: &'a str) -> Result<J> {
    serde_json::from_str(text).map_err(format_err)
}

pub fn to_string_pretty<J: Serialize>(value: &J) -> String {
    serde_json::to_string_pretty(value).expect("format types always serialize")
}

fn parse_scalar<T: Scalar>(s: &str) -> Result<T> {
    T::parse_repr(s).ok_or_else(|| Error::Format(format!("invalid number {s:?}")))
}

/// Renders a table key: `()` for the root, `(0,1)` otherwise.
pub fn format_key(key: &[usize]) -> String {
    let inner: Vec<String> = key.iter().map(|k| k.to_string()).collect();
    format!("({})", inner.join(","))
}

pub fn parse_key(s: &str) -> Result<Vec<usize>> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Format(format!("table key {s:?} must look like (0,1)")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Format(format!("bad table key {s:?}"))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub n: usize,
    /// `[a, b]` means `b ⊲ a`.
    pub covers: Vec<[usize; 2]>,
}

impl PosetJson {
    pub fn from_poset(poset: &Poset) -> Self {
        PosetJson {
            n: poset.n(),
            covers: poset.covers().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_poset(&self) -> Result<Poset> {
        let pairs: Vec<(usize, usize)> = self.covers.iter().map(|c| (c[0], c[1])).collect();
        Poset::from_covers(self.n, &pairs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radices: Option<Vec<usize>>,
    pub rows: Vec<Vec<String>>,
}

impl MatrixJson {
    pub fn from_operator<T: Scalar>(p: &MarkovOperator<T>) -> Self {
        MatrixJson {
            dim: p.dim(),
            radices: p.index().map(|i| i.radices().to_vec()),
            rows: (0..p.dim())
                .map(|x| p.row(x).iter().map(Scalar::to_repr).collect())
                .collect(),
        }
    }

    fn to_matrix<T: Scalar>(&self) -> Result<Matrix<T>> {
        if self.rows.len() != self.dim || self.rows.iter().any(|r| r.len() != self.dim) {
            return Err(Error::Format(format!("rows must form a {0}x{0} array", self.dim)));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<T>>>())
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows)
    }

    pub fn to_operator<T: Scalar>(&self) -> Result<MarkovOperator<T>> {
        let matrix = self.to_matrix()?;
        match &self.radices {
            Some(r) => MarkovOperator::with_index(matrix, ProductIndex::new(r.clone())?),
            None => MarkovOperator::new(matrix),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub dim: usize,
    pub parts: Vec<Vec<usize>>,
}

impl PartitionJson {
    pub fn from_partition(p: &Partition) -> Self {
        PartitionJson {
            dim: p.dim(),
            parts: p.parts().to_vec(),
        }
    }

    pub fn to_partition(&self) -> Result<Partition> {
        Partition::new(self.dim, self.parts.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub weights: Vec<String>,
}

impl MeasureJson {
    pub fn from_measure<T: Scalar>(m: &Measure<T>) -> Self {
        MeasureJson {
            weights: m.weights().iter().map(Scalar::to_repr).collect(),
        }
    }

    pub fn to_measure<T: Scalar>(&self) -> Result<Measure<T>> {
        let w = self.weights.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<T>>>()?;
        Measure::new(w)
    }
}

/// A crested product: explicit factor matrices, or uniform factors of the
/// given `sizes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrestedJson {
    pub poset: PosetJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sizes: Option<Vec<usize>>,
    pub weights: Vec<String>,
}

impl CrestedJson {
    pub fn from_spec<T: Scalar>(spec: &CrestedSpec<T>) -> Self {
        CrestedJson {
            poset: PosetJson::from_poset(spec.poset()),
            factors: Some(spec.factors().iter().map(MatrixJson::from_operator).collect()),
            sizes: None,
            weights: spec.weights().iter().map(Scalar::to_repr).collect(),
        }
    }

    pub fn to_spec<T: Scalar>(&self) -> Result<CrestedSpec<T>> {
        let poset = self.poset.to_poset()?;
        let weights = self.weights.iter().map(|s| parse_scalar(s)).collect::<Result<Vec<T>>>()?;
        match (&self.factors, &self.sizes) {
            (Some(f), None) => {
                let factors = f.iter().map(MatrixJson::to_operator).collect::<Result<Vec<_>>>()?;
                CrestedSpec::new(poset, factors, weights)
            }
            (None, Some(sizes)) => CrestedSpec::uniform_factors(poset, sizes, weights),
            _ => Err(Error::Format("give exactly one of \"factors\" or \"sizes\"".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralizedEntryJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, Vec<Vec<usize>>>>,
}

/// Per element (as a decimal string), either a fixed `base` partition or a
/// `table` keyed by the ancestor labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralizedJson {
    pub elements: BTreeMap<String, GeneralizedEntryJson>,
}

fn partition_of_letters(parts: &[Vec<usize>]) -> Result<Partition> {
    let dim = parts.iter().map(Vec::len).sum();
    Partition::new(dim, parts.to_vec())
}

impl GeneralizedJson {
    pub fn from_spec(spec: &GeneralizedLumpingSpec) -> Self {
        let elements = spec
            .tables
            .iter()
            .map(|(&i, table)| {
                let entry = match table.get(&Vec::new()) {
                    Some(base) if table.len() == 1 => GeneralizedEntryJson {
                        base: Some(base.parts().to_vec()),
                        table: None,
                    },
                    _ => GeneralizedEntryJson {
                        base: None,
                        table: Some(
                            table
                                .iter()
                                .map(|(k, p)| (format_key(k), p.parts().to_vec()))
                                .collect(),
                        ),
                    },
                };
                (i.to_string(), entry)
            })
            .collect();
        GeneralizedJson { elements }
    }

    pub fn to_spec(&self) -> Result<GeneralizedLumpingSpec> {
        let mut spec = GeneralizedLumpingSpec::new();
        for (name, entry) in &self.elements {
            let element: usize = name
                .parse()
                .map_err(|_| Error::Format(format!("element key {name:?} is not a number")))?;
            match (&entry.base, &entry.table) {
                (Some(base), None) => {
                    spec = spec.with_base(element, partition_of_letters(base)?);
                }
                (None, Some(table)) => {
                    for (key, parts) in table {
                        spec = spec.with_entry(element, parse_key(key)?, partition_of_letters(parts)?);
                    }
                }
                _ => {
                    return Err(Error::Format(format!(
                        "element {element} needs exactly one of \"base\" or \"table\""
                    )))
                }
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorTableJson {
    pub element: usize,
    pub table: BTreeMap<String, Vec<usize>>,
}

/// A generator lists only its non-identity tables; a generator with a single
/// table may be written as that table directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorJson {
    Tables { tables: Vec<GeneratorTableJson> },
    Single(GeneratorTableJson),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupJson {
    pub poset: PosetJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radices: Option<Vec<usize>>,
    pub generators: Vec<GeneratorJson>,
}

impl GroupJson {
    pub fn from_generators(structure: &BlockStructure, gens: &[WreathGenerator]) -> Self {
        let radices: Vec<usize> = (1..=structure.n()).map(|i| structure.radix(i)).collect();
        let uniform = radices.iter().all(|&r| r == radices[0]);
        let generators = gens
            .iter()
            .map(|g| {
                let tables = g
                    .tables()
                    .iter()
                    .filter_map(|(&element, table)| {
                        let table: BTreeMap<String, Vec<usize>> = table
                            .iter()
                            .filter(|(_, p)| !p.is_identity())
                            .map(|(k, p)| (format_key(k), p.images().to_vec()))
                            .collect();
                        (!table.is_empty()).then_some(GeneratorTableJson { element, table })
                    })
                    .collect();
                GeneratorJson::Tables { tables }
            })
            .collect();
        GroupJson {
            poset: PosetJson::from_poset(structure.poset()),
            q: uniform.then_some(radices[0]),
            radices: (!uniform).then_some(radices),
            generators,
        }
    }

    pub fn structure(&self) -> Result<BlockStructure> {
        let poset = self.poset.to_poset()?;
        match (self.q, &self.radices) {
            (Some(q), None) => BlockStructure::uniform(poset, q),
            (None, Some(r)) => BlockStructure::new(poset, r.clone()),
            _ => Err(Error::Format("give exactly one of \"q\" or \"radices\"".into())),
        }
    }

    pub fn to_generators(&self, structure: &BlockStructure) -> Result<Vec<WreathGenerator>> {
        self.generators
            .iter()
            .map(|g| {
                let tables: &[GeneratorTableJson] = match g {
                    GeneratorJson::Tables { tables } => tables,
                    GeneratorJson::Single(t) => std::slice::from_ref(t),
                };
                let mut gen = WreathGenerator::identity();
                for t in tables {
                    let entries = t
                        .table
                        .iter()
                        .map(|(key, images)| Ok((parse_key(key)?, Permutation::new(images.clone())?)))
                        .collect::<Result<Vec<_>>>()?;
                    if t.element == 0 || t.element > structure.n() {
                        return Err(Error::IndexOutOfRange {
                            index: t.element,
                            bound: structure.n(),
                        });
                    }
                    gen = gen.with_sparse_table(structure, t.element, entries);
                }
                gen.validate(structure)?;
                Ok(gen)
            })
            .collect()
    }
}

/// Decimal form of a numeric eigenvalue, rounded to 12 places so solver
/// noise below the 1e-9 comparison tolerance does not reach the output.
fn format_float(v: f64) -> String {
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    match s {
        "-0" | "" => "0".to_string(),
        _ => s.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenvalueJson {
    /// Exact `"num/den"` when known, decimal otherwise.
    pub value: String,
    pub multiplicity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumJson {
    pub eigenvalues: Vec<EigenvalueJson>,
}

impl SpectrumJson {
    pub fn from_spectrum(s: &Spectrum) -> Self {
        SpectrumJson {
            eigenvalues: s
                .eigenvalues()
                .iter()
                .map(|e| EigenvalueJson {
                    value: match &e.exact {
                        Some(r) => r.to_repr(),
                        None => format_float(e.value),
                    },
                    multiplicity: e.multiplicity,
                    label: e.label.clone(),
                })
                .collect(),
        }
    }

    pub fn to_spectrum(&self) -> Result<Spectrum> {
        let eigenvalues = self
            .eigenvalues
            .iter()
            .map(|e| {
                let (value, exact) = if e.value.contains('/') {
                    let r: Rational = parse_scalar(&e.value)?;
                    (r.to_f64(), Some(r))
                } else {
                    (parse_scalar::<f64>(&e.value)?, None)
                };
                Ok(Eigenvalue {
                    value,
                    exact,
                    multiplicity: e.multiplicity,
                    label: e.label.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Spectrum::from_eigenvalues(eigenvalues))
    }
}

/// Insect coefficients keyed by ancestral sets: `"{1,2}<{1}"` for the cover
/// from `{1,2}` down to `{1}`, and `"{1}"` for `p_{{1}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientsJson {
    pub alphas: BTreeMap<String, String>,
    pub weights: BTreeMap<String, String>,
}

impl CoefficientsJson {
    pub fn from_coefficients<T: Scalar>(c: &InsectCoefficients<T>) -> Self {
        CoefficientsJson {
            alphas: c
                .alphas()
                .into_iter()
                .map(|(from, to, a)| (format!("{from}<{to}"), a.to_repr()))
                .collect(),
            weights: c
                .weights()
                .into_iter()
                .map(|(set, w)| (set.to_string(), w.to_repr()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub part: usize,
    pub target: usize,
    pub x: usize,
    pub x_prime: usize,
    pub sum_x: String,
    pub sum_x_prime: String,
}

impl From<&Witness> for WitnessJson {
    fn from(w: &Witness) -> Self {
        WitnessJson {
            part: w.part,
            target: w.target,
            x: w.x,
            x_prime: w.x_prime,
            sum_x: w.sum_x.clone(),
            sum_x_prime: w.sum_x_prime.clone(),
        }
    }
}

/// Structured error object `{"error": kind, "message": ..., "witness": ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorJson {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

impl From<&Error> for ErrorJson {
    fn from(e: &Error) -> Self {
        let witness = match e {
            Error::NotLumpable { witness }
            | Error::FactorNotLumpable { witness, .. }
            | Error::ValueNotLumping { witness, .. } => Some(WitnessJson::from(witness)),
            _ => None,
        };
        ErrorJson {
            error: e.kind().to_string(),
            message: e.to_string(),
            witness,
        }
    }
}

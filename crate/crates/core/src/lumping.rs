//! Partitions, exact lumpability and the lumping constructions for crested
//! products: deletion, direct product and generalized product of lumpings.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use crate::error::{Error, Result, Witness};
use crate::index::ProductIndex;
use crate::matrix::Matrix;
use crate::operator::{MarkovOperator, Measure};
use crate::poset::{ElemSet, Fibering, NotFiberedReason, Poset, ReducedPoset};
use crate::product::{crested_product, CrestedSpec};
use crate::scalar::Scalar;

/// A partition of `0..dim` in canonical form: every part sorted, parts ordered
/// by their minimum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<Vec<usize>>,
    lookup: Vec<usize>,
}

impl Partition {
    pub fn new(dim: usize, parts: Vec<Vec<usize>>) -> Result<Self> {
        let mut lookup = vec![usize::MAX; dim];
        for (k, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::InvalidPartition {
                    reason: format!("part {k} is empty"),
                });
            }
            for &x in part {
                if x >= dim {
                    return Err(Error::InvalidPartition {
                        reason: format!("state {x} is out of range for dimension {dim}"),
                    });
                }
                if lookup[x] != usize::MAX {
                    return Err(Error::InvalidPartition {
                        reason: format!("state {x} appears in more than one part"),
                    });
                }
                lookup[x] = k;
            }
        }
        if let Some(x) = lookup.iter().position(|&k| k == usize::MAX) {
            return Err(Error::InvalidPartition {
                reason: format!("state {x} is not covered"),
            });
        }
        Ok(Self::canonical(parts))
    }

    fn canonical(mut parts: Vec<Vec<usize>>) -> Self {
        for part in parts.iter_mut() {
            part.sort_unstable();
        }
        parts.sort_by_key(|p| p[0]);
        let dim = parts.iter().map(|p| p.len()).sum();
        let mut lookup = vec![0; dim];
        for (k, part) in parts.iter().enumerate() {
            for &x in part {
                lookup[x] = k;
            }
        }
        Partition { parts, lookup }
    }

    /// Groups states with equal labels.
    pub fn from_labels<L: Eq + Hash>(labels: &[L]) -> Self {
        let mut ids: HashMap<&L, usize> = HashMap::new();
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for (x, label) in labels.iter().enumerate() {
            let k = *ids.entry(label).or_insert_with(|| {
                parts.push(Vec::new());
                parts.len() - 1
            });
            parts[k].push(x);
        }
        Self::canonical(parts)
    }

    /// All singletons.
    pub fn identity(dim: usize) -> Self {
        Self::canonical((0..dim).map(|x| vec![x]).collect())
    }

    /// A single part (empty when `dim == 0`).
    pub fn universal(dim: usize) -> Self {
        if dim == 0 {
            return Self::canonical(Vec::new());
        }
        Self::canonical(vec![(0..dim).collect()])
    }

    pub fn dim(&self) -> usize {
        self.lookup.len()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part(&self, k: usize) -> &[usize] {
        &self.parts[k]
    }

    pub fn part_of(&self, x: usize) -> usize {
        self.lookup[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.lookup
    }

    /// Merges parts according to a partition of the part ids.
    pub fn coarsen(&self, merge: &Partition) -> Result<Self> {
        if merge.dim() != self.len() {
            return Err(Error::DimMismatch {
                expected: self.len(),
                found: merge.dim(),
            });
        }
        let labels: Vec<usize> = self.lookup.iter().map(|&k| merge.part_of(k)).collect();
        Ok(Self::from_labels(&labels))
    }

    /// Every part of `self` lies inside a part of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        self.dim() == coarser.dim()
            && self
                .parts
                .iter()
                .all(|p| p.iter().all(|&x| coarser.part_of(x) == coarser.part_of(p[0])))
    }

    /// The indicator function of part `k`.
    pub fn indicator<T: Scalar>(&self, k: usize) -> Vec<T> {
        (0..self.dim())
            .map(|x| if self.lookup[x] == k { T::one() } else { T::zero() })
            .collect()
    }
}

/// A lumped chain `P̃(Lᵢ, Lⱼ) = p(x, Lⱼ)` for any `x ∈ Lᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LumpedChain<T> {
    pub partition: Partition,
    pub operator: MarkovOperator<T>,
}

fn check_dims<T: Scalar>(p: &MarkovOperator<T>, partition: &Partition) -> Result<()> {
    if p.dim() != partition.dim() {
        return Err(Error::DimMismatch {
            expected: p.dim(),
            found: partition.dim(),
        });
    }
    Ok(())
}

/// `mass[x][j] = p(x, L_j)`.
fn part_masses<T: Scalar>(p: &MarkovOperator<T>, partition: &Partition) -> Vec<Vec<T>> {
    (0..p.dim())
        .map(|x| {
            let mut masses = vec![T::zero(); partition.len()];
            for (y, v) in p.row(x).iter().enumerate() {
                if !v.is_zero() {
                    let j = partition.part_of(y);
                    masses[j] = masses[j].clone() + v.clone();
                }
            }
            masses
        })
        .collect()
}

/// Returns the first violation of lumpability, scanning parts and targets in order.
pub fn lumping_violation<T: Scalar>(
    p: &MarkovOperator<T>,
    partition: &Partition,
) -> Result<Option<Witness>> {
    check_dims(p, partition)?;
    let masses = part_masses(p, partition);
    for (i, part) in partition.parts().iter().enumerate() {
        let x = part[0];
        for j in 0..partition.len() {
            for &x_prime in &part[1..] {
                if !masses[x][j].approx_eq(&masses[x_prime][j]) {
                    return Ok(Some(Witness {
                        part: i,
                        target: j,
                        x,
                        x_prime,
                        sum_x: masses[x][j].to_repr(),
                        sum_x_prime: masses[x_prime][j].to_repr(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Whether `x ↦ p(x, L_j)` is constant on every part.
pub fn is_lumping<T: Scalar>(p: &MarkovOperator<T>, partition: &Partition) -> bool {
    matches!(lumping_violation(p, partition), Ok(None))
}

pub fn lump<T: Scalar>(p: &MarkovOperator<T>, partition: &Partition) -> Result<LumpedChain<T>> {
    if let Some(witness) = lumping_violation(p, partition)? {
        return Err(Error::NotLumpable { witness });
    }
    let masses = part_masses(p, partition);
    let k = partition.len();
    let matrix = Matrix::from_fn(k, k, |i, j| masses[partition.part(i)[0]][j].clone());
    Ok(LumpedChain {
        partition: partition.clone(),
        operator: MarkovOperator::new(matrix)?,
    })
}

/// Part sums `π|_𝓛(Lᵢ) = Σ_{x∈Lᵢ} π(x)`.
pub fn lumped_measure<T: Scalar>(pi: &Measure<T>, partition: &Partition) -> Result<Measure<T>> {
    if pi.dim() != partition.dim() {
        return Err(Error::DimMismatch {
            expected: pi.dim(),
            found: partition.dim(),
        });
    }
    Measure::new(
        partition
            .parts()
            .iter()
            .map(|part| part.iter().fold(T::zero(), |acc, &x| acc + pi.weights()[x].clone()))
            .collect(),
    )
}

/// Lumps `P` by `L`, then the lumped chain by `M`, and returns the induced
/// partition of the original states.
pub fn compose<T: Scalar>(
    p: &MarkovOperator<T>,
    partition: &Partition,
    merge: &Partition,
) -> Result<Partition> {
    let first = lump(p, partition)?;
    lump(&first.operator, merge)?;
    let coarse = partition.coarsen(merge)?;
    if !is_lumping(p, &coarse) {
        return Err(Error::ConstructionMismatch(
            "composed partition does not lump the original chain".into(),
        ));
    }
    Ok(coarse)
}

/// Whether `P` maps the span of the part indicators into itself, decided by
/// exact rank comparison.
pub fn indicator_invariance<T: Scalar>(p: &MarkovOperator<T>, partition: &Partition) -> Result<bool> {
    check_dims(p, partition)?;
    let k = partition.len();
    let dim = p.dim();
    let indicators: Vec<Vec<T>> = (0..k).map(|j| partition.indicator(j)).collect();
    for ind in &indicators {
        let image = p.matrix().mul_vec(ind)?;
        // columns: the k indicators followed by P·1_{L_j}
        let augmented = Matrix::from_fn(dim, k + 1, |x, c| {
            if c < k {
                indicators[c][x].clone()
            } else {
                image[x].clone()
            }
        });
        if augmented.rank() > k {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_removed(index: &ProductIndex, removed: ElemSet) -> Result<()> {
    let n = index.len();
    if !removed.is_subset(ElemSet::full(n)) {
        let bad = removed.difference(ElemSet::full(n)).iter().next().unwrap_or(0);
        return Err(Error::IndexOutOfRange { index: bad, bound: n });
    }
    Ok(())
}

/// Identifies states that agree on every coordinate outside `removed`.
///
/// Parts are ordered like the tuples of the kept coordinates.
pub fn deletion_partition(index: &ProductIndex, removed: ElemSet) -> Result<Partition> {
    check_removed(index, removed)?;
    let kept: Vec<usize> = (1..=index.len()).filter(|&i| !removed.contains(i)).collect();
    let labels: Vec<Vec<usize>> = (0..index.dim())
        .map(|x| kept.iter().map(|&i| index.digit(x, i - 1)).collect())
        .collect();
    Ok(Partition::from_labels(&labels))
}

fn kept_index(index: &ProductIndex, removed: ElemSet) -> Option<ProductIndex> {
    let radices: Vec<usize> = (1..=index.len())
        .filter(|&i| !removed.contains(i))
        .map(|i| index.radices()[i - 1])
        .collect();
    ProductIndex::new(radices).ok()
}

/// The lumped crested product obtained by forgetting the coordinates in `removed`.
pub fn deletion_lumping<T: Scalar>(spec: &CrestedSpec<T>, removed: ElemSet) -> Result<LumpedChain<T>> {
    let p = crested_product(spec)?;
    let index = spec.index();
    let partition = deletion_partition(&index, removed)?;
    let mut lumped = lump(&p, &partition).map_err(|e| match e {
        Error::NotLumpable { witness } => Error::ConstructionMismatch(format!(
            "deletion partition failed to lump a crested product: {witness}"
        )),
        other => other,
    })?;
    lumped.operator.set_index(kept_index(&index, removed))?;
    Ok(lumped)
}

/// `Σᵢ pᵢ⁰ (⊗_{j∈H[i]∖R} U_j) ⊗ (⊗_{j∉H[i]∪R} I_j)` on the kept coordinates,
/// valid when every factor is uniform.
pub fn deletion_lumped_closed_form<T: Scalar>(
    poset: &Poset,
    removed: ElemSet,
    weights: &[T],
    sizes: &[usize],
) -> Result<MarkovOperator<T>> {
    let n = poset.n();
    for len in [weights.len(), sizes.len()] {
        if len != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: len,
            });
        }
    }
    let index = ProductIndex::new(sizes.to_vec())?;
    check_removed(&index, removed)?;
    let kept: Vec<usize> = (1..=n).filter(|&i| !removed.contains(i)).collect();
    if kept.is_empty() {
        return MarkovOperator::identity(1);
    }
    let mut terms = Vec::with_capacity(n);
    for i in 1..=n {
        let uniform_slots = poset.below(i).with(i).difference(removed);
        let slots = kept
            .iter()
            .map(|&j| {
                if uniform_slots.contains(j) {
                    MarkovOperator::uniform(sizes[j - 1])
                } else {
                    MarkovOperator::identity(sizes[j - 1])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&MarkovOperator<T>> = slots.iter().collect();
        terms.push(MarkovOperator::kron(&refs)?);
    }
    MarkovOperator::convex_combination(weights, &terms)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReducedOutcome<T> {
    /// The lumped chain is the crested product on the reduced poset with these weights.
    Crested {
        reduced: ReducedPoset,
        weights: Vec<T>,
        operator: MarkovOperator<T>,
    },
    NotCrested { reason: NotFiberedReason },
}

/// Decides whether deleting `removed` from an all-uniform crested product
/// yields the crested product on the reduced poset, and if so with which weights.
pub fn reduced_crested_equivalence<T: Scalar>(
    poset: &Poset,
    removed: ElemSet,
    weights: &[T],
    sizes: &[usize],
) -> Result<ReducedOutcome<T>> {
    let spec = CrestedSpec::uniform_factors(poset.clone(), sizes, weights.to_vec())?;
    let witness = match poset.fibered_over(removed)? {
        Fibering::Fibered(w) => w,
        Fibering::NotFibered(reason) => return Ok(ReducedOutcome::NotCrested { reason }),
    };
    let reduced = poset.reduced(removed)?;
    let mut new_weights: Vec<T> = reduced
        .labels
        .iter()
        .map(|&i| weights[i - 1].clone())
        .collect();
    for (&r, &s) in &witness.base_of {
        let k = reduced.new_label(s).expect("base elements are kept") - 1;
        new_weights[k] = new_weights[k].clone() + weights[r - 1].clone();
    }
    let new_sizes: Vec<usize> = reduced.labels.iter().map(|&i| sizes[i - 1]).collect();
    let reduced_spec = CrestedSpec::uniform_factors(reduced.poset.clone(), &new_sizes, new_weights.clone())?;
    let operator = crested_product(&reduced_spec)?;
    let lumped = deletion_lumping(&spec, removed)?;
    if !lumped.operator.matrix().approx_eq(operator.matrix()) {
        return Err(Error::ConstructionMismatch(
            "reduced crested product differs from the deletion lumping".into(),
        ));
    }
    Ok(ReducedOutcome::Crested {
        reduced,
        weights: new_weights,
        operator,
    })
}

/// The product of per-coordinate partitions, without verification.
pub fn product_partition(index: &ProductIndex, factors: &[Partition]) -> Result<Partition> {
    if factors.len() != index.len() {
        return Err(Error::DimMismatch {
            expected: index.len(),
            found: factors.len(),
        });
    }
    for (k, f) in factors.iter().enumerate() {
        if f.dim() != index.radices()[k] {
            return Err(Error::DimMismatch {
                expected: index.radices()[k],
                found: f.dim(),
            });
        }
    }
    let labels: Vec<Vec<usize>> = (0..index.dim())
        .map(|x| {
            (0..index.len())
                .map(|k| factors[k].part_of(index.digit(x, k)))
                .collect()
        })
        .collect();
    Ok(Partition::from_labels(&labels))
}

/// Direct product of factor lumpings, verified against the crested product.
pub fn direct_product_partition<T: Scalar>(
    spec: &CrestedSpec<T>,
    factors: &[Partition],
) -> Result<Partition> {
    let index = spec.index();
    let partition = product_partition(&index, factors)?;
    for (k, f) in factors.iter().enumerate() {
        if let Some(witness) = lumping_violation(spec.factor(k + 1), f)? {
            return Err(Error::FactorNotLumpable {
                factor: k + 1,
                witness,
            });
        }
    }
    let p = crested_product(spec)?;
    if !is_lumping(&p, &partition) {
        return Err(Error::ConstructionMismatch(
            "direct product of lumpings does not lump the crested product".into(),
        ));
    }
    Ok(partition)
}

/// Tables `fᵢ` keyed by the part labels of `A(i)` (ascending element order).
/// Elements with `A(i) = ∅` carry a single entry under the empty key.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GeneralizedLumpingSpec {
    pub tables: BTreeMap<usize, BTreeMap<Vec<usize>, Partition>>,
}

impl GeneralizedLumpingSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_base(self, element: usize, partition: Partition) -> Self {
        self.with_entry(element, Vec::new(), partition)
    }

    pub fn with_entry(mut self, element: usize, key: Vec<usize>, partition: Partition) -> Self {
        self.tables.entry(element).or_default().insert(key, partition);
        self
    }

    fn lookup(&self, element: usize, key: &[usize]) -> Result<&Partition> {
        self.tables
            .get(&element)
            .and_then(|t| t.get(key))
            .ok_or_else(|| Error::TableIncomplete {
                element,
                key: key.to_vec(),
            })
    }
}

/// Per-state label of every coordinate, built in the given order.
fn generalized_labels<T: Scalar>(
    spec: &GeneralizedLumpingSpec,
    crested: &CrestedSpec<T>,
    order: &[usize],
) -> Result<Vec<Vec<usize>>> {
    let poset = crested.poset();
    let index = crested.index();
    let n = poset.n();
    let mut labels = vec![vec![usize::MAX; n]; index.dim()];
    let mut checked: BTreeMap<(usize, Vec<usize>), ()> = BTreeMap::new();
    for &i in order {
        let ancestors = poset.above(i).to_vec();
        for x in 0..index.dim() {
            let key: Vec<usize> = ancestors.iter().map(|&j| labels[x][j - 1]).collect();
            let value = spec.lookup(i, &key)?;
            if !checked.contains_key(&(i, key.clone())) {
                if value.dim() != index.radices()[i - 1] {
                    return Err(Error::DimMismatch {
                        expected: index.radices()[i - 1],
                        found: value.dim(),
                    });
                }
                if let Some(witness) = lumping_violation(crested.factor(i), value)? {
                    return Err(Error::ValueNotLumping {
                        element: i,
                        key,
                        witness,
                    });
                }
                checked.insert((i, key), ());
            }
            labels[x][i - 1] = value.part_of(index.digit(x, i - 1));
        }
    }
    Ok(labels)
}

fn check_linear_extension(poset: &Poset, order: &[usize]) -> Result<()> {
    let mut seen = ElemSet::EMPTY;
    for &i in order {
        if i == 0 || i > poset.n() || seen.contains(i) || !poset.above(i).is_subset(seen) {
            return Err(Error::InvalidPartition {
                reason: format!("{order:?} is not a linear extension of the poset"),
            });
        }
        seen.insert(i);
    }
    if seen != poset.full() {
        return Err(Error::InvalidPartition {
            reason: format!("{order:?} does not list every element"),
        });
    }
    Ok(())
}

/// The generalized product of lumpings built along `order`, which must list
/// every element after all of its ancestors.
pub fn generalized_product_partition_with_order<T: Scalar>(
    spec: &GeneralizedLumpingSpec,
    crested: &CrestedSpec<T>,
    order: &[usize],
) -> Result<Partition> {
    check_linear_extension(crested.poset(), order)?;
    let labels = generalized_labels(spec, crested, order)?;
    Ok(Partition::from_labels(&labels))
}

/// The generalized product of lumpings, built along two different linear
/// extensions (which must agree) and verified against the crested product.
pub fn generalized_product_partition<T: Scalar>(
    spec: &GeneralizedLumpingSpec,
    crested: &CrestedSpec<T>,
) -> Result<Partition> {
    let poset = crested.poset();
    let order = poset.linear_extension();
    let partition = generalized_product_partition_with_order(spec, crested, &order)?;
    let mut alternative: Vec<usize> = (1..=poset.n()).collect();
    alternative.sort_by_key(|&i| (poset.above(i).len(), std::cmp::Reverse(i)));
    let other = generalized_product_partition_with_order(spec, crested, &alternative)?;
    if other != partition {
        return Err(Error::ConstructionMismatch(
            "generalized product depends on the build order".into(),
        ));
    }
    let p = crested_product(crested)?;
    if let Some(witness) = lumping_violation(&p, &partition)? {
        return Err(Error::ConstructionMismatch(format!(
            "generalized product of lumpings does not lump the crested product: {witness}"
        )));
    }
    Ok(partition)
}

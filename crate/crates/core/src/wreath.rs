//! Permutations, generalized wreath products acting on poset block
//! structures, orbit partitions and orbit lumpings.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::index::ProductIndex;
use crate::lumping::{lump, LumpedChain, Partition};
use crate::operator::MarkovOperator;
use crate::poset::Poset;
use crate::scalar::Scalar;

/// A bijection of `0..degree`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &v in &images {
            if v >= images.len() || seen[v] {
                return Err(Error::NotAPermutation(images));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// The cycle `a₀ → a₁ → … → a₀`.
    pub fn cycle(degree: usize, letters: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (0..degree).collect();
        for (k, &a) in letters.iter().enumerate() {
            if a >= degree {
                return Err(Error::IndexOutOfRange {
                    index: a,
                    bound: degree,
                });
            }
            images[a] = letters[(k + 1) % letters.len()];
        }
        Self::new(images)
    }

    pub fn transposition(degree: usize, a: usize, b: usize) -> Result<Self> {
        Self::cycle(degree, &[a, b])
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, a: usize) -> usize {
        self.images[a]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation {
            images: other.images.iter().map(|&a| self.images[a]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (a, &b) in self.images.iter().enumerate() {
            images[b] = a;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(a, &b)| a == b)
    }

    /// Every permutation of `0..degree` in lexicographic order.
    pub fn all(degree: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..degree).collect();
        loop {
            out.push(Permutation {
                images: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..degree).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..degree).rev().find(|&j| current[j] > current[i - 1]).expect("successor exists");
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

/// The state space `∏ X_i` of a poset block structure, with the ancestor lists
/// that key every wreath-product table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStructure {
    poset: Poset,
    index: ProductIndex,
    ancestors: Vec<Vec<usize>>,
}

impl BlockStructure {
    pub fn new(poset: Poset, radices: Vec<usize>) -> Result<Self> {
        if radices.len() != poset.n() {
            return Err(Error::DimMismatch {
                expected: poset.n(),
                found: radices.len(),
            });
        }
        let index = ProductIndex::new(radices)?;
        let ancestors = (1..=poset.n()).map(|i| poset.above(i).to_vec()).collect();
        Ok(BlockStructure {
            poset,
            index,
            ancestors,
        })
    }

    pub fn uniform(poset: Poset, q: usize) -> Result<Self> {
        let n = poset.n();
        Self::new(poset, vec![q; n])
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn index(&self) -> &ProductIndex {
        &self.index
    }

    pub fn n(&self) -> usize {
        self.poset.n()
    }

    pub fn dim(&self) -> usize {
        self.index.dim()
    }

    pub fn radix(&self, element: usize) -> usize {
        self.index.radices()[element - 1]
    }

    /// `A(i)` in increasing order.
    pub fn ancestors(&self, element: usize) -> &[usize] {
        &self.ancestors[element - 1]
    }

    /// The table key of `element` at state `x`: the coordinates of `x` on `A(i)`.
    pub fn key(&self, element: usize, x: usize) -> Vec<usize> {
        self.ancestors(element)
            .iter()
            .map(|&j| self.index.digit(x, j - 1))
            .collect()
    }

    /// Every possible key of `element`, in lexicographic order.
    pub fn keys(&self, element: usize) -> Vec<Vec<usize>> {
        let radices: Vec<usize> = self.ancestors(element).iter().map(|&j| self.radix(j)).collect();
        let mut keys = vec![Vec::new()];
        for r in radices {
            keys = keys
                .into_iter()
                .flat_map(|k| {
                    (0..r).map(move |v| {
                        let mut k = k.clone();
                        k.push(v);
                        k
                    })
                })
                .collect();
        }
        keys
    }

    pub fn key_count(&self, element: usize) -> usize {
        self.ancestors(element).iter().map(|&j| self.radix(j)).product()
    }

    /// `|F_I| = ∏ᵢ (qᵢ!)^{∏_{j∈A(i)} q_j}`.
    pub fn group_order(&self) -> BigUint {
        let mut order = BigUint::from(1u32);
        for i in 1..=self.n() {
            let factorial: BigUint = (1..=self.radix(i)).map(BigUint::from).product();
            order *= factorial.pow(self.key_count(i) as u32);
        }
        order
    }
}

/// An element of the generalized wreath product given by its tables
/// `fᵢ : X_{A(i)} → Sym(Xᵢ)`. Elements without a table act as the identity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WreathGenerator {
    tables: BTreeMap<usize, BTreeMap<Vec<usize>, Permutation>>,
}

impl WreathGenerator {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Sets `f_element(key) = perm`, creating the table if needed.
    pub fn set(mut self, element: usize, key: Vec<usize>, perm: Permutation) -> Self {
        self.tables.entry(element).or_default().insert(key, perm);
        self
    }

    /// A full table for `element`; keys absent from `table` must be supplied
    /// before the generator validates.
    pub fn with_table(mut self, element: usize, table: BTreeMap<Vec<usize>, Permutation>) -> Self {
        self.tables.insert(element, table);
        self
    }

    /// Every key of `element` mapped to the identity except those listed.
    pub fn with_sparse_table(
        self,
        structure: &BlockStructure,
        element: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, Permutation)>,
    ) -> Self {
        let mut table: BTreeMap<Vec<usize>, Permutation> = structure
            .keys(element)
            .into_iter()
            .map(|k| (k, Permutation::identity(structure.radix(element))))
            .collect();
        table.extend(entries);
        self.with_table(element, table)
    }

    pub fn tables(&self) -> &BTreeMap<usize, BTreeMap<Vec<usize>, Permutation>> {
        &self.tables
    }

    /// Checks that every listed table is total and made of permutations of the right degree.
    pub fn validate(&self, structure: &BlockStructure) -> Result<()> {
        for (&element, table) in &self.tables {
            if element == 0 || element > structure.n() {
                return Err(Error::IndexOutOfRange {
                    index: element,
                    bound: structure.n(),
                });
            }
            let q = structure.radix(element);
            for key in structure.keys(element) {
                let perm = table.get(&key).ok_or(Error::TableIncomplete {
                    element,
                    key: key.clone(),
                })?;
                if perm.degree() != q {
                    return Err(Error::DimMismatch {
                        expected: q,
                        found: perm.degree(),
                    });
                }
            }
        }
        Ok(())
    }

    /// `yᵢ = fᵢ(x_{A(i)}) xᵢ`, all lookups reading the original `x`.
    pub fn act(&self, structure: &BlockStructure, x: usize) -> Result<usize> {
        let index = structure.index();
        let mut y = x;
        for (&element, table) in &self.tables {
            let key = structure.key(element, x);
            let perm = table.get(&key).ok_or(Error::TableIncomplete { element, key })?;
            let k = element - 1;
            y = index.with_digit(y, k, perm.apply(index.digit(x, k)));
        }
        Ok(y)
    }

    pub fn act_tuple(&self, structure: &BlockStructure, x: &[usize]) -> Result<Vec<usize>> {
        let state = structure.index().encode(x)?;
        Ok(structure.index().decode(self.act(structure, state)?))
    }

    /// The action on all states as a permutation of `0..dim`.
    pub fn state_permutation(&self, structure: &BlockStructure) -> Result<Vec<usize>> {
        (0..structure.dim()).map(|x| self.act(structure, x)).collect()
    }
}

/// Generators for `Sym(q)` on the given letters: a transposition and a full cycle.
fn symmetric_generators(q: usize, letters: &[usize]) -> Vec<Permutation> {
    let mut out = Vec::new();
    if letters.len() >= 2 {
        out.push(Permutation::transposition(q, letters[0], letters[1]).expect("letters in range"));
    }
    if letters.len() >= 3 {
        out.push(Permutation::cycle(q, letters).expect("letters in range"));
    }
    out
}

/// Point-supported generators of the full generalized wreath product.
pub fn full_generators(structure: &BlockStructure) -> Vec<WreathGenerator> {
    stabilizer_generators_inner(structure, None)
}

/// Generators of the stabilizer of the state `x0`.
pub fn stabilizer_generators(structure: &BlockStructure, x0: usize) -> Result<Vec<WreathGenerator>> {
    if x0 >= structure.dim() {
        return Err(Error::IndexOutOfRange {
            index: x0,
            bound: structure.dim(),
        });
    }
    Ok(stabilizer_generators_inner(structure, Some(x0)))
}

fn stabilizer_generators_inner(structure: &BlockStructure, x0: Option<usize>) -> Vec<WreathGenerator> {
    let mut gens = Vec::new();
    for i in 1..=structure.n() {
        let q = structure.radix(i);
        let fixed_key = x0.map(|x| structure.key(i, x));
        for key in structure.keys(i) {
            let letters: Vec<usize> = match (&fixed_key, x0) {
                (Some(k), Some(x)) if *k == key => {
                    let fixed = structure.index().digit(x, i - 1);
                    (0..q).filter(|&a| a != fixed).collect()
                }
                _ => (0..q).collect(),
            };
            for perm in symmetric_generators(q, &letters) {
                gens.push(WreathGenerator::identity().with_sparse_table(
                    structure,
                    i,
                    [(key.clone(), perm)],
                ));
            }
        }
    }
    gens
}

/// Random generators: each picks one element and, per key, a uniformly random
/// permutation with probability 1/2 (identity otherwise).
pub fn random_generators<R: Rng + ?Sized>(
    structure: &BlockStructure,
    count: usize,
    rng: &mut R,
) -> Vec<WreathGenerator> {
    (0..count)
        .map(|_| {
            let element = rng.gen_range(1..=structure.n());
            let q = structure.radix(element);
            let mut entries: Vec<(Vec<usize>, Permutation)> = Vec::new();
            for k in structure.keys(element) {
                if rng.gen_bool(0.5) {
                    let mut images: Vec<usize> = (0..q).collect();
                    images.shuffle(rng);
                    entries.push((k, Permutation { images }));
                }
            }
            WreathGenerator::identity().with_sparse_table(structure, element, entries)
        })
        .collect()
}

/// An orbit partition together with the generators that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitPartition {
    pub partition: Partition,
    pub generators: Vec<WreathGenerator>,
}

/// Orbits of the group generated by `gens`, by breadth-first closure.
pub fn orbits(structure: &BlockStructure, gens: &[WreathGenerator]) -> Result<OrbitPartition> {
    let perms = gens
        .iter()
        .map(|g| {
            g.validate(structure)?;
            g.state_permutation(structure)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitPartition {
        partition: orbits_of_state_permutations(structure.dim(), &perms),
        generators: gens.to_vec(),
    })
}

/// Orbits of permutations of `0..dim` given as image vectors.
pub fn orbits_of_state_permutations(dim: usize, perms: &[Vec<usize>]) -> Partition {
    let mut label = vec![usize::MAX; dim];
    let mut next = 0;
    for start in 0..dim {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for p in perms {
                let y = p[x];
                if label[y] == usize::MAX {
                    label[y] = next;
                    queue.push_back(y);
                }
            }
        }
        next += 1;
    }
    Partition::from_labels(&label)
}

/// The first `(generator, x, y)` with `p(gx, gy) ≠ p(x, y)`, if any.
pub fn invariance_violation<T: Scalar>(
    p: &MarkovOperator<T>,
    structure: &BlockStructure,
    gens: &[WreathGenerator],
) -> Result<Option<(usize, usize, usize)>> {
    if p.dim() != structure.dim() {
        return Err(Error::DimMismatch {
            expected: structure.dim(),
            found: p.dim(),
        });
    }
    for (k, g) in gens.iter().enumerate() {
        g.validate(structure)?;
        let image = g.state_permutation(structure)?;
        for x in 0..p.dim() {
            for y in 0..p.dim() {
                if !p.entry(image[x], image[y]).approx_eq(p.entry(x, y)) {
                    return Ok(Some((k, x, y)));
                }
            }
        }
    }
    Ok(None)
}

pub fn check_invariance<T: Scalar>(
    p: &MarkovOperator<T>,
    structure: &BlockStructure,
    gens: &[WreathGenerator],
) -> Result<bool> {
    Ok(invariance_violation(p, structure, gens)?.is_none())
}

/// Lumps `P` by the orbits of an invariant group.
pub fn orbit_lump<T: Scalar>(
    p: &MarkovOperator<T>,
    structure: &BlockStructure,
    gens: &[WreathGenerator],
) -> Result<LumpedChain<T>> {
    if let Some((generator, x, y)) = invariance_violation(p, structure, gens)? {
        return Err(Error::NotInvariant { generator, x, y });
    }
    let orbit = orbits(structure, gens)?;
    lump(p, &orbit.partition).map_err(|e| match e {
        Error::NotLumpable { witness } => Error::ConstructionMismatch(format!(
            "orbit partition of an invariant group is not a lumping: {witness}"
        )),
        other => other,
    })
}

//! Finite posets on `1..=n` and the combinatorics derived from them:
//! ancestral and hereditary sets, the family of ancestral subsets,
//! antichains, fibered subsets and reduced posets.
//!
//! Elements are 1-based. Subsets are bitmasks ([`ElemSet`]), so `n <= 64`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of elements for exponential enumerations (`2^20` subsets).
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// A subset of `1..=n` stored as a bitmask (bit `i - 1` holds element `i`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElemSet(u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << n) - 1)
        }
    }

    pub fn from_bits(bits: u64) -> Self {
        ElemSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        ElemSet(1u64 << (i - 1))
    }

    pub fn contains(self, i: usize) -> bool {
        (1..=64).contains(&i) && self.0 & (1u64 << (i - 1)) != 0
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << (i - 1);
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << (i - 1));
    }

    pub fn with(self, i: usize) -> Self {
        ElemSet(self.0 | (1u64 << (i - 1)))
    }

    pub fn without(self, i: usize) -> Self {
        ElemSet(self.0 & !(1u64 << (i - 1)))
    }

    pub fn union(self, other: Self) -> Self {
        ElemSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ElemSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ElemSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Elements in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |b| bits & (1u64 << b) != 0).map(|b| b + 1)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for ElemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElemSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Display for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite partial order on `1..=n`.
///
/// `above[i-1]` is the strict up-set `A(i)` and `below[i-1]` the strict
/// down-set `H(i)`. The cover list is the transitive reduction of the order.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    above: Vec<ElemSet>,
    below: Vec<ElemSet>,
    covers: Vec<(usize, usize)>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Poset")
            .field("n", &self.n)
            .field("covers", &self.covers)
            .finish()
    }
}

impl Poset {
    /// Validates a relation matrix where `relation[i][j]` means `i+1 ⪯ j+1`.
    pub fn from_relation(relation: &[Vec<bool>]) -> Result<Self> {
        let n = relation.len();
        if n == 0 || n > 64 {
            return Err(Error::PosetSize { n });
        }
        for (i, row) in relation.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            if !row[i] {
                return Err(Error::ReflexivityViolation { element: i + 1 });
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if relation[i][j] && relation[j][i] {
                    return Err(Error::AntisymmetryViolation { a: i + 1, b: j + 1 });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !relation[a][b] {
                    continue;
                }
                for c in 0..n {
                    if relation[b][c] && !relation[a][c] {
                        return Err(Error::TransitivityViolation {
                            a: a + 1,
                            b: b + 1,
                            c: c + 1,
                        });
                    }
                }
            }
        }
        let mut above = vec![ElemSet::EMPTY; n];
        let mut below = vec![ElemSet::EMPTY; n];
        for i in 0..n {
            for j in 0..n {
                if i != j && relation[i][j] {
                    above[i].insert(j + 1);
                    below[j].insert(i + 1);
                }
            }
        }
        Ok(Self::from_closures(n, above, below))
    }

    /// Builds a poset from pairs `(a, b)` meaning `b ⊲ a`. Every listed pair
    /// must be a cover of the generated order.
    pub fn from_covers(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::PosetSize { n });
        }
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(Error::IndexOutOfRange { index: v, bound: n });
                }
            }
            if a == b {
                return Err(Error::AntisymmetryViolation { a, b });
            }
            rel[b - 1][a - 1] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if rel[i][k] {
                    for j in 0..n {
                        if rel[k][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
        }
        let poset = Self::from_relation(&rel)?;
        let redundant: Vec<(usize, usize)> = pairs
            .iter()
            .copied()
            .filter(|p| !poset.covers.contains(p))
            .collect();
        if !redundant.is_empty() {
            return Err(Error::RedundantCover {
                pairs: redundant,
                reduction: poset.covers.clone(),
            });
        }
        Ok(poset)
    }

    fn from_closures(n: usize, above: Vec<ElemSet>, below: Vec<ElemSet>) -> Self {
        let mut covers = Vec::new();
        for upper in 1..=n {
            for lower in below[upper - 1].iter() {
                // lower ⊲ upper iff nothing sits strictly between them
                let between = above[lower - 1].intersection(below[upper - 1]);
                if between.is_empty() {
                    covers.push((upper, lower));
                }
            }
        }
        Poset {
            n,
            above,
            below,
            covers,
        }
    }

    /// The antichain (identity relation) on `n` elements.
    pub fn antichain(n: usize) -> Result<Self> {
        Self::from_covers(n, &[])
    }

    /// The chain `1 ≻ 2 ≻ … ≻ n`.
    pub fn chain(n: usize) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
        Self::from_covers(n, &pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> ElemSet {
        ElemSet::full(self.n)
    }

    /// Cover pairs `(upper, lower)` with `lower ⊲ upper`.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        i == j || self.above[i - 1].contains(j)
    }

    /// `i ≺ j`.
    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.above[i - 1].contains(j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    fn check_element(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            Err(Error::IndexOutOfRange {
                index: i,
                bound: self.n,
            })
        } else {
            Ok(())
        }
    }

    fn check_set(&self, set: ElemSet) -> Result<()> {
        if set.is_subset(self.full()) {
            Ok(())
        } else {
            let bad = set.difference(self.full()).iter().next().unwrap_or(0);
            Err(Error::IndexOutOfRange {
                index: bad,
                bound: self.n,
            })
        }
    }

    /// `A(i)`, panicking on an out-of-range element.
    pub fn above(&self, i: usize) -> ElemSet {
        self.above[i - 1]
    }

    /// `H(i)`, panicking on an out-of-range element.
    pub fn below(&self, i: usize) -> ElemSet {
        self.below[i - 1]
    }

    /// `A(i) = {j : j ≻ i}`.
    pub fn ancestral_of(&self, i: usize) -> Result<ElemSet> {
        self.check_element(i)?;
        Ok(self.above(i))
    }

    /// `A[i] = A(i) ∪ {i}`.
    pub fn ancestral_closed_of(&self, i: usize) -> Result<ElemSet> {
        self.check_element(i)?;
        Ok(self.above(i).with(i))
    }

    /// `H(i) = {j : j ≺ i}`.
    pub fn hereditary_of(&self, i: usize) -> Result<ElemSet> {
        self.check_element(i)?;
        Ok(self.below(i))
    }

    /// `H[i] = H(i) ∪ {i}`.
    pub fn hereditary_closed_of(&self, i: usize) -> Result<ElemSet> {
        self.check_element(i)?;
        Ok(self.below(i).with(i))
    }

    pub fn ancestral_of_set(&self, set: ElemSet) -> Result<ElemSet> {
        self.check_set(set)?;
        Ok(set
            .iter()
            .fold(ElemSet::EMPTY, |acc, j| acc.union(self.above(j))))
    }

    pub fn ancestral_closed_of_set(&self, set: ElemSet) -> Result<ElemSet> {
        Ok(self.ancestral_of_set(set)?.union(set))
    }

    pub fn hereditary_of_set(&self, set: ElemSet) -> Result<ElemSet> {
        self.check_set(set)?;
        Ok(set
            .iter()
            .fold(ElemSet::EMPTY, |acc, j| acc.union(self.below(j))))
    }

    pub fn hereditary_closed_of_set(&self, set: ElemSet) -> Result<ElemSet> {
        Ok(self.hereditary_of_set(set)?.union(set))
    }

    /// Whether `set` is upward closed.
    pub fn is_ancestral(&self, set: ElemSet) -> bool {
        set.iter().all(|j| self.above(j).is_subset(set))
    }

    pub fn is_antichain(&self, set: ElemSet) -> bool {
        set.iter()
            .all(|i| self.above(i).intersection(set).is_empty())
    }

    /// Elements of `set` with nothing of `set` strictly above them.
    pub fn maximal_in(&self, set: ElemSet) -> ElemSet {
        set.iter()
            .filter(|&m| self.above(m).intersection(set).is_empty())
            .collect()
    }

    /// An ordering of `1..=n` in which every element follows all of its
    /// ancestors.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (1..=self.n).collect();
        order.sort_by_key(|&i| (self.above(i).len(), i));
        order
    }

    /// Every upward-closed subset, with the reverse-inclusion order.
    pub fn ancestral_subsets(&self) -> Result<AncestralFamily> {
        self.ancestral_subsets_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn ancestral_subsets_with_cap(&self, cap: usize) -> Result<AncestralFamily> {
        if self.n > cap {
            return Err(Error::SizeLimit { n: self.n, cap });
        }
        let order = self.linear_extension();
        let mut sets = Vec::new();
        self.collect_upsets(&order, 0, ElemSet::EMPTY, &mut sets);
        Ok(AncestralFamily::new(self.n, sets))
    }

    fn collect_upsets(&self, order: &[usize], k: usize, current: ElemSet, out: &mut Vec<ElemSet>) {
        if k == order.len() {
            out.push(current);
            return;
        }
        let e = order[k];
        self.collect_upsets(order, k + 1, current, out);
        if self.above(e).is_subset(current) {
            self.collect_upsets(order, k + 1, current.with(e), out);
        }
    }

    /// All antichains (including the empty one), ordered by size and then
    /// lexicographically.
    pub fn antichains(&self) -> Result<Vec<ElemSet>> {
        self.antichains_with_cap(DEFAULT_ENUMERATION_CAP)
    }

    pub fn antichains_with_cap(&self, cap: usize) -> Result<Vec<ElemSet>> {
        if self.n > cap {
            return Err(Error::SizeLimit { n: self.n, cap });
        }
        let mut out = Vec::new();
        self.collect_antichains(1, ElemSet::EMPTY, &mut out);
        out.sort_by_key(|s| (s.len(), s.to_vec()));
        Ok(out)
    }

    fn collect_antichains(&self, next: usize, current: ElemSet, out: &mut Vec<ElemSet>) {
        if next > self.n {
            out.push(current);
            return;
        }
        self.collect_antichains(next + 1, current, out);
        let related = self.above(next).union(self.below(next));
        if related.intersection(current).is_empty() {
            self.collect_antichains(next + 1, current.with(next), out);
        }
    }

    /// Decides whether `removed` is fibered over some base set, returning the
    /// witness or the reason it is not.
    pub fn fibered_over(&self, removed: ElemSet) -> Result<Fibering> {
        self.check_set(removed)?;
        let mut base_of = BTreeMap::new();
        let mut chains = BTreeMap::new();
        for r in removed.iter() {
            let outside = self.below(r).difference(removed);
            if outside.is_empty() {
                return Ok(Fibering::NotFibered(NotFiberedReason::NoDescendantOutside { r }));
            }
            let maximal = self.maximal_in(outside);
            if maximal.len() != 1 {
                return Ok(Fibering::NotFibered(NotFiberedReason::MultipleMaximal {
                    r,
                    candidates: maximal.to_vec(),
                }));
            }
            let s = maximal.iter().next().expect("one maximal element");
            // unique maximal element of a finite set is its maximum
            debug_assert!(outside.without(s).is_subset(self.below(s)));
            match self.cover_chain_through(r, s, removed) {
                Some(chain) => {
                    base_of.insert(r, s);
                    chains.insert(r, chain);
                }
                None => {
                    return Ok(Fibering::NotFibered(NotFiberedReason::NoCoverChain { r, s }));
                }
            }
        }
        let mut fibers: BTreeMap<usize, ElemSet> = BTreeMap::new();
        for (&r, &s) in &base_of {
            fibers.entry(s).or_default().insert(r);
        }
        Ok(Fibering::Fibered(FiberedWitness {
            base: fibers.keys().copied().collect(),
            base_of,
            fibers,
            chains,
        }))
    }

    /// Depth-first descent along covers from `r` to `s` whose interior stays in `through`.
    fn cover_chain_through(&self, r: usize, s: usize, through: ElemSet) -> Option<Vec<usize>> {
        let mut path = vec![r];
        if self.descend(r, s, through, &mut path) {
            Some(path)
        } else {
            None
        }
    }

    fn descend(&self, at: usize, target: usize, through: ElemSet, path: &mut Vec<usize>) -> bool {
        for &(upper, lower) in &self.covers {
            if upper != at {
                continue;
            }
            if lower == target {
                path.push(lower);
                return true;
            }
            if through.contains(lower) && self.below(lower).contains(target) {
                path.push(lower);
                if self.descend(lower, target, through, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }

    /// The poset induced on the complement of `removed`, relabelled to
    /// `1..=|Ĩ|` in increasing order of the original labels.
    pub fn reduced(&self, removed: ElemSet) -> Result<ReducedPoset> {
        self.check_set(removed)?;
        let kept: Vec<usize> = self.full().difference(removed).to_vec();
        if kept.is_empty() {
            return Err(Error::EmptyResult);
        }
        let m = kept.len();
        let mut rel = vec![vec![false; m]; m];
        for (a, &i) in kept.iter().enumerate() {
            for (b, &j) in kept.iter().enumerate() {
                rel[a][b] = self.leq(i, j);
            }
        }
        Ok(ReducedPoset {
            poset: Poset::from_relation(&rel)?,
            labels: kept,
        })
    }
}

/// A poset obtained by deleting elements, with the map back to the original labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedPoset {
    pub poset: Poset,
    /// `labels[k - 1]` is the original label of new element `k`.
    pub labels: Vec<usize>,
}

impl ReducedPoset {
    pub fn original_label(&self, k: usize) -> usize {
        self.labels[k - 1]
    }

    pub fn new_label(&self, original: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == original).map(|k| k + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberedWitness {
    /// The base set `S`, sorted.
    pub base: Vec<usize>,
    /// `r ↦ s(r)`.
    pub base_of: BTreeMap<usize, usize>,
    /// `s ↦ R_s`.
    pub fibers: BTreeMap<usize, ElemSet>,
    /// One descending cover chain `r, …, s(r)` per removed element.
    pub chains: BTreeMap<usize, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotFiberedReason {
    /// `H(r) \ R` is empty.
    NoDescendantOutside { r: usize },
    /// `H(r) \ R` has several maximal elements.
    MultipleMaximal { r: usize, candidates: Vec<usize> },
    NoCoverChain { r: usize, s: usize },
}

impl fmt::Display for NotFiberedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotFiberedReason::NoDescendantOutside { r } => {
                write!(f, "element {r} has no descendant outside the removed set")
            }
            NotFiberedReason::MultipleMaximal { r, candidates } => write!(
                f,
                "element {r} has several maximal descendants outside the removed set: {candidates:?}"
            ),
            NotFiberedReason::NoCoverChain { r, s } => {
                write!(f, "no cover chain from {r} to {s} through the removed set")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fibering {
    Fibered(FiberedWitness),
    NotFibered(NotFiberedReason),
}

impl Fibering {
    pub fn is_fibered(&self) -> bool {
        matches!(self, Fibering::Fibered(_))
    }
}

/// The ancestral subsets of a poset under reverse inclusion
/// (`A₁ ⪯ A₂` iff `A₁ ⊇ A₂`), so the full set is the bottom and `∅` the top.
///
/// Sets are stored largest first, which is a topological order from the full set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AncestralFamily {
    n: usize,
    sets: Vec<ElemSet>,
    lookup: HashMap<ElemSet, usize>,
    /// `(i, j)` with `sets[i] ⊲ sets[j]`.
    covers: Vec<(usize, usize)>,
    children: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
}

impl AncestralFamily {
    fn new(n: usize, mut sets: Vec<ElemSet>) -> Self {
        sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.to_vec().cmp(&b.to_vec())));
        let lookup: HashMap<ElemSet, usize> = sets.iter().enumerate().map(|(k, s)| (*s, k)).collect();
        let mut children = vec![Vec::new(); sets.len()];
        let mut parents = vec![Vec::new(); sets.len()];
        let mut covers = Vec::new();
        // In the lattice of up-sets, A' ⊲ A exactly when A = A' minus one element.
        for (i, &a) in sets.iter().enumerate() {
            for e in a.iter() {
                if let Some(&j) = lookup.get(&a.without(e)) {
                    covers.push((i, j));
                    children[i].push(j);
                    parents[j].push(i);
                }
            }
        }
        for list in children.iter_mut().chain(parents.iter_mut()) {
            list.sort_unstable();
        }
        covers.sort_unstable();
        AncestralFamily {
            n,
            sets,
            lookup,
            covers,
            children,
            parents,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[ElemSet] {
        &self.sets
    }

    pub fn set(&self, idx: usize) -> ElemSet {
        self.sets[idx]
    }

    pub fn index_of(&self, set: ElemSet) -> Option<usize> {
        self.lookup.get(&set).copied()
    }

    pub fn contains(&self, set: ElemSet) -> bool {
        self.lookup.contains_key(&set)
    }

    pub fn full_index(&self) -> usize {
        0
    }

    pub fn empty_index(&self) -> usize {
        self.sets.len() - 1
    }

    /// `A₁ ⪯ A₂` in the family order.
    pub fn precedes(&self, a: ElemSet, b: ElemSet) -> bool {
        b.is_subset(a)
    }

    /// Cover pairs `(i, j)` of family indices with `sets[i] ⊲ sets[j]`.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Indices `L` with `sets[idx] ⊲ L`.
    pub fn children(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    /// Indices `J` with `J ⊲ sets[idx]`.
    pub fn parents(&self, idx: usize) -> &[usize] {
        &self.parents[idx]
    }

    /// Every cover chain `from = C₀ ⊲ C₁ ⊲ … ⊲ C_k = to`, as lists of family indices.
    pub fn maximal_chains(&self, from: ElemSet, to: ElemSet) -> Result<Vec<Vec<usize>>> {
        let unreachable = || Error::Unreachable {
            from: from.to_string(),
            to: to.to_string(),
        };
        let start = self.index_of(from).ok_or_else(unreachable)?;
        let end = self.index_of(to).ok_or_else(unreachable)?;
        if !self.precedes(from, to) {
            return Err(unreachable());
        }
        let mut out = Vec::new();
        let mut path = vec![start];
        self.walk_chains(end, &mut path, &mut out);
        Ok(out)
    }

    fn walk_chains(&self, end: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let at = *path.last().expect("non-empty path");
        if at == end {
            out.push(path.clone());
            return;
        }
        let target = self.sets[end];
        for &c in &self.children[at] {
            if target.is_subset(self.sets[c]) {
                path.push(c);
                self.walk_chains(end, path, out);
                path.pop();
            }
        }
    }
}

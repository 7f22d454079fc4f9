//! Generalized crested products and the Insect chain.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::index::ProductIndex;
use crate::matrix::Matrix;
use crate::operator::MarkovOperator;
use crate::poset::{AncestralFamily, ElemSet, Poset};
use crate::scalar::{pow_usize, sum, Scalar};

/// A poset together with one factor chain and one weight per element.
#[derive(Debug, Clone, PartialEq)]
pub struct CrestedSpec<T> {
    poset: Poset,
    factors: Vec<MarkovOperator<T>>,
    weights: Vec<T>,
}

impl<T: Scalar> CrestedSpec<T> {
    pub fn new(poset: Poset, factors: Vec<MarkovOperator<T>>, weights: Vec<T>) -> Result<Self> {
        let n = poset.n();
        if factors.len() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: factors.len(),
            });
        }
        if weights.len() != n {
            return Err(Error::DimMismatch {
                expected: n,
                found: weights.len(),
            });
        }
        if let Some(f) = factors.iter().find(|f| f.dim() < 2) {
            return Err(Error::InvalidRadix { radix: f.dim() });
        }
        if let Some(index) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::NonPositiveWeight { index });
        }
        let total = sum(&weights);
        if !total.approx_eq(&T::one()) {
            return Err(Error::WeightSumMismatch {
                sum: total.to_repr(),
            });
        }
        Ok(CrestedSpec {
            poset,
            factors,
            weights,
        })
    }

    /// Every factor `U_q`.
    pub fn uniform_factors(poset: Poset, sizes: &[usize], weights: Vec<T>) -> Result<Self> {
        let factors = sizes
            .iter()
            .map(|&q| MarkovOperator::uniform(q))
            .collect::<Result<Vec<_>>>()?;
        Self::new(poset, factors, weights)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn factors(&self) -> &[MarkovOperator<T>] {
        &self.factors
    }

    /// Factor of element `i` (1-based).
    pub fn factor(&self, i: usize) -> &MarkovOperator<T> {
        &self.factors[i - 1]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.dim()).collect()
    }

    pub fn index(&self) -> ProductIndex {
        ProductIndex::new(self.sizes()).expect("factor sizes validated at construction")
    }
}

/// `Σᵢ pᵢ⁰ · (Pᵢ at slot i, U on H(i), I elsewhere)`.
pub fn crested_product<T: Scalar>(spec: &CrestedSpec<T>) -> Result<MarkovOperator<T>> {
    let poset = spec.poset();
    let n = poset.n();
    let sizes = spec.sizes();
    let mut terms = Vec::with_capacity(n);
    for i in 1..=n {
        let below = poset.below(i);
        let slots = (1..=n)
            .map(|j| {
                if j == i {
                    Ok(spec.factor(i).clone())
                } else if below.contains(j) {
                    MarkovOperator::uniform(sizes[j - 1])
                } else {
                    MarkovOperator::identity(sizes[j - 1])
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&MarkovOperator<T>> = slots.iter().collect();
        terms.push(MarkovOperator::kron(&refs)?);
    }
    let mut op = MarkovOperator::convex_combination(spec.weights(), &terms)?;
    op.set_index(Some(spec.index()))?;
    Ok(op)
}

/// Pointwise `p(x,y) = Σᵢ pᵢ⁰ pᵢ(xᵢ,yᵢ) ∏_{j∈H(i)} 1/qⱼ ∏_{j∉H[i]} δ(xⱼ,yⱼ)`.
pub fn crested_entry<T: Scalar>(spec: &CrestedSpec<T>, x: &[usize], y: &[usize]) -> Result<T> {
    let index = spec.index();
    index.encode(x)?;
    index.encode(y)?;
    let poset = spec.poset();
    let mut total = T::zero();
    for i in 1..=poset.n() {
        let below = poset.below(i);
        let agrees = (1..=poset.n())
            .filter(|&j| j != i && !below.contains(j))
            .all(|j| x[j - 1] == y[j - 1]);
        if !agrees {
            continue;
        }
        let mut term = spec.weights()[i - 1].clone()
            * spec.factor(i).entry(x[i - 1], y[i - 1]).clone();
        for j in below.iter() {
            term = term / T::from_usize(index.radices()[j - 1]);
        }
        total = total + term;
    }
    Ok(total)
}

/// The coefficients `α_{A',A}` over covers of the ancestral family and the
/// resulting weights `p_A`.
#[derive(Debug, Clone, PartialEq)]
pub struct InsectCoefficients<T> {
    family: AncestralFamily,
    /// `α_{A',·}` for each family index `A'` (the value is shared by all covers out of `A'`).
    node_alpha: Vec<T>,
    /// `p_A` for each family index; the entry for the full set is zero and unused.
    weights: Vec<T>,
}

impl<T: Scalar> InsectCoefficients<T> {
    pub fn family(&self) -> &AncestralFamily {
        &self.family
    }

    /// `α_{A',A}` when `A' ⊲ A` in the ancestral family.
    pub fn alpha(&self, from: ElemSet, to: ElemSet) -> Option<&T> {
        let i = self.family.index_of(from)?;
        let j = self.family.index_of(to)?;
        self.family.children(i).contains(&j).then(|| &self.node_alpha[i])
    }

    /// All `(A', A, α_{A',A})` in family cover order.
    pub fn alphas(&self) -> Vec<(ElemSet, ElemSet, T)> {
        self.family
            .covers()
            .iter()
            .map(|&(i, j)| (self.family.set(i), self.family.set(j), self.node_alpha[i].clone()))
            .collect()
    }

    /// `p_A` for `A ≠ I`.
    pub fn weight(&self, set: ElemSet) -> Option<&T> {
        let k = self.family.index_of(set)?;
        (k != self.family.full_index()).then(|| &self.weights[k])
    }

    /// `(A, p_A)` for every `A ≠ I`, largest sets first.
    pub fn weights(&self) -> Vec<(ElemSet, T)> {
        (0..self.family.len())
            .filter(|&k| k != self.family.full_index())
            .map(|k| (self.family.set(k), self.weights[k].clone()))
            .collect()
    }
}

fn check_size(q: usize) -> Result<()> {
    if q < 2 {
        Err(Error::InvalidRadix { radix: q })
    } else {
        Ok(())
    }
}

/// The common factor size, rejecting unequal sizes.
pub fn common_size(sizes: &[usize]) -> Result<usize> {
    let q = *sizes.first().ok_or(Error::EmptySequence)?;
    if sizes.iter().any(|&s| s != q) {
        return Err(Error::UnequalFactorSizes);
    }
    check_size(q)?;
    Ok(q)
}

pub fn insect_coefficients<T: Scalar>(poset: &Poset, q: usize) -> Result<InsectCoefficients<T>> {
    check_size(q)?;
    let family = poset.ancestral_subsets()?;
    let len = family.len();
    let full = family.full_index();
    let qs = T::from_usize(q);
    let mut node_alpha = vec![T::zero(); len];
    // family order is by decreasing size, hence topological from the full set
    for a in 0..len {
        let children = family.children(a);
        if children.is_empty() {
            continue;
        }
        let parents = family.parents(a);
        let n_children = T::from_usize(children.len());
        let special = parents.len() == 1 && parents[0] == full && node_alpha[full].is_one();
        let denominator = if special {
            qs.clone() + n_children
        } else {
            let incoming = parents
                .iter()
                .fold(T::zero(), |acc, &j| acc + node_alpha[j].clone());
            T::from_usize(parents.len()) * qs.clone() + n_children - qs.clone() * incoming
        };
        if !denominator.is_positive() {
            let to = family.set(children[0]);
            return Err(Error::DegenerateDenominator {
                from: family.set(a).to_string(),
                to: to.to_string(),
                value: denominator.to_repr(),
            });
        }
        node_alpha[a] = T::one() / denominator;
    }
    // sum over maximal chains from the full set of the products of α along the chain
    let mut path_sum = vec![T::zero(); len];
    path_sum[full] = T::one();
    for a in 0..len {
        if path_sum[a].is_zero() {
            continue;
        }
        let out = path_sum[a].clone() * node_alpha[a].clone();
        for &c in family.children(a) {
            path_sum[c] = path_sum[c].clone() + out.clone();
        }
    }
    let weights = (0..len)
        .map(|a| {
            if a == full {
                T::zero()
            } else {
                let leaving = T::from_usize(family.children(a).len()) * node_alpha[a].clone();
                path_sum[a].clone() * (T::one() - leaving)
            }
        })
        .collect();
    Ok(InsectCoefficients {
        family,
        node_alpha,
        weights,
    })
}

/// `Σ_{A≠I} p_A (⊗_{j∈A} I) ⊗ (⊗_{j∉A} U)` on `X^n`, `|X| = q`.
pub fn insect_operator<T: Scalar>(poset: &Poset, q: usize) -> Result<MarkovOperator<T>> {
    let coefficients = insect_coefficients::<T>(poset, q)?;
    insect_operator_from(poset, q, &coefficients)
}

pub fn insect_operator_from<T: Scalar>(
    poset: &Poset,
    q: usize,
    coefficients: &InsectCoefficients<T>,
) -> Result<MarkovOperator<T>> {
    let n = poset.n();
    let index = ProductIndex::uniform(q, n)?;
    let dim = index.dim();
    if dim > crate::operator::DEFAULT_KRON_CAP {
        return Err(Error::Overflow {
            dim,
            cap: crate::operator::DEFAULT_KRON_CAP,
        });
    }
    // term for A: p_A / q^{n-|A|}, contributed whenever x and y agree on A
    let terms: Vec<(ElemSet, T)> = coefficients
        .weights()
        .into_iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(a, w)| (a, w / pow_usize::<T>(q, n - a.len())))
        .collect();
    let mut cache: HashMap<ElemSet, T> = HashMap::new();
    let digits: Vec<Vec<usize>> = (0..dim).map(|x| index.decode(x)).collect();
    let matrix = Matrix::from_fn(dim, dim, |x, y| {
        let agreement: ElemSet = (1..=n).filter(|&j| digits[x][j - 1] == digits[y][j - 1]).collect();
        cache
            .entry(agreement)
            .or_insert_with(|| {
                terms
                    .iter()
                    .filter(|(a, _)| a.is_subset(agreement))
                    .fold(T::zero(), |acc, (_, t)| acc + t.clone())
            })
            .clone()
    });
    MarkovOperator::with_index(matrix, index)
}

/// Insect operator for explicit factor sizes, which must all agree.
pub fn insect_operator_sized<T: Scalar>(poset: &Poset, sizes: &[usize]) -> Result<MarkovOperator<T>> {
    if sizes.len() != poset.n() {
        return Err(Error::DimMismatch {
            expected: poset.n(),
            found: sizes.len(),
        });
    }
    insect_operator(poset, common_size(sizes)?)
}

/// The largest ancestral subset on which `x` and `y` agree.
pub fn agreement_ancestral(poset: &Poset, x: &[usize], y: &[usize]) -> ElemSet {
    let agreement: ElemSet = (1..=poset.n()).filter(|&j| x[j - 1] == y[j - 1]).collect();
    agreement
        .iter()
        .filter(|&j| poset.above(j).is_subset(agreement))
        .collect()
}

/// `d_I(x,y) = n - max{|A| : A ancestral, x and y agree on A}`.
pub fn insect_distance(poset: &Poset, x: &[usize], y: &[usize]) -> usize {
    poset.n() - agreement_ancestral(poset, x, y).len()
}

/// `α_j = (q^j - 1)/(q^{j+1} - 1)` for `1 ≤ j < n`, with `α_0 = 1` and `α_n = 0`.
pub fn tree_alpha<T: Scalar>(q: usize, n: usize, j: usize) -> T {
    if j == 0 {
        T::one()
    } else if j >= n {
        T::zero()
    } else {
        (pow_usize::<T>(q, j) - T::one()) / (pow_usize::<T>(q, j + 1) - T::one())
    }
}

/// Transition probability between two leaves at distance `j` on the depth-`n`
/// `q`-ary tree: `Σ_{i=max(j,1)}^{n} q^{-i} α₁⋯α_{i-1} (1 - α_i)`.
pub fn tree_insect_entry<T: Scalar>(q: usize, n: usize, j: usize) -> T {
    let mut total = T::zero();
    let mut prefix = T::one();
    for i in 1..=n {
        if i >= j.max(1) {
            let term = prefix.clone() * (T::one() - tree_alpha::<T>(q, n, i)) / pow_usize::<T>(q, i);
            total = total + term;
        }
        prefix = prefix * tree_alpha::<T>(q, n, i);
    }
    total
}

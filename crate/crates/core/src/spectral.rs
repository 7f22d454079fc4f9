//! Spectra, eigenfunction lifting and projection, and closed forms for the
//! Insect chain (rooted-tree spectrum, spherical eigenfunctions, antichain
//! bookkeeping).

use crate::error::{Error, Result};
use crate::lumping::{lump, lumped_measure, LumpedChain, Partition};
use crate::operator::{MarkovOperator, Measure};
use crate::poset::{ElemSet, Poset};
use crate::scalar::{pow_usize, Scalar};
use crate::wreath::{orbit_lump, orbits, BlockStructure, WreathGenerator};
use crate::Rational;

/// Default tolerance for grouping numerically equal eigenvalues.
pub const DEFAULT_GROUPING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvalue {
    pub value: f64,
    /// The exact value, when known in closed form.
    pub exact: Option<Rational>,
    pub multiplicity: usize,
    pub label: Option<String>,
}

/// A multiset of real eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Eigenvalue>,
    /// One eigenvector per eigenvalue counted with multiplicity, in descending order.
    eigenvectors: Option<Vec<Vec<f64>>>,
}

impl Spectrum {
    /// Groups values lying within `tol` of the largest member of their group.
    pub fn from_values(mut values: Vec<f64>, tol: f64) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for v in values {
            match groups.last_mut() {
                Some(g) if (g[0] - v).abs() <= tol => g.push(v),
                _ => groups.push(vec![v]),
            }
        }
        let eigenvalues = groups
            .into_iter()
            .map(|g| Eigenvalue {
                value: g.iter().sum::<f64>() / g.len() as f64,
                exact: None,
                multiplicity: g.len(),
                label: None,
            })
            .collect();
        Spectrum {
            eigenvalues,
            eigenvectors: None,
        }
    }

    /// Exact eigenvalues with multiplicities and optional labels.
    pub fn from_exact(mut entries: Vec<(Rational, usize, Option<String>)>) -> Self {
        entries.sort_by(|a, b| b.0.cmp(&a.0));
        let eigenvalues = entries
            .into_iter()
            .map(|(v, m, label)| Eigenvalue {
                value: v.to_f64(),
                exact: Some(v),
                multiplicity: m,
                label,
            })
            .collect();
        Spectrum {
            eigenvalues,
            eigenvectors: None,
        }
    }

    pub fn from_eigenvalues(eigenvalues: Vec<Eigenvalue>) -> Self {
        Spectrum {
            eigenvalues,
            eigenvectors: None,
        }
    }

    pub fn with_eigenvectors(mut self, vectors: Vec<Vec<f64>>) -> Self {
        self.eigenvectors = Some(vectors);
        self
    }

    pub fn eigenvalues(&self) -> &[Eigenvalue] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> Option<&[Vec<f64>]> {
        self.eigenvectors.as_deref()
    }

    /// Sum of multiplicities.
    pub fn dim(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.multiplicity).sum()
    }

    pub fn distinct_count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `(value, multiplicity)` pairs, descending.
    pub fn multiplicities(&self) -> Vec<(f64, usize)> {
        self.eigenvalues
            .iter()
            .map(|e| (e.value, e.multiplicity))
            .collect()
    }

    /// Every eigenvalue repeated by multiplicity, descending.
    pub fn values(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
            .collect()
    }

    /// Whether every eigenvalue of `sub` can be matched to a distinct
    /// eigenvalue of `self` within `tol`.
    pub fn contains_multiset(&self, sub: &Spectrum, tol: f64) -> bool {
        let mine = self.values();
        let mut used = vec![false; mine.len()];
        for v in sub.values() {
            match (0..mine.len()).find(|&k| !used[k] && (mine[k] - v).abs() <= tol) {
                Some(k) => used[k] = true,
                None => return false,
            }
        }
        true
    }

    /// Equal as multisets within `tol`.
    pub fn matches(&self, other: &Spectrum, tol: f64) -> bool {
        self.dim() == other.dim() && self.contains_multiset(other, tol)
    }
}

/// The constant-on-parts extension `f(x) = f̃(L(x))`.
pub fn lift_eigenfunction<T: Scalar>(lumped: &[T], partition: &Partition) -> Result<Vec<T>> {
    if lumped.len() != partition.len() {
        return Err(Error::DimMismatch {
            expected: partition.len(),
            found: lumped.len(),
        });
    }
    Ok((0..partition.dim())
        .map(|x| lumped[partition.part_of(x)].clone())
        .collect())
}

/// Whether `P f = λ f`.
pub fn is_eigenpair<T: Scalar>(p: &MarkovOperator<T>, f: &[T], lambda: &T) -> Result<bool> {
    let image = p.matrix().mul_vec(f)?;
    Ok(image
        .iter()
        .zip(f)
        .all(|(a, b)| a.approx_eq(&(lambda.clone() * b.clone()))))
}

/// Per-part averages of `f`, or `None` when all of them vanish.
pub fn project_eigenfunction<T: Scalar>(f: &[T], partition: &Partition) -> Result<Option<Vec<T>>> {
    if f.len() != partition.dim() {
        return Err(Error::DimMismatch {
            expected: partition.dim(),
            found: f.len(),
        });
    }
    let averages: Vec<T> = partition
        .parts()
        .iter()
        .map(|part| {
            let s = part.iter().fold(T::zero(), |acc, &x| acc + f[x].clone());
            s / T::from_usize(part.len())
        })
        .collect();
    if averages.iter().all(Scalar::is_negligible) {
        Ok(None)
    } else {
        Ok(Some(averages))
    }
}

fn check_tree(q: usize, n: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::InvalidRadix { radix: q });
    }
    if n == 0 {
        return Err(Error::PosetSize { n });
    }
    Ok(())
}

/// `λ_j = 1 - (q-1)/(q^{n-j+1} - 1)` for `j = 1..n`, with `λ_0 = 1`.
pub fn tree_eigenvalue(q: usize, n: usize, j: usize) -> Rational {
    if j == 0 {
        return Rational::from_ratio(1, 1);
    }
    let qs = Rational::from_usize(q);
    Rational::from_ratio(1, 1)
        - (qs - Rational::from_ratio(1, 1)) / (pow_usize::<Rational>(q, n - j + 1) - Rational::from_ratio(1, 1))
}

/// Closed-form spectrum of the Insect chain on the depth-`n` `q`-ary tree:
/// `W_0` with eigenvalue 1, and `W_j` with `λ_j` of dimension `q^{j-1}(q-1)`.
pub fn tree_spectrum(q: usize, n: usize) -> Result<Spectrum> {
    check_tree(q, n)?;
    let mut entries = vec![(tree_eigenvalue(q, n, 0), 1, Some("W_0".to_string()))];
    for j in 1..=n {
        entries.push((
            tree_eigenvalue(q, n, j),
            q.pow(j as u32 - 1) * (q - 1),
            Some(format!("W_{j}")),
        ));
    }
    Ok(Spectrum::from_exact(entries))
}

/// The eigenfunction for `λ_j` on the spheres of radius `0..=n`: 1 below
/// radius `n-j+1`, `1/(1-q)` at that radius, 0 beyond.
pub fn spherical_eigenfunction(q: usize, n: usize, j: usize) -> Result<Vec<Rational>> {
    check_tree(q, n)?;
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, bound: n });
    }
    let edge = n - j + 1;
    Ok((0..=n)
        .map(|r| {
            if r < edge {
                Rational::from_ratio(1, 1)
            } else if r == edge {
                Rational::from_ratio(1, 1 - q as i64)
            } else {
                Rational::from_ratio(0, 1)
            }
        })
        .collect())
}

/// One antichain `S` with the dimension of its module `W_S` and its orbit `O_S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntichainModule {
    pub antichain: ElemSet,
    /// `q^{|A(S)|} (q-1)^{|S|}`.
    pub module_dim: usize,
    /// `q^{|H(S)|} (q-1)^{|S|}`.
    pub orbit_size: usize,
    /// States with free coordinates on `H(S)`, nonzero coordinates on `S`, zero elsewhere.
    pub orbit: Vec<usize>,
}

/// The antichain-indexed modules and stabilizer orbits of `X^n`, verified to
/// partition the state space.
pub fn antichain_modules(poset: &Poset, q: usize) -> Result<Vec<AntichainModule>> {
    check_tree(q, poset.n())?;
    let structure = BlockStructure::uniform(poset.clone(), q)?;
    let index = structure.index();
    let mut modules = Vec::new();
    for s in poset.antichains()? {
        let above = poset.ancestral_of_set(s)?;
        let below = poset.hereditary_of_set(s)?;
        let module_dim = q.pow(above.len() as u32) * (q - 1).pow(s.len() as u32);
        let orbit_size = q.pow(below.len() as u32) * (q - 1).pow(s.len() as u32);
        let orbit: Vec<usize> = (0..index.dim())
            .filter(|&x| {
                (1..=poset.n()).all(|j| {
                    let v = index.digit(x, j - 1);
                    if s.contains(j) {
                        v != 0
                    } else if below.contains(j) {
                        true
                    } else {
                        v == 0
                    }
                })
            })
            .collect();
        if orbit.len() != orbit_size {
            return Err(Error::ConstructionMismatch(format!(
                "orbit of antichain {s} has {} states, expected {orbit_size}",
                orbit.len()
            )));
        }
        modules.push(AntichainModule {
            antichain: s,
            module_dim,
            orbit_size,
            orbit,
        });
    }
    let parts: Vec<Vec<usize>> = modules.iter().map(|m| m.orbit.clone()).collect();
    Partition::new(index.dim(), parts).map_err(|e| {
        Error::ConstructionMismatch(format!("antichain orbits do not partition the space: {e}"))
    })?;
    let total: usize = modules.iter().map(|m| m.module_dim).sum();
    if total != index.dim() {
        return Err(Error::ConstructionMismatch(format!(
            "module dimensions sum to {total}, expected {}",
            index.dim()
        )));
    }
    Ok(modules)
}

/// Comparison between the distinct eigenvalues of an orbit-lumped chain and its number of orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinctEigenvalueReport {
    pub distinct_eigenvalues: usize,
    pub orbit_count: usize,
    pub lumped: LumpedChain<Rational>,
    pub lumped_spectrum: Spectrum,
    /// Lifted eigenfunctions of the lumped chain, one per lumped eigenvalue (with multiplicity).
    pub orbit_eigenfunctions: Vec<Vec<f64>>,
}

impl DistinctEigenvalueReport {
    pub fn equal(&self) -> bool {
        self.distinct_eigenvalues == self.orbit_count
    }
}

/// Lumps `P` (reversible for the uniform measure) by the orbits of the
/// stabilizer generators and counts the distinct eigenvalues of the result.
pub fn distinct_eigenvalue_count_check(
    p: &MarkovOperator<Rational>,
    structure: &BlockStructure,
    stabilizer: &[WreathGenerator],
) -> Result<DistinctEigenvalueReport> {
    let lumped = orbit_lump(p, structure, stabilizer)?;
    let pi = lumped_measure(&Measure::uniform(p.dim()), &lumped.partition)?;
    let spectrum = lumped.operator.spectrum(&pi)?;
    let orbit_eigenfunctions = spectrum
        .eigenvectors()
        .unwrap_or(&[])
        .iter()
        .map(|v| lift_eigenfunction(v, &lumped.partition))
        .collect::<Result<Vec<_>>>()?;
    Ok(DistinctEigenvalueReport {
        distinct_eigenvalues: spectrum.distinct_count(),
        orbit_count: lumped.partition.len(),
        lumped,
        lumped_spectrum: spectrum,
        orbit_eigenfunctions,
    })
}

/// Spectrum of a lumped chain, with the measure obtained by summing `π` over parts.
pub fn lumped_spectrum<T: Scalar>(
    p: &MarkovOperator<T>,
    pi: &Measure<T>,
    partition: &Partition,
) -> Result<Spectrum> {
    let lumped = lump(p, partition)?;
    lumped.operator.spectrum(&lumped_measure(pi, partition)?)
}

/// Number of orbits of the stabilizer generators acting on the structure.
pub fn stabilizer_orbit_count(structure: &BlockStructure, stabilizer: &[WreathGenerator]) -> Result<usize> {
    Ok(orbits(structure, stabilizer)?.partition.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&a| r(a, 1)).collect()
    }

    #[test]
    fn grouping_and_inclusion() {
        let s = Spectrum::from_values(vec![0.0, 1.0, 2.0 / 3.0, 1e-13], 1e-9);
        assert_eq!(s.distinct_count(), 3);
        assert_eq!(s.dim(), 4);
        let sub = Spectrum::from_values(vec![1.0, 0.0], 1e-9);
        assert!(s.contains_multiset(&sub, 1e-9));
        let too_many = Spectrum::from_values(vec![1.0, 1.0], 1e-9);
        assert!(!s.contains_multiset(&too_many, 1e-9));
    }

    #[test]
    fn tree_spectrum_q2_n3() {
        let s = tree_spectrum(2, 3).unwrap();
        let got: Vec<(Rational, usize)> = s
            .eigenvalues()
            .iter()
            .map(|e| (e.exact.clone().unwrap(), e.multiplicity))
            .collect();
        assert_eq!(
            got,
            vec![(r(1, 1), 1), (r(6, 7), 1), (r(2, 3), 2), (r(0, 1), 4)]
        );
        let s = tree_spectrum(2, 1).unwrap();
        assert_eq!(s.multiplicities(), vec![(1.0, 1), (0.0, 1)]);
    }

    #[test]
    fn spherical_eigenfunctions() {
        assert_eq!(spherical_eigenfunction(2, 3, 2).unwrap(), ints(&[1, 1, -1, 0]));
        assert_eq!(spherical_eigenfunction(2, 3, 1).unwrap(), ints(&[1, 1, 1, -1]));
        assert_eq!(
            spherical_eigenfunction(3, 3, 3).unwrap(),
            vec![r(1, 1), r(-1, 2), r(0, 1), r(0, 1)]
        );
        assert!(spherical_eigenfunction(2, 3, 0).is_err());
    }

    #[test]
    fn lift_and_project_on_four_state_example() {
        let p = MarkovOperator::new(
            Matrix::<Rational>::from_ratios(
                &[&[5, 5, 1, 1], &[5, 5, 1, 1], &[1, 1, 5, 5], &[1, 1, 5, 5]],
                12,
            )
            .unwrap(),
        )
        .unwrap();
        let l = Partition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        let f = lift_eigenfunction(&ints(&[1, 1]), &l).unwrap();
        assert_eq!(f, ints(&[1, 1, 1, 1]));
        assert!(is_eigenpair(&p, &f, &r(1, 1)).unwrap());
        let f23 = ints(&[1, 1, -1, -1]);
        assert!(is_eigenpair(&p, &f23, &r(2, 3)).unwrap());
        assert_eq!(project_eigenfunction(&f23, &l).unwrap(), None);
        assert_eq!(
            project_eigenfunction(&ints(&[3, 3, 3, 3]), &l).unwrap(),
            Some(ints(&[3, 3]))
        );
        assert_eq!(lift_eigenfunction(&ints(&[0, 0]), &l).unwrap(), ints(&[0; 4]));
    }

    #[test]
    fn fig5_antichain_modules() {
        let poset = Poset::from_covers(3, &[(1, 3), (2, 3)]).unwrap();
        let modules = antichain_modules(&poset, 2).unwrap();
        assert_eq!(modules.len(), 5);
        assert_eq!(modules.iter().map(|m| m.module_dim).sum::<usize>(), 8);
        assert_eq!(modules[0].antichain, ElemSet::EMPTY);
        assert_eq!(modules[0].orbit, vec![0]);
        let chain = antichain_modules(&Poset::chain(3).unwrap(), 3).unwrap();
        for m in &chain[1..] {
            let j = m.antichain.iter().next().unwrap();
            assert_eq!(m.module_dim, 3usize.pow(j as u32 - 1) * 2);
        }
    }
}

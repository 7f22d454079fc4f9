//! The Insect chain on the boundary `X^n` of the rooted `q`-ary tree of depth
//! `n` (the chain poset), its spheres, and the reconstruction of a group from
//! any of its lumpings.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lumping::{is_lumping, lumping_violation, Partition};
use crate::operator::MarkovOperator;
use crate::poset::Poset;
use crate::product::insect_operator;
use crate::wreath::{orbits, BlockStructure, Permutation, WreathGenerator};
use crate::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeInsect {
    q: usize,
    n: usize,
    structure: BlockStructure,
    operator: MarkovOperator<Rational>,
}

impl TreeInsect {
    pub fn new(q: usize, n: usize) -> Result<Self> {
        let poset = Poset::chain(n)?;
        let operator = insect_operator(&poset, q)?;
        Ok(TreeInsect {
            q,
            n,
            structure: BlockStructure::uniform(poset, q)?,
            operator,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn operator(&self) -> &MarkovOperator<Rational> {
        &self.operator
    }

    /// `n` minus the length of the longest common prefix.
    pub fn distance(&self, x: usize, y: usize) -> usize {
        let index = self.structure.index();
        let common = (0..self.n)
            .take_while(|&k| index.digit(x, k) == index.digit(y, k))
            .count();
        self.n - common
    }

    /// Partition of the leaves by distance from `x0`, and the radius of each part.
    pub fn spheres(&self, x0: usize) -> (Partition, Vec<usize>) {
        let radius: Vec<usize> = (0..self.dim()).map(|x| self.distance(x0, x)).collect();
        let partition = Partition::from_labels(&radius);
        let radii = partition.parts().iter().map(|p| radius[p[0]]).collect();
        (partition, radii)
    }

    pub fn sphere_partition(&self, x0: usize) -> Partition {
        self.spheres(x0).0
    }

    /// `λ[i][s] = |{x : d(x0, x) = i, x ∈ L_s}|`.
    pub fn sphere_profile(&self, x0: usize, partition: &Partition) -> Result<Vec<Vec<usize>>> {
        if partition.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: partition.dim(),
            });
        }
        let mut table = vec![vec![0; partition.len()]; self.n + 1];
        for x in 0..self.dim() {
            table[self.distance(x0, x)][partition.part_of(x)] += 1;
        }
        Ok(table)
    }

    fn require_lumping(&self, partition: &Partition) -> Result<()> {
        match lumping_violation(&self.operator, partition)? {
            Some(witness) => Err(Error::NotLumpable { witness }),
            None => Ok(()),
        }
    }

    /// The first pair of states in a common part with different sphere
    /// profiles, if any.
    pub fn profile_invariance_check(&self, partition: &Partition) -> Result<Option<(usize, usize)>> {
        self.require_lumping(partition)?;
        for part in partition.parts() {
            let reference = self.sphere_profile(part[0], partition)?;
            for &y in &part[1..] {
                if self.sphere_profile(y, partition)? != reference {
                    return Ok(Some((part[0], y)));
                }
            }
        }
        Ok(None)
    }

    /// Deletes the last letter and merges parts with equal projections,
    /// giving a lumping of the depth `n-1` chain.
    pub fn project_partition(&self, partition: &Partition) -> Result<Partition> {
        if self.n < 2 {
            return Err(Error::EmptyResult);
        }
        if partition.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: partition.dim(),
            });
        }
        let q = self.q;
        let mut projections: Vec<Vec<usize>> = partition
            .parts()
            .iter()
            .map(|p| {
                let mut v: Vec<usize> = p.iter().map(|&x| x / q).collect();
                v.dedup();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        let small = self.dim() / q;
        let mut owner = vec![usize::MAX; small];
        for (k, proj) in projections.iter().enumerate() {
            for &z in proj {
                if owner[z] == usize::MAX {
                    owner[z] = k;
                } else if projections[owner[z]] != *proj {
                    return Err(Error::ProjectionClash { a: owner[z], b: k });
                }
            }
        }
        projections.sort();
        projections.dedup();
        let projected = Partition::new(small, projections)?;
        let lower = TreeInsect::new(q, self.n - 1)?;
        if !is_lumping(&lower.operator, &projected) {
            return Err(Error::ConstructionMismatch(
                "projected partition does not lump the shallower chain".into(),
            ));
        }
        Ok(projected)
    }

    /// Generators of a subgroup of the tree automorphism group whose orbit
    /// partition is exactly `partition`.
    pub fn reconstruct_group(&self, partition: &Partition) -> Result<Vec<WreathGenerator>> {
        self.require_lumping(partition)?;
        self.reconstruct(partition)
    }

    fn reconstruct(&self, partition: &Partition) -> Result<Vec<WreathGenerator>> {
        let q = self.q;
        let m = self.n;
        let mut gens = Vec::new();
        if m == 1 {
            for part in partition.parts().iter().filter(|p| p.len() >= 2) {
                gens.push(WreathGenerator::identity().set(1, vec![], Permutation::cycle(q, part)?));
            }
        } else {
            let lower = TreeInsect::new(q, m - 1)?;
            let projected = self.project_partition(partition)?;
            let lower_gens = lower.reconstruct(&projected)?;
            // traces[z][t]: letters a with z·a in part t, ascending
            let traces: Vec<BTreeMap<usize, Vec<usize>>> = (0..lower.dim())
                .map(|z| {
                    let mut t: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                    for a in 0..q {
                        t.entry(partition.part_of(z * q + a)).or_default().push(a);
                    }
                    t
                })
                .collect();
            let lower_index = lower.structure.index();
            for h in &lower_gens {
                let mut table = BTreeMap::new();
                for (z, trace) in traces.iter().enumerate() {
                    let image = h.act(&lower.structure, z)?;
                    let mut letters = vec![0; q];
                    for (t, from) in trace {
                        let to = traces[image].get(t).ok_or(Error::ReconstructionMismatch)?;
                        if to.len() != from.len() {
                            return Err(Error::ReconstructionMismatch);
                        }
                        for (&a, &b) in from.iter().zip(to) {
                            letters[a] = b;
                        }
                    }
                    table.insert(lower_index.decode(z), Permutation::new(letters)?);
                }
                let mut lifted = WreathGenerator::identity();
                for (&element, t) in h.tables() {
                    lifted = lifted.with_table(element, t.clone());
                }
                gens.push(lifted.with_table(m, table));
            }
            for (z, trace) in traces.iter().enumerate() {
                for letters in trace.values().filter(|l| l.len() >= 2) {
                    gens.push(WreathGenerator::identity().with_sparse_table(
                        &self.structure,
                        m,
                        [(lower_index.decode(z), Permutation::cycle(q, letters)?)],
                    ));
                }
            }
        }
        if orbits(&self.structure, &gens)?.partition != *partition {
            return Err(Error::ReconstructionMismatch);
        }
        Ok(gens)
    }
}

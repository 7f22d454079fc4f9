//! Exhaustive lumping enumeration and the group-induced test.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lumping::{is_lumping, lumping_violation, Partition};
use crate::operator::MarkovOperator;
use crate::scalar::Scalar;
use crate::wreath::{orbits_of_state_permutations, BlockStructure, Permutation};

/// Default largest state space for [`enumerate_lumpings`].
pub const DEFAULT_SEARCH_CAP: usize = 12;
/// Default largest group for [`is_group_induced`].
pub const DEFAULT_GROUP_CAP: u64 = 1_000_000;

struct LumpingSearch<'a, T> {
    p: &'a MarkovOperator<T>,
    /// `suffix[k][x] = Σ_{y ≥ k} p(x, y)`.
    suffix: Vec<Vec<T>>,
    block: Vec<usize>,
    /// `partial[x][b] = Σ_{y assigned to b} p(x, y)`.
    partial: Vec<Vec<T>>,
    found: Vec<Partition>,
}

impl<T: Scalar> LumpingSearch<'_, T> {
    /// Checks that assigned states sharing a block can still reach equal
    /// masses into every existing block once the remaining states are placed.
    fn feasible(&self, k: usize, blocks: usize) -> bool {
        let remaining = &self.suffix[k + 1];
        for x in 0..=k {
            for x2 in (x + 1)..=k {
                if self.block[x] != self.block[x2] {
                    continue;
                }
                for b in 0..blocks {
                    let d = self.partial[x][b].clone() - self.partial[x2][b].clone();
                    let slack = if d.is_positive() {
                        &remaining[x2]
                    } else {
                        &remaining[x]
                    };
                    let d = d.abs();
                    if d > *slack && !d.approx_eq(slack) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn place(&mut self, k: usize, blocks: usize) {
        let dim = self.p.dim();
        if k == dim {
            let partition = Partition::from_labels(&self.block);
            if is_lumping(self.p, &partition) {
                self.found.push(partition);
            }
            return;
        }
        for b in 0..=blocks {
            self.block[k] = b;
            if b == blocks {
                for row in self.partial.iter_mut() {
                    row.push(T::zero());
                }
            }
            for x in 0..dim {
                self.partial[x][b] = self.partial[x][b].clone() + self.p.entry(x, k).clone();
            }
            let next_blocks = blocks.max(b + 1);
            if self.feasible(k, next_blocks) {
                self.place(k + 1, next_blocks);
            }
            for x in 0..dim {
                self.partial[x][b] = self.partial[x][b].clone() - self.p.entry(x, k).clone();
            }
            if b == blocks {
                for row in self.partial.iter_mut() {
                    row.pop();
                }
            }
        }
    }
}

/// Every lumping partition of `P`, in the order of their restricted-growth label strings.
pub fn enumerate_lumpings<T: Scalar>(p: &MarkovOperator<T>, cap: usize) -> Result<Vec<Partition>> {
    let dim = p.dim();
    if dim > cap {
        return Err(Error::AmbientTooLarge {
            size: dim.to_string(),
            cap,
        });
    }
    let mut suffix = vec![vec![T::zero(); dim]; dim + 1];
    for k in (0..dim).rev() {
        for x in 0..dim {
            suffix[k][x] = suffix[k + 1][x].clone() + p.entry(x, k).clone();
        }
    }
    let mut search = LumpingSearch {
        p,
        suffix,
        block: vec![0; dim],
        partial: vec![Vec::new(); dim],
        found: Vec::new(),
    };
    search.place(0, 0);
    Ok(search.found)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupInducedReport {
    /// Whether the orbits of the setwise stabilizer of the partition equal the partition.
    pub induced: bool,
    /// `|Stab(L)|` inside the full generalized wreath product.
    pub stabilizer_order: usize,
    pub stabilizer_orbits: Partition,
}

/// Decides whether some subgroup of the generalized wreath product has
/// `partition` as its orbit partition, by enumerating the group.
pub fn is_group_induced<T: Scalar>(
    p: &MarkovOperator<T>,
    partition: &Partition,
    structure: &BlockStructure,
    cap: u64,
) -> Result<GroupInducedReport> {
    if let Some(witness) = lumping_violation(p, partition)? {
        return Err(Error::NotLumpable { witness });
    }
    if p.dim() != structure.dim() {
        return Err(Error::DimMismatch {
            expected: structure.dim(),
            found: p.dim(),
        });
    }
    let order: BigUint = structure.group_order();
    if order > BigUint::from(cap) {
        return Err(Error::AmbientTooLarge {
            size: order.to_string(),
            cap: cap.to_usize().unwrap_or(usize::MAX),
        });
    }
    let stabilizer = setwise_stabilizer(structure, partition);
    let stabilizer_orbits = orbits_of_state_permutations(structure.dim(), &stabilizer);
    Ok(GroupInducedReport {
        induced: stabilizer_orbits == *partition,
        stabilizer_order: stabilizer.len(),
        stabilizer_orbits,
    })
}

/// All elements of the generalized wreath product (as state permutations)
/// mapping every part of `partition` onto itself.
fn setwise_stabilizer(structure: &BlockStructure, partition: &Partition) -> Vec<Vec<usize>> {
    let n = structure.n();
    let dim = structure.dim();
    let index = structure.index();
    // one slot per (element, key); slot_of[i][x] is the slot read by element i at x
    let mut slot_perms: Vec<Vec<Permutation>> = Vec::new();
    let mut slot_of = vec![vec![0usize; dim]; n];
    for i in 1..=n {
        let base = slot_perms.len();
        let keys = structure.keys(i);
        for _ in &keys {
            slot_perms.push(Permutation::all(structure.radix(i)));
        }
        for x in 0..dim {
            let key = structure.key(i, x);
            slot_of[i - 1][x] = base + keys.iter().position(|k| *k == key).expect("key enumerated");
        }
    }
    let mut counter = vec![0usize; slot_perms.len()];
    let mut out = Vec::new();
    loop {
        let image: Vec<usize> = (0..dim)
            .map(|x| {
                (0..n).fold(x, |y, k| {
                    let perm = &slot_perms[slot_of[k][x]][counter[slot_of[k][x]]];
                    index.with_digit(y, k, perm.apply(index.digit(x, k)))
                })
            })
            .collect();
        if (0..dim).all(|x| partition.part_of(image[x]) == partition.part_of(x)) {
            out.push(image);
        }
        // advance the mixed-radix counter
        let mut s = 0;
        loop {
            if s == counter.len() {
                return out;
            }
            counter[s] += 1;
            if counter[s] < slot_perms[s].len() {
                break;
            }
            counter[s] = 0;
            s += 1;
        }
    }
}

/// Every lumping of `P` together with its group-induced verdict.
pub fn classify_lumpings<T: Scalar>(
    p: &MarkovOperator<T>,
    structure: &BlockStructure,
    search_cap: usize,
    group_cap: u64,
) -> Result<Vec<(Partition, GroupInducedReport)>> {
    enumerate_lumpings(p, search_cap)?
        .into_iter()
        .map(|l| {
            let report = is_group_induced(p, &l, structure, group_cap)?;
            Ok((l, report))
        })
        .collect()
}

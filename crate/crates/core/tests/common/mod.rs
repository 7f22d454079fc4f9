//! Shared helpers for the integration tests: independent oracles and a
//! poset enumerator.
#![allow(dead_code, clippy::needless_range_loop)]

use poset_lumping::{ElemSet, Matrix, Partition, Poset, Rational, Scalar};

pub fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

pub fn parts(dim: usize, p: &[&[usize]]) -> Partition {
    Partition::new(dim, p.iter().map(|v| v.to_vec()).collect()).unwrap()
}

fn is_transitive(n: usize, lt: &[Vec<bool>]) -> bool {
    (0..n).all(|a| {
        (0..n).all(|b| !lt[a][b] || (0..n).all(|c| !lt[b][c] || lt[a][c]))
    })
}

fn canonical(n: usize, lt: &[Vec<bool>], perms: &[Vec<usize>]) -> Vec<bool> {
    perms
        .iter()
        .map(|p| {
            let mut v = vec![false; n * n];
            for a in 0..n {
                for b in 0..n {
                    if lt[a][b] {
                        v[p[a] * n + p[b]] = true;
                    }
                }
            }
            v
        })
        .min()
        .unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative of every isomorphism class of posets on `n` elements.
/// Every poset has a natural labeling, so strict relations contained in
/// `a < b` suffice.
pub fn all_posets(n: usize) -> Vec<Poset> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b))).collect();
    let perms = permutations(n);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut lt = vec![vec![false; n]; n];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                lt[a][b] = true;
            }
        }
        if !is_transitive(n, &lt) || !seen.insert(canonical(n, &lt, &perms)) {
            continue;
        }
        let relation: Vec<Vec<bool>> = (0..n)
            .map(|a| (0..n).map(|b| a == b || lt[a][b]).collect())
            .collect();
        out.push(Poset::from_relation(&relation).unwrap());
    }
    out
}

pub fn all_posets_up_to(max_n: usize) -> Vec<Poset> {
    (1..=max_n).flat_map(all_posets).collect()
}

/// Every subset of `{1..n}`.
pub fn all_subsets(n: usize) -> impl Iterator<Item = ElemSet> {
    (0u64..(1 << n)).map(ElemSet::from_bits)
}

/// Dense Kronecker product written out entry by entry.
pub fn kron_oracle(factors: &[Matrix<Rational>]) -> Matrix<Rational> {
    let dims: Vec<usize> = factors.iter().map(|m| m.rows()).collect();
    let dim: usize = dims.iter().product();
    let digits = |mut x: usize| {
        let mut d = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            d[k] = x % dims[k];
            x /= dims[k];
        }
        d
    };
    Matrix::from_fn(dim, dim, |x, y| {
        let (dx, dy) = (digits(x), digits(y));
        factors
            .iter()
            .enumerate()
            .fold(r(1, 1), |acc, (k, m)| acc * m.get(dx[k], dy[k]).clone())
    })
}

pub fn uniform_matrix(q: usize) -> Matrix<Rational> {
    Matrix::filled(q, q, r(1, q as i64))
}

pub fn identity_matrix(q: usize) -> Matrix<Rational> {
    Matrix::identity(q)
}

/// `Σ_A w_A (⊗_{i∈A} I ⊗ ⊗_{i∉A} U)` over `(A, w_A)` pairs, from scratch.
pub fn mixture_oracle(n: usize, q: usize, terms: &[(ElemSet, Rational)]) -> Matrix<Rational> {
    let dim = q.pow(n as u32);
    let mut total = Matrix::zeros(dim, dim);
    for (set, w) in terms {
        let factors: Vec<Matrix<Rational>> = (1..=n)
            .map(|i| if set.contains(i) { identity_matrix(q) } else { uniform_matrix(q) })
            .collect();
        total = total.add(&kron_oracle(&factors).scale(w)).unwrap();
    }
    total
}

/// The poset generated by the pairs `a ≺ b` (`a < b`) selected by `mask`,
/// closed under transitivity.
pub fn poset_from_mask(n: usize, mask: u64) -> Poset {
    let mut lt = vec![vec![false; n]; n];
    let mut k = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            lt[a][b] = mask >> k & 1 == 1;
            k += 1;
        }
    }
    for m in 0..n {
        for a in 0..n {
            for b in 0..n {
                if lt[a][m] && lt[m][b] {
                    lt[a][b] = true;
                }
            }
        }
    }
    let relation: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| a == b || lt[a][b]).collect())
        .collect();
    Poset::from_relation(&relation).unwrap()
}

/// Every set partition of `0..dim`, as restricted-growth label vectors.
pub fn all_set_partitions(dim: usize) -> Vec<Partition> {
    fn go(k: usize, dim: usize, labels: &mut Vec<usize>, blocks: usize, out: &mut Vec<Partition>) {
        if k == dim {
            out.push(Partition::from_labels(labels));
            return;
        }
        for b in 0..=blocks {
            labels.push(b);
            go(k + 1, dim, labels, blocks.max(b + 1), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    go(0, dim, &mut Vec::new(), 0, &mut out);
    out
}

/// Lumpability straight from the definition: equal mass into every part.
pub fn lumps_oracle(p: &Matrix<Rational>, partition: &Partition) -> bool {
    partition.parts().iter().all(|part| {
        partition.parts().iter().all(|target| {
            let mass = |x: usize| target.iter().fold(r(0, 1), |acc, &y| acc + p.get(x, y).clone());
            part.iter().all(|&x| mass(x) == mass(part[0]))
        })
    })
}

/// A random stochastic matrix with small integer numerators.
pub fn stochastic_from_seed(dim: usize, seed: &[u8]) -> Matrix<Rational> {
    let rows: Vec<Vec<Rational>> = (0..dim)
        .map(|x| {
            let nums: Vec<i64> = (0..dim).map(|y| seed[(x * dim + y) % seed.len()] as i64 % 4).collect();
            let total: i64 = nums.iter().sum();
            if total == 0 {
                (0..dim).map(|y| if x == y { r(1, 1) } else { r(0, 1) }).collect()
            } else {
                nums.iter().map(|&v| r(v, total)).collect()
            }
        })
        .collect();
    Matrix::from_rows(rows).unwrap()
}

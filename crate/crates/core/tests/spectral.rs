mod common;

use common::{all_posets_up_to, r};
use poset_lumping::eigen::symmetric_eigen;
use poset_lumping::lumping::lump;
use poset_lumping::product::insect_operator;
use poset_lumping::spectral::{
    distinct_eigenvalue_count_check, is_eigenpair, lift_eigenfunction, project_eigenfunction,
    spherical_eigenfunction, tree_eigenvalue, tree_spectrum,
};
use poset_lumping::wreath::stabilizer_generators;
use poset_lumping::{BlockStructure, Measure, Poset, Rational, TreeInsect};
use proptest::prelude::*;

#[test]
fn spherical_functions_are_exact_eigenvectors() {
    for q in 2usize..=6 {
        for n in 1..=8 {
            if q.pow(n as u32) > 256 {
                continue;
            }
            let t = TreeInsect::new(q, n).unwrap();
            let spheres = t.sphere_partition(0);
            let lumped = lump(t.operator(), &spheres).unwrap().operator;
            for j in 1..=n {
                let f = spherical_eigenfunction(q, n, j).unwrap();
                let lambda = tree_eigenvalue(q, n, j);
                assert!(is_eigenpair(&lumped, &f, &lambda).unwrap(), "q={q} n={n} j={j}");
                let lifted = lift_eigenfunction(&f, &spheres).unwrap();
                assert!(is_eigenpair(t.operator(), &lifted, &lambda).unwrap());
                let back = project_eigenfunction(&lifted, &spheres).unwrap().unwrap();
                assert_eq!(back, f);
            }
        }
    }
}

#[test]
fn tree_eigenvalue_closed_form() {
    assert_eq!(tree_eigenvalue(2, 3, 1), r(6, 7));
    assert_eq!(tree_eigenvalue(2, 3, 2), r(2, 3));
    assert_eq!(tree_eigenvalue(2, 3, 3), r(0, 1));
    assert_eq!(tree_eigenvalue(3, 2, 0), r(1, 1));
    let total: usize = tree_spectrum(3, 4).unwrap().eigenvalues().iter().map(|e| e.multiplicity).sum();
    assert_eq!(total, 81);
}

#[test]
fn distinct_eigenvalues_versus_orbits() {
    for poset in all_posets_up_to(3) {
        let s = BlockStructure::uniform(poset.clone(), 2).unwrap();
        let p = insect_operator::<Rational>(&poset, 2).unwrap();
        let stab = stabilizer_generators(&s, 0).unwrap();
        let report = distinct_eigenvalue_count_check(&p, &s, &stab).unwrap();
        assert!(report.distinct_eigenvalues <= report.orbit_count);
        for (f, e) in report.orbit_eigenfunctions.iter().zip(report.lumped_spectrum.values()) {
            let pf = p.to_f64();
            assert!(is_eigenpair(&pf, f, &e).unwrap());
        }
    }
    let chain = Poset::chain(3).unwrap();
    let s = BlockStructure::uniform(chain.clone(), 2).unwrap();
    let p = insect_operator::<Rational>(&chain, 2).unwrap();
    let report = distinct_eigenvalue_count_check(&p, &s, &stabilizer_generators(&s, 0).unwrap()).unwrap();
    assert!(report.equal());
}

#[test]
fn uniform_measure_is_stationary_for_insect_chains() {
    for poset in all_posets_up_to(3) {
        let p = insect_operator::<Rational>(&poset, 2).unwrap();
        let pi = p.stationary_distribution().unwrap();
        assert_eq!(pi, Measure::uniform(p.dim()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_reconstructs_symmetric_matrices(entries in prop::collection::vec(-5.0f64..5.0, 21)) {
        let n = 6;
        // entries fill the upper triangle row by row
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let (lo, hi) = (i.min(j), i.max(j));
                        entries[lo * (2 * n - lo + 1) / 2 + hi - lo]
                    })
                    .collect()
            })
            .collect();
        let e = symmetric_eigen(&a, 1e-12);
        for w in e.values.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        for (idx, lambda) in e.values.iter().enumerate() {
            let v = &e.vectors[idx];
            for i in 0..n {
                let av: f64 = (0..n).map(|j| a[i][j] * v[j]).sum();
                prop_assert!((av - lambda * v[i]).abs() < 1e-9);
            }
        }
        let trace: f64 = (0..n).map(|i| a[i][i]).sum();
        prop_assert!((trace - e.values.iter().sum::<f64>()).abs() < 1e-9);
    }
}

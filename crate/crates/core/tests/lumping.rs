mod common;

use common::{all_set_partitions, lumps_oracle, parts, poset_from_mask, r, stochastic_from_seed};
use poset_lumping::lumping::{
    compose, deletion_lumped_closed_form, deletion_lumping, deletion_partition, direct_product_partition,
    indicator_invariance, is_lumping, lump, lumping_violation,
};
use poset_lumping::product::crested_product;
use poset_lumping::{CrestedSpec, ElemSet, Error, ExactOperator, Partition, Poset, Rational};
use proptest::prelude::*;

#[test]
fn checker_agrees_with_definition_on_every_partition() {
    for seed in [[1u8, 2, 3, 0, 5, 7, 1], [3, 3, 3, 3, 1, 0, 2], [0, 1, 0, 1, 2, 2, 1]] {
        for dim in 1..=5 {
            let m = stochastic_from_seed(dim, &seed);
            let p = ExactOperator::new(m.clone()).unwrap();
            for l in all_set_partitions(dim) {
                let want = lumps_oracle(&m, &l);
                assert_eq!(is_lumping(&p, &l), want);
                assert_eq!(indicator_invariance(&p, &l).unwrap(), want);
                assert_eq!(lumping_violation(&p, &l).unwrap().is_none(), want);
            }
        }
    }
}

#[test]
fn witness_reports_the_failing_masses() {
    let p = ExactOperator::new(stochastic_from_seed(3, &[3, 0, 1, 0, 1, 3, 1, 1, 2])).unwrap();
    let l = parts(3, &[&[0, 1], &[2]]);
    let w = lumping_violation(&p, &l).unwrap().unwrap();
    assert_eq!(w.part, 0);
    assert!(matches!(lump(&p, &l), Err(Error::NotLumpable { .. })));
}

#[test]
fn dimension_mismatch_is_an_error() {
    let p = ExactOperator::uniform(3).unwrap();
    assert!(lumping_violation(&p, &Partition::identity(4)).is_err());
}

#[test]
fn factor_that_does_not_lump_is_reported() {
    let poset = Poset::chain(2).unwrap();
    let p0 = ExactOperator::new(stochastic_from_seed(3, &[1, 1, 0, 0, 1, 1, 1, 0, 1])).unwrap();
    let spec = CrestedSpec::new(poset, vec![ExactOperator::uniform(2).unwrap(), p0], vec![r(1, 2); 2]).unwrap();
    let bad = direct_product_partition(&spec, &[Partition::identity(2), parts(3, &[&[0, 1], &[2]])]);
    assert!(matches!(bad, Err(Error::FactorNotLumpable { factor: 2, .. })));
}

fn chain_case() -> impl Strategy<Value = (Vec<u8>, Vec<usize>)> {
    (prop::collection::vec(any::<u8>(), 16), prop::collection::vec(0usize..3, 5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn universal_and_identity_always_lump((seed, _) in chain_case()) {
        let p = ExactOperator::new(stochastic_from_seed(5, &seed)).unwrap();
        prop_assert!(is_lumping(&p, &Partition::identity(5)));
        prop_assert!(is_lumping(&p, &Partition::universal(5)));
        let lumped = lump(&p, &Partition::universal(5)).unwrap();
        prop_assert_eq!(lumped.operator.entry(0, 0), &r(1, 1));
    }

    #[test]
    fn partitions_from_labels_are_canonical((_, labels) in chain_case()) {
        let l = Partition::from_labels(&labels);
        prop_assert_eq!(Partition::new(l.dim(), l.parts().to_vec()).unwrap(), l.clone());
        for x in 0..l.dim() {
            prop_assert!(l.part(l.part_of(x)).contains(&x));
        }
        prop_assert!(Partition::identity(5).refines(&l));
        prop_assert!(l.refines(&Partition::universal(5)));
    }

    #[test]
    fn lumpings_compose(n in 1usize..=3, mask in any::<u64>(), bits in any::<u64>(), more in any::<u64>()) {
        let poset = poset_from_mask(n, mask);
        let spec = CrestedSpec::<Rational>::uniform_factors(poset, &vec![2; n], vec![r(1, n as i64); n]).unwrap();
        let p = crested_product(&spec).unwrap();
        let removed = ElemSet::from_bits(bits & ElemSet::full(n).bits());
        let first = deletion_lumping(&spec, removed).unwrap();
        prop_assert!(lumps_oracle(p.matrix(), &first.partition));
        let extra = ElemSet::from_bits(more & ElemSet::full(n).bits()).difference(removed);
        let kept: Vec<usize> = (1..=n).filter(|&i| !removed.contains(i)).collect();
        let extra_kept: ElemSet = kept
            .iter()
            .enumerate()
            .filter(|(_, i)| extra.contains(**i))
            .map(|(k, _)| k + 1)
            .collect();
        if let Some(index) = first.operator.index().cloned() {
            let merge = deletion_partition(&index, extra_kept).unwrap();
            let coarse = compose(&p, &first.partition, &merge).unwrap();
            let direct = deletion_partition(&spec.index(), removed.union(extra)).unwrap();
            prop_assert_eq!(coarse, direct);
        }
    }

    #[test]
    fn closed_form_deletion_with_mixed_sizes(
        n in 1usize..=3,
        mask in any::<u64>(),
        sizes in prop::collection::vec(2usize..=3, 3),
        raw in prop::collection::vec(1i64..=5, 3),
        bits in any::<u64>(),
    ) {
        let poset = poset_from_mask(n, mask);
        let total: i64 = raw[..n].iter().sum();
        let weights: Vec<Rational> = raw[..n].iter().map(|&w| r(w, total)).collect();
        let spec = CrestedSpec::uniform_factors(poset.clone(), &sizes[..n], weights.clone()).unwrap();
        let removed = ElemSet::from_bits(bits & ElemSet::full(n).bits());
        let brute = deletion_lumping(&spec, removed).unwrap();
        let closed = deletion_lumped_closed_form(&poset, removed, &weights, &sizes[..n]).unwrap();
        prop_assert_eq!(brute.operator.matrix(), closed.matrix());
    }

    #[test]
    fn direct_products_of_factor_lumpings_lump(
        seed in prop::collection::vec(any::<u8>(), 9),
        a in prop::collection::vec(0usize..2, 3),
        b in prop::collection::vec(0usize..2, 2),
    ) {
        let poset = Poset::chain(2).unwrap();
        let p1 = ExactOperator::new(stochastic_from_seed(3, &seed)).unwrap();
        let spec = CrestedSpec::new(poset, vec![p1.clone(), ExactOperator::uniform(2).unwrap()], vec![r(1, 3), r(2, 3)]).unwrap();
        let la = Partition::from_labels(&a);
        let lb = Partition::from_labels(&b);
        match direct_product_partition(&spec, &[la.clone(), lb]) {
            Ok(l) => prop_assert!(lumps_oracle(crested_product(&spec).unwrap().matrix(), &l)),
            Err(Error::FactorNotLumpable { factor, .. }) => {
                prop_assert_eq!(factor, 1);
                prop_assert!(!is_lumping(&p1, &la));
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

mod common;

use common::{all_posets, all_subsets, poset_from_mask};
use poset_lumping::poset::Fibering;
use poset_lumping::{ElemSet, Error, Poset};
use proptest::prelude::*;

#[test]
fn isomorphism_class_counts() {
    let counts: Vec<usize> = (1..=5).map(|n| all_posets(n).len()).collect();
    assert_eq!(counts, vec![1, 2, 5, 16, 63]);
}

#[test]
fn chain_and_antichain_extremes() {
    for n in 1..=6 {
        let chain = Poset::chain(n).unwrap();
        assert_eq!(chain.ancestral_subsets().unwrap().len(), n + 1);
        assert_eq!(chain.antichains().unwrap().len(), n + 1);
        let anti = Poset::antichain(n).unwrap();
        assert_eq!(anti.ancestral_subsets().unwrap().len(), 1 << n);
        assert_eq!(anti.antichains().unwrap().len(), 1 << n);
    }
}

#[test]
fn malformed_relations_are_rejected() {
    assert!(matches!(Poset::from_covers(0, &[]), Err(Error::PosetSize { .. })));
    assert!(matches!(Poset::from_covers(2, &[(1, 3)]), Err(Error::IndexOutOfRange { .. })));
    let cyclic = vec![vec![true, true], vec![true, true]];
    assert!(matches!(Poset::from_relation(&cyclic), Err(Error::AntisymmetryViolation { .. })));
    let intransitive = vec![
        vec![true, true, false],
        vec![false, true, true],
        vec![false, false, true],
    ];
    assert!(matches!(Poset::from_relation(&intransitive), Err(Error::TransitivityViolation { .. })));
}

fn poset_strategy() -> impl Strategy<Value = Poset> {
    (1usize..=6, any::<u64>()).prop_map(|(n, mask)| poset_from_mask(n, mask))
}

proptest! {
    #[test]
    fn ancestral_family_is_a_lattice(p in poset_strategy()) {
        let family = p.ancestral_subsets().unwrap();
        for &a in family.sets() {
            prop_assert!(p.is_ancestral(a));
            for &b in family.sets() {
                prop_assert!(family.contains(a.union(b)));
                prop_assert!(family.contains(a.intersection(b)));
            }
        }
        let brute = all_subsets(p.n()).filter(|&s| p.is_ancestral(s)).count();
        prop_assert_eq!(family.len(), brute);
        prop_assert_eq!(family.set(family.full_index()), p.full());
        prop_assert_eq!(family.set(family.empty_index()), ElemSet::EMPTY);
    }

    #[test]
    fn antichains_biject_with_ancestral_sets(p in poset_strategy()) {
        let antichains = p.antichains().unwrap();
        prop_assert_eq!(antichains.len(), p.ancestral_subsets().unwrap().len());
        let mut closures = std::collections::BTreeSet::new();
        for &s in &antichains {
            prop_assert!(p.is_antichain(s));
            let up = p.ancestral_closed_of_set(s).unwrap();
            prop_assert!(p.is_ancestral(up));
            prop_assert!(closures.insert(up.bits()));
        }
    }

    #[test]
    fn family_covers_differ_by_one_element(p in poset_strategy()) {
        let family = p.ancestral_subsets().unwrap();
        for &(i, j) in family.covers() {
            let (a, b) = (family.set(i), family.set(j));
            prop_assert!(b.is_subset(a));
            prop_assert_eq!(a.len(), b.len() + 1);
        }
    }

    #[test]
    fn closures_are_consistent(p in poset_strategy()) {
        for i in 1..=p.n() {
            for j in 1..=p.n() {
                prop_assert_eq!(p.above(i).contains(j), p.below(j).contains(i));
                prop_assert_eq!(p.lt(i, j), p.above(i).contains(j));
            }
            prop_assert!(p.is_ancestral(p.ancestral_closed_of(i).unwrap()));
            prop_assert!(!p.hereditary_of(i).unwrap().contains(i));
        }
        let order = p.linear_extension();
        for (k, &i) in order.iter().enumerate() {
            prop_assert!(p.above(i).iter().all(|j| order[..k].contains(&j)));
        }
    }

    #[test]
    fn fibered_reduction_keeps_the_order(p in poset_strategy(), bits in any::<u64>()) {
        let removed = ElemSet::from_bits(bits & p.full().bits());
        if removed == p.full() {
            prop_assert!(p.reduced(removed).is_err());
            return Ok(());
        }
        let reduced = p.reduced(removed).unwrap();
        for a in 1..=reduced.poset.n() {
            for b in 1..=reduced.poset.n() {
                prop_assert_eq!(
                    reduced.poset.leq(a, b),
                    p.leq(reduced.original_label(a), reduced.original_label(b))
                );
            }
        }
        if let Fibering::Fibered(w) = p.fibered_over(removed).unwrap() {
            for (&r, &s) in &w.base_of {
                prop_assert!(removed.contains(r));
                prop_assert!(!removed.contains(s));
                prop_assert!(p.lt(s, r));
            }
            prop_assert_eq!(w.base_of.len(), removed.len());
        }
    }
}

mod common;

use common::{poset_from_mask, r, stochastic_from_seed};
use poset_lumping::formats::{
    parse, to_string_pretty, CoefficientsJson, CrestedJson, ErrorJson, GeneralizedJson, GroupJson, MatrixJson,
    MeasureJson, PartitionJson, PosetJson, SpectrumJson,
};
use poset_lumping::lumping::{lumping_violation, GeneralizedLumpingSpec};
use poset_lumping::product::insect_coefficients;
use poset_lumping::spectral::tree_spectrum;
use poset_lumping::wreath::{random_generators, stabilizer_generators};
use poset_lumping::{
    BlockStructure, CrestedSpec, Error, ExactOperator, FloatOperator, Measure, Partition, Poset, Rational,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reparse<J: serde::Serialize + serde::de::DeserializeOwned>(value: &J) -> J {
    parse(&to_string_pretty(value)).unwrap()
}

#[test]
fn generalized_spec_round_trip() {
    let id = Partition::identity(2);
    let univ = Partition::universal(2);
    let spec = GeneralizedLumpingSpec::new()
        .with_base(1, id.clone())
        .with_entry(2, vec![0], id)
        .with_entry(2, vec![1], univ);
    let json = GeneralizedJson::from_spec(&spec);
    assert!(json.elements["1"].base.is_some());
    assert!(json.elements["2"].table.as_ref().unwrap().contains_key("(1)"));
    assert_eq!(reparse(&json).to_spec().unwrap(), spec);
}

#[test]
fn crested_spec_with_sizes() {
    let text = r#"{"poset": {"n": 2, "covers": [[1, 2]]}, "sizes": [2, 3], "weights": ["1/3", "2/3"]}"#;
    let spec: CrestedSpec<Rational> = parse::<CrestedJson>(text).unwrap().to_spec().unwrap();
    assert_eq!(spec.sizes(), vec![2, 3]);
    let again = CrestedJson::from_spec(&spec);
    assert_eq!(reparse(&again).to_spec::<Rational>().unwrap(), spec);
    let both = r#"{"poset": {"n": 1, "covers": []}, "weights": ["1"]}"#;
    assert!(matches!(parse::<CrestedJson>(both).unwrap().to_spec::<Rational>(), Err(Error::Format(_))));
}

#[test]
fn group_round_trip() {
    let s = BlockStructure::uniform(Poset::from_covers(3, &[(1, 3), (2, 3)]).unwrap(), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut gens = random_generators(&s, 4, &mut rng);
    gens.extend(stabilizer_generators(&s, 5).unwrap());
    let json = GroupJson::from_generators(&s, &gens);
    let back = reparse(&json);
    let s2 = back.structure().unwrap();
    let gens2 = back.to_generators(&s2).unwrap();
    for (a, b) in gens.iter().zip(&gens2) {
        assert_eq!(a.state_permutation(&s).unwrap(), b.state_permutation(&s2).unwrap());
    }
}

#[test]
fn error_objects_carry_witnesses() {
    let p = ExactOperator::new(stochastic_from_seed(3, &[3, 0, 1, 0, 1, 3, 1, 1, 2])).unwrap();
    let l = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
    let witness = lumping_violation(&p, &l).unwrap().unwrap();
    let e = Error::NotLumpable { witness };
    let json = ErrorJson::from(&e);
    assert_eq!(json.error, "NotLumpable");
    assert!(json.witness.is_some());
    assert_eq!(reparse(&json), json);
}

#[test]
fn coefficients_and_spectrum_reparse() {
    let c = insect_coefficients::<Rational>(&Poset::from_covers(3, &[(1, 3), (2, 3)]).unwrap(), 2).unwrap();
    let json = CoefficientsJson::from_coefficients(&c);
    assert_eq!(json.alphas["{1,2}<{1}"], "1/4");
    assert_eq!(json.weights["{1}"], "3/20");
    assert_eq!(reparse(&json), json);
    let s = tree_spectrum(2, 3).unwrap();
    let sj = SpectrumJson::from_spectrum(&s);
    assert_eq!(sj.eigenvalues[1].value, "6/7");
    assert_eq!(sj.eigenvalues[1].label.as_deref(), Some("W_1"));
    assert_eq!(reparse(&sj).to_spectrum().unwrap(), s);
}

#[test]
fn float_matrices_round_trip() {
    let p: FloatOperator = ExactOperator::new(stochastic_from_seed(4, &[1, 2, 3, 0, 5])).unwrap().to_f64();
    let back: FloatOperator = reparse(&MatrixJson::from_operator(&p)).to_operator().unwrap();
    assert_eq!(back, p);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poset_json_round_trip(n in 1usize..=6, mask in any::<u64>()) {
        let poset = poset_from_mask(n, mask);
        let json = PosetJson::from_poset(&poset);
        prop_assert_eq!(reparse(&json).to_poset().unwrap(), poset);
    }

    #[test]
    fn matrix_json_round_trip(dim in 1usize..=5, seed in prop::collection::vec(any::<u8>(), 7)) {
        let p = ExactOperator::new(stochastic_from_seed(dim, &seed)).unwrap();
        let json = MatrixJson::from_operator(&p);
        prop_assert_eq!(reparse(&json).to_operator::<Rational>().unwrap(), p);
    }

    #[test]
    fn partition_json_round_trip(labels in prop::collection::vec(0usize..4, 1..10)) {
        let l = Partition::from_labels(&labels);
        prop_assert_eq!(reparse(&PartitionJson::from_partition(&l)).to_partition().unwrap(), l);
    }

    #[test]
    fn measure_json_round_trip(raw in prop::collection::vec(0i64..10, 1..6)) {
        let total: i64 = raw.iter().sum::<i64>().max(1);
        let mut w: Vec<Rational> = raw.iter().map(|&v| r(v, total)).collect();
        if raw.iter().all(|&v| v == 0) {
            w[0] = r(1, 1);
        }
        let m = Measure::new(w).unwrap();
        prop_assert_eq!(reparse(&MeasureJson::from_measure(&m)).to_measure::<Rational>().unwrap(), m);
    }
}

mod common;

use proptest::prelude::*;
use qvhs::frobenius::fixtures::{p2xp2_algebra, p4_algebra};
use qvhs::frobenius::{algebra_from_potential, check_classical_wdvv, classical_potential, validate_frobenius};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_algebras_validate_and_roundtrip(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let alg = common::random_algebra(&mut rng);
        let rep = validate_frobenius(&alg);
        prop_assert!(rep.passed(), "{}", rep);
        let phi = classical_potential(&alg).unwrap();
        prop_assert!(phi.is_weighted_homogeneous());
        prop_assert_eq!(check_classical_wdvv(&phi).unwrap(), None);
        prop_assert_eq!(algebra_from_potential(&phi).unwrap(), alg);
    }

    #[test]
    fn adapt_basis_reaches_an_adapted_algebra(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, 2, 2);
        let alg = shape.algebra();
        prop_assert!(alg.is_adapted());
        let (again, p) = alg.adapt_basis().unwrap();
        prop_assert!(again.is_adapted());
        prop_assert_eq!(alg.change_basis(&p).unwrap(), again);
    }
}

#[test]
fn fixtures_validate() {
    for alg in [p4_algebra(), p2xp2_algebra()] {
        assert!(validate_frobenius(&alg).passed());
    }
    assert!(p4_algebra().is_adapted());
    assert!(!p2xp2_algebra().is_adapted());
}

mod common;

use proptest::prelude::*;
use qvhs::asymptotics::{is_q_skew, period_flag, check_isotropy, rho_component, solve_gamma};
use qvhs::frobenius::fixtures::p4_algebra;
use qvhs::hodge::{product_from_orbit, q_from_b};
use qvhs::quantum::{
    asymptotic_data, build_connection, check_flatness, check_q_flatness, check_transversality, check_wdvv,
    flat_frame, flat_frame_residual, gamma_from_potential, potential_from_gamma, quantum_product,
    quantum_wdvv_witness, xi_check, QuantumPotential,
};
use qvhs::rational::rat;
use qvhs::QSeries;

const ORDER: u32 = 5;

fn e0(n: usize) -> Vec<qvhs::Rat> {
    (0..n).map(|i| rat(i64::from(i == 0))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn equivalence_chain(seed in any::<u64>(), s in 1usize..=2, perturbed in any::<bool>()) {
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, 2, s);
        let mut pot = common::random_quantum(&mut rng, &shape, ORDER);
        if perturbed {
            pot = common::perturb(&mut rng, &pot);
        } else {
            prop_assert!(check_wdvv(&pot).passed());
        }
        let wdvv = check_wdvv(&pot).passed();
        let conn = build_connection(&pot);
        prop_assert_eq!(wdvv, check_flatness(&conn).is_none());
        prop_assert_eq!(wdvv, xi_check(&pot).is_none());
        // the lowest failing degree agrees across the three residuals
        let degree = |w: Option<qvhs::report::Witness>| w.and_then(|w| w.alpha).map(|a| a.iter().sum::<u32>());
        prop_assert_eq!(degree(quantum_wdvv_witness(&pot)), degree(xi_check(&pot)));
        prop_assert_eq!(degree(check_flatness(&conn)), degree(xi_check(&pot)));
    }

    #[test]
    fn connection_identities(seed in any::<u64>(), r in 1usize..=3) {
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, r, r);
        let pot = common::random_quantum(&mut rng, &shape, ORDER);
        let alg = pot.classical_algebra().unwrap();
        let conn = build_connection(&pot);
        let qp = quantum_product(&pot).unwrap();
        let q = q_from_b(alg.bform(), pot.basis()).unwrap();
        prop_assert_eq!(check_q_flatness(&conn, &q), None);
        prop_assert_eq!(check_transversality(&conn, pot.basis()), None);
        for j in 0..r {
            let t = pot.basis().t2(j + 1);
            prop_assert_eq!(&conn.a[j], &qp.mult_matrix(t));
            prop_assert_eq!(conn.residues()[j].clone(), alg.mult_matrix(t));
        }
        for a in 0..alg.dim() {
            for b in 0..alg.dim() {
                for d in 0..alg.dim() {
                    prop_assert_eq!(qp.at_zero(a, b, d), alg.structure_constant(a, b, d).clone());
                }
            }
        }
    }

    #[test]
    fn flat_frame_is_flat(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, 2, 2);
        let pot = common::random_quantum(&mut rng, &shape, ORDER);
        let conn = build_connection(&pot);
        let frame = flat_frame(&pot).unwrap();
        for res in flat_frame_residual(&conn, &frame).unwrap() {
            prop_assert!(res.is_zero());
        }
        let m = pot.basis().m();
        let last = frame.select_columns(&[m]);
        prop_assert_eq!(last.terms().count(), 1);
        prop_assert_eq!(last.z_coefficient(&[0, 0]).constant_term(), qvhs::Mat::unit(m + 1, 1, m, 0));
    }

    #[test]
    fn gamma_roundtrip_and_solver(seed in any::<u64>(), r in 1usize..=2) {
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, r, r + 1);
        let pot = common::random_quantum(&mut rng, &shape, ORDER);
        let asym = asymptotic_data(&pot).unwrap();
        let g = gamma_from_potential(&pot).unwrap();
        prop_assert!(g.gamma.constant_term().is_zero());
        prop_assert!(rho_component(&asym).unwrap().iter().all(QSeries::is_zero));
        let prod = product_from_orbit(asym.orbit(), &e0(pot.basis().dim())).unwrap();
        prop_assert_eq!(potential_from_gamma(&asym, &prod).unwrap(), pot.clone());
        // the two constructions agree on every block, starred ones included
        let solved = solve_gamma(asym.orbit(), &asym.gamma_minus_one()).unwrap();
        prop_assert_eq!(solved.gamma(), asym.gamma());
        let flag = period_flag(&asym).unwrap();
        prop_assert_eq!(check_isotropy(&flag, asym.orbit().q()).unwrap(), None);
        for alpha in asym.gamma().support() {
            prop_assert!(is_q_skew(asym.orbit().q(), &asym.gamma().coefficient(&alpha)));
        }
    }
}

#[test]
fn zero_gamma_recovers_classical_part() {
    let pot = QuantumPotential::from_algebra(&p4_algebra(), vec![QSeries::zero(1, ORDER)], ORDER).unwrap();
    let asym = asymptotic_data(&pot).unwrap();
    assert!(asym.gamma().is_zero());
    let prod = product_from_orbit(asym.orbit(), &e0(5)).unwrap();
    let back = potential_from_gamma(&asym, &prod).unwrap();
    assert!(back.psi()[0].is_zero());
    assert_eq!(back.classical(), pot.classical());
}

#[test]
fn r_one_has_no_two_forms() {
    let psi = QSeries::from_terms(1, ORDER, [(vec![1], rat(7)), (vec![3], rat(-2))]).unwrap();
    let pot = QuantumPotential::from_algebra(&p4_algebra(), vec![psi], ORDER).unwrap();
    assert!(check_wdvv(&pot).passed());
    assert_eq!(xi_check(&pot), None);
    assert_eq!(check_flatness(&build_connection(&pot)), None);
}

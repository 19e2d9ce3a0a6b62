mod common;

use proptest::prelude::*;
use qvhs::asymptotics::{
    canonical_coordinates, change_coordinates, check_integrability, check_isotropy, horizontality_residual,
    master_equation_residual, period_flag, rho_component, rho_component_in, solve_gamma, solve_gamma_with,
    AsymptoticData, CoordinateChange, SolverOptions,
};
use qvhs::forms::PivotChoice;
use qvhs::hodge::NilpotentOrbitData;
use qvhs::quantum::asymptotic_data;
use qvhs::rational::rat;
use qvhs::{Error, Mat, QSeries, SeriesMatrix};
use num_traits::Zero;
use rand::Rng;

const ORDER: u32 = 5;

fn fixture(seed: u64, r: usize) -> AsymptoticData {
    let mut rng = common::rng(seed);
    let shape = common::random_shape(&mut rng, r, r + 1);
    asymptotic_data(&common::random_quantum(&mut rng, &shape, ORDER)).unwrap()
}

fn random_change(seed: u64, r: usize) -> CoordinateChange {
    let mut rng = common::rng(seed);
    CoordinateChange::new((0..r).map(|_| common::random_series(&mut rng, r, ORDER, 0.3, Some(rat(1)))).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn change_then_inverse_is_identity(seed in any::<u64>(), r in 1usize..=2) {
        let asym = fixture(seed, r);
        let change = random_change(seed ^ 5, r);
        let moved = change_coordinates(&asym, &change).unwrap();
        let back = change_coordinates(&moved, &change.inverse().unwrap()).unwrap();
        prop_assert_eq!(back.gamma(), asym.gamma());
    }

    #[test]
    fn solver_on_changed_coordinates(seed in any::<u64>(), r in 1usize..=2) {
        let asym = change_coordinates(&fixture(seed, r), &random_change(seed ^ 9, r)).unwrap();
        let rr = asym.gamma_minus_one();
        prop_assert_eq!(check_integrability(asym.orbit(), &rr).unwrap(), None);
        let solved = solve_gamma(asym.orbit(), &rr).unwrap();
        prop_assert_eq!(solved.gamma(), asym.gamma());
        prop_assert_eq!(solved.gamma_minus_one(), rr.clone());
        for res in master_equation_residual(asym.orbit(), &solved.g(), &rr).unwrap() {
            prop_assert!(res.is_zero());
        }
        for res in horizontality_residual(&solved).unwrap() {
            prop_assert!(res.is_zero());
        }
        let other = solve_gamma_with(asym.orbit(), &rr, SolverOptions { pivot: PivotChoice::Last }).unwrap();
        prop_assert_eq!(period_flag(&other).unwrap(), period_flag(&solved).unwrap());
        prop_assert_eq!(check_isotropy(&period_flag(&solved).unwrap(), asym.orbit().q()).unwrap(), None);
    }

    #[test]
    fn canonical_coordinates_are_idempotent(seed in any::<u64>(), r in 1usize..=2) {
        let base = fixture(seed, r);
        let change = random_change(seed ^ 3, r);
        let asym = change_coordinates(&base, &change).unwrap();
        let (found, canon) = canonical_coordinates(&asym).unwrap();
        prop_assert!(rho_component(&canon).unwrap().iter().all(QSeries::is_zero));
        let (again, same) = canonical_coordinates(&canon).unwrap();
        prop_assert!(again.is_identity());
        prop_assert_eq!(same.gamma(), canon.gamma());
        // the potential's own coordinates were canonical, so the change found
        // undoes the random one
        prop_assert!(change.then(&found).unwrap().is_identity());
        prop_assert_eq!(canon.gamma(), base.gamma());
    }

    #[test]
    fn rho_does_not_depend_on_the_basis(seed in any::<u64>()) {
        let asym = change_coordinates(&fixture(seed, 2), &random_change(seed ^ 11, 2)).unwrap();
        let g = asym.grading();
        let mut rng = common::rng(seed ^ 13);
        let lv = g.levels().to_vec();
        let n = lv.len();
        let m = loop {
            let m = Mat::from_fn(n, n, |i, j| if lv[i] == lv[j] { common::small_rat(&mut rng) } else { rat(0) });
            if !m.determinant().is_zero() {
                break m;
            }
        };
        let other = g.rebased(&m).unwrap();
        prop_assert_eq!(rho_component_in(&asym, &other).unwrap(), rho_component(&asym).unwrap());
    }

    #[test]
    fn non_integrable_input_is_rejected(seed in any::<u64>()) {
        let base = fixture(seed, 2);
        let orbit = base.orbit();
        let g = base.grading();
        let mut rng = common::rng(seed ^ 17);
        let lv = g.levels().to_vec();
        let n = lv.len();
        let x = g.from_adapted(&Mat::from_fn(n, n, |i, j| {
            if lv[j] == lv[i] + 1 && rng.gen_bool(0.7) { common::nonzero_rat(&mut rng) } else { rat(0) }
        }));
        let q1 = QSeries::var(0, 2, ORDER);
        let r = SeriesMatrix::from_const(&x, 2, ORDER).scale_series(&q1).unwrap();
        match check_integrability(orbit, &r).unwrap() {
            Some(_) => {
                let err = solve_gamma(orbit, &r).unwrap_err();
                prop_assert!(matches!(err, Error::Solver { .. } | Error::MasterEquation { .. }), "{}", err);
            }
            None => {
                solve_gamma(orbit, &r).unwrap();
            }
        }
    }
}

#[test]
fn q1_n1_on_two_variables() {
    let asym = fixture(42, 2);
    let orbit: &NilpotentOrbitData = asym.orbit();
    let q1 = QSeries::var(0, 2, ORDER);
    let r = SeriesMatrix::from_const(&orbit.nilpotents()[0], 2, ORDER).scale_series(&q1).unwrap();
    let solved = solve_gamma(orbit, &r).unwrap();
    let rho = rho_component(&solved).unwrap();
    assert_eq!(rho, vec![q1.clone(), QSeries::zero(2, ORDER)]);
    let (change, canon) = canonical_coordinates(&solved).unwrap();
    assert_eq!(change.factors()[0], q1.exp().unwrap());
    assert!(canon.gamma().is_zero());
}

#[test]
fn non_simple_change_is_rejected() {
    let f = QSeries::from_terms(1, 3, [(vec![0], rat(2))]).unwrap();
    assert!(matches!(CoordinateChange::new(vec![f]), Err(Error::NotSimpleChange { j: 0, .. })));
}

mod common;

use proptest::prelude::*;
use qvhs::forms::{primitive_of_closed_form, primitive_of_closed_form_with, wedge, LogForm1, PivotChoice};
use qvhs::{Error, Mat, QSeries, SeriesMatrix};

const ORDER: u32 = 5;

fn series(seed: u64, nv: usize, constant: bool) -> QSeries {
    let mut rng = common::rng(seed);
    let c = constant.then(|| common::small_rat(&mut rng));
    common::random_series(&mut rng, nv, ORDER, 0.35, c)
}

fn matrix(seed: u64, nv: usize, n: usize) -> SeriesMatrix {
    let mut m = SeriesMatrix::zeros(n, n, nv, ORDER);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, series(seed.wrapping_mul(31).wrapping_add((i * n + j) as u64), nv, false));
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ring_axioms(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (f, g, h) = (series(a, 2, true), series(b, 2, true), series(c, 2, true));
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&f * &g, &g * &f);
    }

    #[test]
    fn theta_is_a_derivation(a in any::<u64>(), b in any::<u64>(), j in 0usize..3) {
        let (f, g) = (series(a, 3, true), series(b, 3, true));
        let lhs = (&f * &g).theta(j).unwrap();
        let rhs = &(&f.theta(j).unwrap() * &g) + &(&f * &g.theta(j).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_log_inverse(a in any::<u64>()) {
        let h = series(a, 2, false);
        prop_assert_eq!(h.exp().unwrap().log().unwrap(), h.clone());
        let u = &QSeries::one(2, ORDER) + &h;
        prop_assert_eq!(u.log().unwrap().exp().unwrap(), u.clone());
        prop_assert_eq!(&u * &u.recip().unwrap(), QSeries::one(2, ORDER));
    }

    #[test]
    fn composition_is_a_ring_map(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (f, g) = (series(a, 2, true), series(b, 2, true));
        let subs = vec![
            &QSeries::var(0, 2, ORDER) * &(&QSeries::one(2, ORDER) + &series(c, 2, false)),
            QSeries::var(1, 2, ORDER),
        ];
        let lhs = (&f * &g).compose(&subs).unwrap();
        prop_assert_eq!(lhs, &f.compose(&subs).unwrap() * &g.compose(&subs).unwrap());
    }

    #[test]
    fn primitive_inverts_d(a in any::<u64>(), pivot_last in any::<bool>()) {
        let f = matrix(a, 3, 2);
        let omega = LogForm1::exterior_derivative(&f);
        let pivot = if pivot_last { PivotChoice::Last } else { PivotChoice::First };
        let prim = primitive_of_closed_form_with(&omega, pivot).unwrap();
        prop_assert_eq!(&prim, &f);
        prop_assert_eq!(LogForm1::exterior_derivative(&prim), omega);
    }

    #[test]
    fn wedge_antisymmetry(a in any::<u64>(), b in any::<u64>()) {
        let x = LogForm1::new((0..3).map(|j| matrix(a ^ j, 3, 1)).collect()).unwrap();
        let y = LogForm1::new((0..3).map(|j| matrix(b ^ (j + 7), 3, 1)).collect()).unwrap();
        let xy = wedge(&x, &y).unwrap();
        prop_assert!(xy.try_add(&wedge(&y, &x).unwrap()).unwrap().is_zero());
        for j in 0..3 {
            for k in 0..3 {
                prop_assert_eq!(xy.component(j, k), -&xy.component(k, j));
            }
        }
    }

    #[test]
    fn exp_log_of_nilpotent_matrices(a in any::<u64>()) {
        let mut m = matrix(a, 2, 4);
        for i in 0..4 {
            for j in 0..4 {
                if j <= i {
                    m.set(i, j, QSeries::zero(2, ORDER));
                }
            }
        }
        let e = m.exp_nilpotent().unwrap();
        prop_assert_eq!(e.log_unipotent().unwrap(), m.clone());
        prop_assert_eq!(e.try_mul(&e.inverse_unipotent().unwrap()).unwrap(), SeriesMatrix::identity(4, 2, ORDER));
    }
}

#[test]
fn non_closed_form_is_rejected() {
    let q1 = QSeries::var(0, 2, ORDER);
    let mut a = SeriesMatrix::zeros(1, 1, 2, ORDER);
    a.set(0, 0, q1);
    let omega = LogForm1::new(vec![a, SeriesMatrix::zeros(1, 1, 2, ORDER)]).unwrap();
    assert!(primitive_of_closed_form(&omega).is_ok());
    let q2 = QSeries::var(1, 2, ORDER);
    let mut b = SeriesMatrix::zeros(1, 1, 2, ORDER);
    b.set(0, 0, q2);
    let omega = LogForm1::new(vec![b, SeriesMatrix::zeros(1, 1, 2, ORDER)]).unwrap();
    assert!(matches!(primitive_of_closed_form(&omega), Err(Error::NotClosed { .. })));
}

#[test]
fn constant_form_is_rejected() {
    let omega = LogForm1::constant(&[Mat::from_i64(&[&[1]])], ORDER).unwrap();
    assert!(matches!(primitive_of_closed_form(&omega), Err(Error::FormConstantTerm { .. })));
}

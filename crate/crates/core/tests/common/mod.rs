//! Seeded generators shared by the integration and acceptance tests.
#![allow(dead_code)]

use num_traits::Zero;
use qvhs::frobenius::{adapted_algebra, FrobeniusAlgebra, GradedBasisSpec};
use qvhs::matrix::Mat;
use qvhs::quantum::QuantumPotential;
use qvhs::rational::{frac, rat};
use qvhs::series::{monomials_up_to, total_degree};
use qvhs::{QSeries, Rat};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat<R: Rng>(rng: &mut R) -> Rat {
    let num = rng.gen_range(-5i64..=5);
    let den = rng.gen_range(1i64..=4);
    frac(num, den)
}

pub fn nonzero_rat<R: Rng>(rng: &mut R) -> Rat {
    loop {
        let x = small_rat(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Random series with roughly `density` of the monomials up to `order`
/// present. `constant` controls the constant term.
pub fn random_series<R: Rng>(rng: &mut R, num_vars: usize, order: u32, density: f64, constant: Option<Rat>) -> QSeries {
    let mut s = QSeries::zero(num_vars, order);
    for alpha in monomials_up_to(num_vars, order) {
        if total_degree(&alpha) == 0 {
            if let Some(c) = &constant {
                s.add_term(alpha, c.clone());
            }
            continue;
        }
        if rng.gen_bool(density) {
            s.add_term(alpha, nonzero_rat(rng));
        }
    }
    s
}

/// Rational orthogonal `s x s` matrix: Pythagorean Givens rotations in
/// random planes times a signed permutation.
pub fn rational_orthogonal<R: Rng>(rng: &mut R, s: usize) -> Mat {
    let triples = [(3, 4, 5), (5, 12, 13), (8, 15, 17)];
    let mut perm: Vec<usize> = (0..s).collect();
    perm.shuffle(rng);
    let mut o = Mat::from_fn(s, s, |i, j| {
        if perm[i] == j {
            if rng.gen_bool(0.5) { rat(1) } else { rat(-1) }
        } else {
            rat(0)
        }
    });
    if s < 2 {
        return o;
    }
    for _ in 0..rng.gen_range(0..=2) {
        let i = rng.gen_range(0..s);
        let mut j = rng.gen_range(0..s - 1);
        if j >= i {
            j += 1;
        }
        let (a, b, c) = triples[rng.gen_range(0..triples.len())];
        let (cs, sn) = (frac(a, c), frac(b, c));
        let g = Mat::from_fn(s, s, |x, y| {
            if (x, y) == (i, i) || (x, y) == (j, j) {
                cs.clone()
            } else if (x, y) == (i, j) {
                -sn.clone()
            } else if (x, y) == (j, i) {
                sn.clone()
            } else if x == y {
                rat(1)
            } else {
                rat(0)
            }
        });
        o = &g * &o;
    }
    o
}

/// Ingredients of an associative adapted algebra:
/// `P^a = sum_t O_{at} c_t x_t x_t^T`.
#[derive(Clone, Debug)]
pub struct AdaptedShape {
    pub r: usize,
    pub s: usize,
    pub o: Mat,
    pub c: Vec<Rat>,
    /// `x[t]`, nonnegative integer vectors
    pub x: Vec<Vec<u32>>,
}

impl AdaptedShape {
    pub fn pa(&self) -> Vec<Mat> {
        (0..self.s)
            .map(|a| {
                let mut m = Mat::zeros(self.r, self.r);
                for t in 0..self.s {
                    let w = &self.o[(a, t)] * &self.c[t];
                    m = &m + &Mat::from_fn(self.r, self.r, |j, k| &w * Rat::from_integer((self.x[t][j] * self.x[t][k]).into()));
                }
                m
            })
            .collect()
    }

    pub fn algebra(&self) -> FrobeniusAlgebra {
        adapted_algebra(self.r, self.s, &self.pa()).expect("valid shape")
    }
}

pub fn random_shape<R: Rng>(rng: &mut R, r: usize, s: usize) -> AdaptedShape {
    let o = rational_orthogonal(rng, s);
    let c = (0..s).map(|_| nonzero_rat(rng)).collect();
    let x = (0..s)
        .map(|t| loop {
            let v: Vec<u32> = (0..r).map(|_| rng.gen_range(0..=2)).collect();
            if t < r && s >= r {
                // first r vectors span, so the orbit is maximally unipotent
                let mut v = v;
                v[t] = v[t].max(1);
                for (k, e) in v.iter_mut().enumerate() {
                    if k > t {
                        *e = 0;
                    }
                }
                break v;
            }
            if v.iter().any(|&e| e > 0) {
                break v;
            }
        })
        .collect();
    AdaptedShape { r, s, o, c, x }
}

/// Invertible graded basis change with `T_0` fixed.
pub fn random_graded_change<R: Rng>(rng: &mut R, bs: GradedBasisSpec) -> Mat {
    let n = bs.dim();
    loop {
        let m = Mat::from_fn(n, n, |i, j| {
            if bs.degree(i) != bs.degree(j) {
                rat(0)
            } else if i == 0 && j == 0 {
                rat(1)
            } else {
                small_rat(rng)
            }
        });
        if !m.determinant().is_zero() {
            return m;
        }
    }
}

/// Random validating algebra with `r, s <= 3` and dimension at most 10,
/// possibly in a non-adapted graded basis.
pub fn random_algebra<R: Rng>(rng: &mut R) -> FrobeniusAlgebra {
    loop {
        let r = rng.gen_range(1..=3);
        let s = rng.gen_range(0..=3);
        if 2 * r + s + 2 > 10 {
            continue;
        }
        let alg = random_shape(rng, r, s).algebra();
        if rng.gen_bool(0.5) {
            let p = random_graded_change(rng, alg.basis());
            return alg.change_basis(&p).expect("invertible graded change");
        }
        return alg;
    }
}

/// WDVV-passing potential: `psi^a = sum_t O_{at} f_t(q^{x_t})` for random
/// univariate `f_t` with `f_t(0) = 0`.
pub fn random_quantum<R: Rng>(rng: &mut R, shape: &AdaptedShape, order: u32) -> QuantumPotential {
    let r = shape.r;
    let mut psi = vec![QSeries::zero(r, order); shape.s];
    for t in 0..shape.s {
        let deg = shape.x[t].iter().sum::<u32>().max(1);
        let mut f = QSeries::zero(r, order);
        for k in 1..=order / deg {
            if rng.gen_bool(0.7) {
                let alpha: Vec<u32> = shape.x[t].iter().map(|e| e * k).collect();
                f.add_term(alpha, nonzero_rat(rng));
            }
        }
        for (a, p) in psi.iter_mut().enumerate() {
            if !shape.o[(a, t)].is_zero() {
                *p = &*p + &f.scale(&shape.o[(a, t)]);
            }
        }
    }
    QuantumPotential::from_algebra(&shape.algebra(), psi, order).expect("valid potential")
}

/// Adds a stray monomial to one `psi^a`, which generically breaks WDVV.
pub fn perturb<R: Rng>(rng: &mut R, pot: &QuantumPotential) -> QuantumPotential {
    let r = pot.r();
    let mut psi = pot.psi().to_vec();
    let a = rng.gen_range(0..psi.len());
    let alpha: Vec<u32> = loop {
        let v: Vec<u32> = (0..r).map(|_| rng.gen_range(0..=2)).collect();
        if v.iter().sum::<u32>() > 0 && v.iter().filter(|&&e| e > 0).count() >= r.min(2) {
            break v;
        }
    };
    let mut stray = QSeries::zero(r, pot.order());
    stray.add_term(alpha, nonzero_rat(rng));
    psi[a] = &psi[a] + &stray;
    QuantumPotential::new(pot.classical().clone(), psi, pot.order()).expect("valid potential")
}

//! Graded Frobenius algebras of weight four and their cubic potentials.
//!
//! Basis `T_0..T_m`, `m = 2r+s+1`, with degrees
//! `0 | 2 (1..=r) | 4 (r+1..=r+s) | 6 (r+s+1..=2r+s) | 8 (m)`.

use std::collections::BTreeMap;
use std::ops::Range;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::rational::{factorial, format_rat, rational_sqrt, Rat};
use crate::report::{ValidationReport, Witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GradedBasisSpec {
    pub r: usize,
    pub s: usize,
}

impl GradedBasisSpec {
    pub fn new(r: usize, s: usize) -> Self {
        GradedBasisSpec { r, s }
    }

    /// Index of the top-degree vector `T_m`.
    pub fn m(&self) -> usize {
        2 * self.r + self.s + 1
    }

    pub fn dim(&self) -> usize {
        self.m() + 1
    }

    /// Basis indices of degree `2p`, `p = 0..=4`.
    pub fn block(&self, p: usize) -> Range<usize> {
        let (r, s) = (self.r, self.s);
        match p {
            0 => 0..1,
            1 => 1..r + 1,
            2 => r + 1..r + s + 1,
            3 => r + s + 1..2 * r + s + 1,
            4 => self.m()..self.m() + 1,
            _ => 0..0,
        }
    }

    /// Degree `deg T_a` (0, 2, 4, 6 or 8).
    pub fn degree(&self, a: usize) -> u32 {
        (0..5).find(|&p| self.block(p).contains(&a)).map(|p| 2 * p as u32).expect("index in range")
    }

    /// Index of `T_j`, `j = 1..=r` (degree 2).
    pub fn t2(&self, j: usize) -> usize {
        j
    }

    /// Index of `T_{r+a}`, `a = 1..=s` (degree 4).
    pub fn t4(&self, a: usize) -> usize {
        self.r + a
    }

    /// Index of `T_{r+s+l}`, `l = 1..=r` (degree 6).
    pub fn t6(&self, l: usize) -> usize {
        self.r + self.s + l
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::InvalidAlgebra(format!(
                "dimension {n} does not match r={}, s={} (expected {})",
                self.r,
                self.s,
                self.dim()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusAlgebra {
    basis: GradedBasisSpec,
    /// `c[(a*n + b)*n + c]` is the coefficient of `T_c` in `T_a * T_b`
    consts: Vec<Rat>,
    bform: Mat,
}

impl FrobeniusAlgebra {
    /// Builds an algebra from `product(a, b) = coefficients of T_a * T_b`.
    /// Only shapes are checked here; see [`validate_frobenius`].
    pub fn from_fn(basis: GradedBasisSpec, bform: Mat, mut product: impl FnMut(usize, usize) -> Vec<Rat>) -> Result<Self> {
        let n = basis.dim();
        if bform.shape() != (n, n) {
            return Err(Error::Shape { op: "bilinear form", left: bform.shape(), right: (n, n) });
        }
        let mut consts = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                let v = product(a, b);
                if v.len() != n {
                    return Err(Error::InvalidAlgebra(format!("product T_{a}*T_{b} has {} coefficients, expected {n}", v.len())));
                }
                consts.extend(v);
            }
        }
        Ok(FrobeniusAlgebra { basis, consts, bform })
    }

    pub fn basis(&self) -> GradedBasisSpec {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn bform(&self) -> &Mat {
        &self.bform
    }

    /// Coefficient `c_{ab}^c`.
    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> &Rat {
        let n = self.dim();
        &self.consts[(a * n + b) * n + c]
    }

    pub fn set_structure_constant(&mut self, a: usize, b: usize, c: usize, v: Rat) {
        let n = self.dim();
        self.consts[(a * n + b) * n + c] = v;
    }

    /// Coordinates of `T_a * T_b`.
    pub fn product(&self, a: usize, b: usize) -> Vec<Rat> {
        let n = self.dim();
        self.consts[(a * n + b) * n..(a * n + b + 1) * n].to_vec()
    }

    /// Product of two coordinate vectors.
    pub fn multiply(&self, u: &[Rat], v: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        let mut out = vec![Rat::zero(); n];
        for (a, ua) in u.iter().enumerate() {
            if ua.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let f = ua * vb;
                for (c, o) in out.iter_mut().enumerate() {
                    let k = self.structure_constant(a, b, c);
                    if !k.is_zero() {
                        *o += &f * k;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `v -> T_a * v`; column `b` holds `T_a * T_b`.
    pub fn mult_matrix(&self, a: usize) -> Mat {
        let n = self.dim();
        Mat::from_fn(n, n, |c, b| self.structure_constant(a, b, c).clone())
    }

    /// Matrix of `v -> u * v`.
    pub fn mult_matrix_vec(&self, u: &[Rat]) -> Mat {
        let n = self.dim();
        let mut out = Mat::zeros(n, n);
        for (a, ua) in u.iter().enumerate() {
            if !ua.is_zero() {
                out = &out + &self.mult_matrix(a).scale(ua);
            }
        }
        out
    }

    /// Re-expresses the algebra in the basis whose `b`-th vector is column
    /// `b` of `p` (in old coordinates). `p` must be invertible and graded.
    pub fn change_basis(&self, p: &Mat) -> Result<Self> {
        let n = self.dim();
        let pinv = p.inverse()?;
        let cols = p.columns();
        let bform = &(&p.transpose() * &self.bform) * p;
        let mut consts = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                consts.extend(pinv.mul_vec(&self.multiply(&cols[a], &cols[b])));
            }
        }
        Ok(FrobeniusAlgebra { basis: self.basis, consts, bform })
    }

    /// `Ok(())` when the basis is adapted: `B(T_0, T_m) = 1`,
    /// `B(T_j, T_{r+s+l}) = delta_{jl}` and the degree-4 block is
    /// `B`-orthonormal.
    pub fn check_adapted(&self) -> Result<()> {
        let bs = self.basis;
        let b = &self.bform;
        if !b[(0, bs.m())].is_one() {
            return Err(Error::NotAdapted(format!("B(T_0, T_m) = {}", format_rat(&b[(0, bs.m())]))));
        }
        for j in 1..=bs.r {
            for l in 1..=bs.r {
                let want = if j == l { Rat::one() } else { Rat::zero() };
                if b[(bs.t2(j), bs.t6(l))] != want {
                    return Err(Error::NotAdapted(format!("B(T_{}, T_{}) != {}", bs.t2(j), bs.t6(l), format_rat(&want))));
                }
            }
        }
        for a in 1..=bs.s {
            for c in 1..=bs.s {
                let want = if a == c { Rat::one() } else { Rat::zero() };
                if b[(bs.t4(a), bs.t4(c))] != want {
                    return Err(Error::NotAdapted(format!("B(T_{}, T_{}) != {}", bs.t4(a), bs.t4(c), format_rat(&want))));
                }
            }
        }
        Ok(())
    }

    pub fn is_adapted(&self) -> bool {
        self.check_adapted().is_ok()
    }

    /// Moves to an adapted basis: rational Gram-Schmidt on the degree-4
    /// block, then `B`-duals for degrees 6 and 8. Returns the new algebra and
    /// the change-of-basis matrix (new basis vectors as columns). Fails when
    /// a Gram-Schmidt norm is not the square of a positive rational.
    pub fn adapt_basis(&self) -> Result<(FrobeniusAlgebra, Mat)> {
        let bs = self.basis;
        let n = self.dim();
        let b = &self.bform;
        let unit = |i: usize| -> Vec<Rat> { (0..n).map(|k| if k == i { Rat::one() } else { Rat::zero() }).collect() };
        let mut cols: Vec<Vec<Rat>> = (0..n).map(unit).collect();
        let mut ortho: Vec<Vec<Rat>> = Vec::new();
        for a in bs.block(2) {
            let mut v = unit(a);
            for u in &ortho {
                let c = b.bilinear(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= &c * y;
                }
            }
            let norm2 = b.bilinear(&v, &v);
            let Some(norm) = rational_sqrt(&norm2).filter(|x| !x.is_zero()) else {
                return Err(Error::NotAdapted(format!(
                    "degree-4 Gram-Schmidt norm {} at T_{a} is not the square of a positive rational",
                    format_rat(&norm2)
                )));
            };
            let v: Vec<Rat> = v.iter().map(|x| x / &norm).collect();
            cols[a] = v.clone();
            ortho.push(v);
        }
        // degree 6: columns T'_{6} = T_6 * M^{-1}, M_{jl} = B(T_j, T_{r+s+l})
        let m26 = Mat::from_fn(bs.r, bs.r, |j, l| b[(bs.t2(j + 1), bs.t6(l + 1))].clone());
        let minv = m26.inverse().map_err(|_| Error::Degenerate("pairing between degrees 2 and 6".into()))?;
        for l in 0..bs.r {
            let mut v = vec![Rat::zero(); n];
            for k in 0..bs.r {
                v[bs.t6(k + 1)] = minv[(k, l)].clone();
            }
            cols[bs.t6(l + 1)] = v;
        }
        let b08 = b[(0, bs.m())].clone();
        if b08.is_zero() {
            return Err(Error::Degenerate("B(T_0, T_m) = 0".into()));
        }
        cols[bs.m()] = unit(bs.m()).iter().map(|x| x / &b08).collect();
        let p = Mat::from_columns(n, &cols);
        let out = self.change_basis(&p)?;
        out.check_adapted()?;
        Ok((out, p))
    }
}

/// Checks every Frobenius algebra axiom, recording a witness for the first
/// failing index tuple of each.
pub fn validate_frobenius(alg: &FrobeniusAlgebra) -> ValidationReport {
    let n = alg.dim();
    let bs = alg.basis();
    let b = alg.bform();
    let mut rep = ValidationReport::new();

    let triples = || (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))));

    let w = triples()
        .find(|&(a, b, c)| alg.structure_constant(a, b, c) != alg.structure_constant(b, a, c))
        .map(|(a, b, c)| Witness::indices(&[a, b, c]));
    rep.record("commutativity", w);

    let w = triples()
        .find(|&(a, b, c)| {
            !alg.structure_constant(a, b, c).is_zero() && bs.degree(c) != bs.degree(a) + bs.degree(b)
        })
        .map(|(a, b, c)| Witness::indices(&[a, b, c]));
    rep.record("grading", w);

    let w = (0..n)
        .flat_map(|b| (0..n).map(move |c| (b, c)))
        .find(|&(b, c)| {
            let want = if b == c { Rat::one() } else { Rat::zero() };
            *alg.structure_constant(0, b, c) != want
        })
        .map(|(b, c)| Witness::indices(&[0, b, c]));
    rep.record("unit", w);

    let pairs = || (0..n).flat_map(move |a| (0..n).map(move |c| (a, c)));
    let w = pairs().find(|&(a, c)| b[(a, c)] != b[(c, a)]).map(|(a, c)| Witness::indices(&[a, c]));
    rep.record("b_symmetry", w);

    let w = pairs()
        .find(|&(a, c)| !b[(a, c)].is_zero() && bs.degree(a) + bs.degree(c) != 8)
        .map(|(a, c)| Witness::indices(&[a, c]));
    rep.record("b_orthogonality", w);

    let w = if b.determinant().is_zero() { Some(Witness::detail("det B = 0")) } else { None };
    rep.record("nondegeneracy", w);

    let products: Vec<Vec<Vec<Rat>>> = (0..n).map(|a| (0..n).map(|c| alg.product(a, c)).collect()).collect();
    let unit = |i: usize| -> Vec<Rat> { (0..n).map(|k| if k == i { Rat::one() } else { Rat::zero() }).collect() };
    let basis: Vec<Vec<Rat>> = (0..n).map(unit).collect();
    let w = triples()
        .find(|&(a, bb, c)| b.bilinear(&products[a][bb], &basis[c]) != b.bilinear(&basis[a], &products[bb][c]))
        .map(|(a, bb, c)| Witness::indices(&[a, bb, c]));
    rep.record("b_compatibility", w);

    let w = triples()
        .find(|&(a, bb, c)| alg.multiply(&products[a][bb], &basis[c]) != alg.multiply(&basis[a], &products[bb][c]))
        .map(|(a, bb, c)| Witness::indices(&[a, bb, c]));
    rep.record("associativity", w);

    rep
}

/// `P^a_{jk} = B(T_{r+a}, T_j * T_k)`; one `r x r` matrix per `a = 1..=s`
/// (stored zero-based).
pub fn pa_coefficients(alg: &FrobeniusAlgebra) -> Vec<Mat> {
    let bs = alg.basis();
    (1..=bs.s)
        .map(|a| {
            let e: Vec<Rat> = (0..alg.dim()).map(|k| if k == bs.t4(a) { Rat::one() } else { Rat::zero() }).collect();
            Mat::from_fn(bs.r, bs.r, |j, k| alg.bform().bilinear(&e, &alg.product(bs.t2(j + 1), bs.t2(k + 1))))
        })
        .collect()
}

/// Cubic form in `z_0..z_m`, stored as exponent vector -> coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicPotential {
    basis: GradedBasisSpec,
    coeffs: BTreeMap<Vec<u32>, Rat>,
}

impl CubicPotential {
    /// Rejects monomials that are not cubic or not of weighted degree 8.
    pub fn new(basis: GradedBasisSpec, terms: impl IntoIterator<Item = (Vec<u32>, Rat)>) -> Result<Self> {
        let n = basis.dim();
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::InvalidPotential(format!("exponent vector of length {} (expected {n})", e.len())));
            }
            if e.iter().sum::<u32>() != 3 {
                return Err(Error::InvalidPotential(format!("monomial {e:?} is not cubic")));
            }
            let degree: u32 = e.iter().enumerate().map(|(a, &k)| k * basis.degree(a)).sum();
            if degree != 8 {
                return Err(Error::NotQuasiHomogeneous { exps: e, degree });
            }
            if c.is_zero() {
                continue;
            }
            let slot = coeffs.entry(e).or_insert_with(Rat::zero);
            *slot += c;
        }
        coeffs.retain(|_, c: &mut Rat| !c.is_zero());
        Ok(CubicPotential { basis, coeffs })
    }

    pub fn basis(&self) -> GradedBasisSpec {
        self.basis
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> Rat {
        self.coeffs.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    /// Coefficient of `z_a z_b z_c`.
    pub fn coeff_of(&self, a: usize, b: usize, c: usize) -> Rat {
        self.coeff(&exponent(self.basis.dim(), &[a, b, c]))
    }

    /// `d^3 phi / dz_a dz_b dz_c` (a constant).
    pub fn third_partial(&self, a: usize, b: usize, c: usize) -> Rat {
        let e = exponent(self.basis.dim(), &[a, b, c]);
        let mult: Rat = e.iter().map(|&k| factorial(k)).product();
        self.coeff(&e) * mult
    }

    /// The symmetric array `phi_{abc}`.
    pub fn third_partials(&self) -> Vec<Mat> {
        let n = self.basis.dim();
        (0..n).map(|a| Mat::from_fn(n, n, |b, c| self.third_partial(a, b, c))).collect()
    }

    /// Weighted Euler identity `sum_a deg(z_a) z_a d/dz_a phi = 8 phi`,
    /// checked monomial by monomial.
    pub fn is_weighted_homogeneous(&self) -> bool {
        self.coeffs.keys().all(|e| e.iter().enumerate().map(|(a, &k)| k * self.basis.degree(a)).sum::<u32>() == 8)
    }
}

fn exponent(n: usize, idx: &[usize]) -> Vec<u32> {
    let mut e = vec![0u32; n];
    for &i in idx {
        e[i] += 1;
    }
    e
}

/// `phi_0 = (1/6) B(e_0, gamma^3)`: the coefficient of `z^e` for the
/// multiset `{a <= b <= c}` is `B(T_0, (T_a*T_b)*T_c) / e!`.
pub fn classical_potential(alg: &FrobeniusAlgebra) -> Result<CubicPotential> {
    let rep = validate_frobenius(alg);
    if let Some(f) = rep.failures().next() {
        let w = f.witness.as_ref().map(|w| w.to_string()).unwrap_or_default();
        return Err(Error::InvalidAlgebra(format!("{} fails ({w})", f.name)));
    }
    let n = alg.dim();
    let b = alg.bform();
    let e0: Vec<Rat> = (0..n).map(|k| if k == 0 { Rat::one() } else { Rat::zero() }).collect();
    let mut terms = Vec::new();
    for a in 0..n {
        for bb in a..n {
            let ab = alg.product(a, bb);
            for c in bb..n {
                let abc = alg.multiply(&ab, &alg.product(c, 0));
                let v = b.bilinear(&e0, &abc);
                if v.is_zero() {
                    continue;
                }
                let e = exponent(n, &[a, bb, c]);
                let mult: Rat = e.iter().map(|&k| factorial(k)).product();
                terms.push((e, v / mult));
            }
        }
    }
    CubicPotential::new(alg.basis(), terms)
}

/// `h = (phi_{0ab})^{-1}`.
fn dual_form(phi: &[Mat]) -> Result<(Mat, Mat)> {
    let bmat = phi[0].clone();
    let h = bmat.inverse().map_err(|_| Error::Degenerate("matrix d^3 phi / dz_0 dz_a dz_b is singular".into()))?;
    Ok((bmat, h))
}

/// First `(a,b,c,g)` where `sum_{d,f} phi_{abd} h_{df} phi_{fcg}` is not
/// symmetric under `a <-> c`.
fn associativity_witness(phi: &[Mat], h: &Mat) -> Option<[usize; 4]> {
    let n = h.rows();
    // x[a][b] = row vector phi_{ab.} h  (as matrix: row a*n+b)
    let mut ph: Vec<Vec<Rat>> = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            ph.push((0..n).map(|f| (0..n).fold(Rat::zero(), |acc, d| acc + &phi[a][(b, d)] * &h[(d, f)])).collect());
        }
    }
    let val = |a: usize, b: usize, c: usize, g: usize| -> Rat {
        ph[a * n + b].iter().enumerate().fold(Rat::zero(), |acc, (f, x)| acc + x * &phi[f][(c, g)])
    };
    for a in 0..n {
        for b in 0..n {
            for c in a + 1..n {
                for g in 0..n {
                    if val(a, b, c, g) != val(c, b, a, g) {
                        return Some([a, b, c, g]);
                    }
                }
            }
        }
    }
    None
}

/// The classical associativity relation. Returns `Ok(None)` when it holds
/// and `Ok(Some([a,b,c,g]))` with the first violated index tuple otherwise.
pub fn check_classical_wdvv(pot: &CubicPotential) -> Result<Option<[usize; 4]>> {
    let phi = pot.third_partials();
    let (_, h) = dual_form(&phi)?;
    Ok(associativity_witness(&phi, &h))
}

/// `B_{ab} = phi_{0ab}` and `T_a * T_b = sum_c phi_{abc} T_c^B`.
pub fn algebra_from_potential(pot: &CubicPotential) -> Result<FrobeniusAlgebra> {
    let phi = pot.third_partials();
    let (bmat, h) = dual_form(&phi)?;
    if let Some(w) = associativity_witness(&phi, &h) {
        return Err(Error::Associativity(w));
    }
    let n = pot.basis().dim();
    FrobeniusAlgebra::from_fn(pot.basis(), bmat, |a, b| {
        (0..n).map(|d| (0..n).fold(Rat::zero(), |acc, c| acc + &phi[a][(b, c)] * &h[(d, c)])).collect()
    })
}

/// The bilinear form of an adapted basis.
pub fn adapted_form(bs: GradedBasisSpec) -> Mat {
    let n = bs.dim();
    let m = bs.m();
    let mut bmat = Mat::zeros(n, n);
    bmat[(0, m)] = Rat::one();
    bmat[(m, 0)] = Rat::one();
    for j in 1..=bs.r {
        bmat[(bs.t2(j), bs.t6(j))] = Rat::one();
        bmat[(bs.t6(j), bs.t2(j))] = Rat::one();
    }
    for a in 1..=bs.s {
        bmat[(bs.t4(a), bs.t4(a))] = Rat::one();
    }
    bmat
}

/// Builds the adapted algebra with the given `P^a` matrices (symmetric,
/// `r x r`): `T_j*T_k = sum_a P^a_{jk} T_{r+a}`,
/// `T_j*T_{r+a} = sum_k P^a_{jk} T_{r+s+k}`, `T_{r+a}*T_{r+b} = delta T_m`,
/// `T_j*T_{r+s+l} = delta T_m`.
pub fn adapted_algebra(r: usize, s: usize, p: &[Mat]) -> Result<FrobeniusAlgebra> {
    let bs = GradedBasisSpec::new(r, s);
    if p.len() != s || p.iter().any(|m| m.shape() != (r, r)) {
        return Err(Error::InvalidAlgebra(format!("expected {s} symmetric {r}x{r} matrices P^a")));
    }
    let n = bs.dim();
    let m = bs.m();
    let bmat = adapted_form(bs);
    let deg = |a: usize| bs.degree(a);
    FrobeniusAlgebra::from_fn(bs, bmat, |a, b| {
        let mut v = vec![Rat::zero(); n];
        let (lo, hi) = if deg(a) <= deg(b) { (a, b) } else { (b, a) };
        match (deg(lo), deg(hi)) {
            (0, _) => v[hi] = Rat::one(),
            (2, 2) => {
                for c in 1..=s {
                    v[bs.t4(c)] = p[c - 1][(lo - 1, hi - 1)].clone();
                }
            }
            (2, 4) => {
                let c = hi - r;
                for k in 1..=r {
                    v[bs.t6(k)] = p[c - 1][(lo - 1, k - 1)].clone();
                }
            }
            (4, 4) if lo == hi => v[m] = Rat::one(),
            (2, 6) if hi - r - s == lo => v[m] = Rat::one(),
            _ => {}
        }
        v
    })
}

/// Small fixed algebras used in examples and tests.
pub mod fixtures {
    use super::*;
    use crate::rational::rat;

    /// Cohomology-style algebra of `P^4`: `T_p ~ h^p`, `h^a*h^b = h^{a+b}`,
    /// `B(h^a, h^b) = delta_{a+b,4}`.
    pub fn p4_algebra() -> FrobeniusAlgebra {
        adapted_algebra(1, 1, &[Mat::from_i64(&[&[1]])]).expect("fixed data")
    }

    /// `P^2 x P^2`: basis `1, h1, h2, h1^2, h1h2, h2^2, h1h2^2, h1^2h2,
    /// h1^2h2^2`. The degree-4 Gram matrix is indefinite, so this basis is
    /// not adapted.
    pub fn p2xp2_algebra() -> FrobeniusAlgebra {
        // exponents (e1, e2) of each basis vector
        let exps: [(u32, u32); 9] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (1, 2), (2, 1), (2, 2)];
        let find = |e: (u32, u32)| exps.iter().position(|&x| x == e);
        let bs = GradedBasisSpec::new(2, 3);
        let bmat = Mat::from_fn(9, 9, |a, b| {
            let e = (exps[a].0 + exps[b].0, exps[a].1 + exps[b].1);
            if e == (2, 2) {
                rat(1)
            } else {
                rat(0)
            }
        });
        FrobeniusAlgebra::from_fn(bs, bmat, |a, b| {
            let mut v = vec![rat(0); 9];
            if let Some(c) = find((exps[a].0 + exps[b].0, exps[a].1 + exps[b].1)) {
                v[c] = rat(1);
            }
            v
        })
        .expect("fixed data")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::rational::{frac, rat};

    #[test]
    fn p4_validates() {
        let alg = p4_algebra();
        let rep = validate_frobenius(&alg);
        assert!(rep.passed(), "{rep}");
        assert!(alg.is_adapted());
        // h * h^3 = h^4
        assert_eq!(alg.product(1, 3), vec![rat(0), rat(0), rat(0), rat(0), rat(1)]);
    }

    #[test]
    fn p2xp2_validates_but_is_not_adapted() {
        let alg = p2xp2_algebra();
        assert!(validate_frobenius(&alg).passed());
        assert!(!alg.is_adapted());
        assert!(alg.adapt_basis().is_err());
    }

    #[test]
    fn perturbed_constant_is_caught() {
        let mut alg = p4_algebra();
        alg.set_structure_constant(1, 1, 2, rat(2));
        let rep = validate_frobenius(&alg);
        assert!(!rep.passed());
        let compat = rep.get("b_compatibility").unwrap();
        let assoc = rep.get("associativity").unwrap();
        assert!(!compat.passed || !assoc.passed);
    }

    #[test]
    fn zero_positive_products_break_compatibility() {
        let p4 = p4_algebra();
        let alg = FrobeniusAlgebra::from_fn(p4.basis(), p4.bform().clone(), |a, b| {
            let mut v = vec![rat(0); 5];
            if a == 0 {
                v[b] = rat(1);
            } else if b == 0 {
                v[a] = rat(1);
            }
            v
        })
        .unwrap();
        let rep = validate_frobenius(&alg);
        let c = rep.get("b_compatibility").unwrap();
        assert!(!c.passed);
        assert!(c.witness.is_some());
    }

    #[test]
    fn p4_classical_potential() {
        let pot = classical_potential(&p4_algebra()).unwrap();
        let z = |idx: &[usize]| exponent(5, idx);
        let expected: BTreeMap<Vec<u32>, Rat> = [
            (z(&[0, 0, 4]), frac(1, 2)),
            (z(&[0, 1, 3]), rat(1)),
            (z(&[0, 2, 2]), frac(1, 2)),
            (z(&[1, 1, 2]), frac(1, 2)),
        ]
        .into_iter()
        .collect();
        assert_eq!(pot.coeffs, expected);
        assert!(pot.is_weighted_homogeneous());
        assert_eq!(check_classical_wdvv(&pot).unwrap(), None);
        assert_eq!(algebra_from_potential(&pot).unwrap(), p4_algebra());
    }

    #[test]
    fn pa_of_p4() {
        let p = pa_coefficients(&p4_algebra());
        assert_eq!(p, vec![Mat::from_i64(&[&[1]])]);
    }

    #[test]
    fn missing_unit_term_is_degenerate() {
        let pot = classical_potential(&p4_algebra()).unwrap();
        let terms = pot.terms().filter(|(e, _)| e.as_slice() != [2, 0, 0, 0, 1]).map(|(e, c)| (e.clone(), c.clone()));
        let broken = CubicPotential::new(pot.basis(), terms).unwrap();
        assert!(matches!(algebra_from_potential(&broken), Err(Error::Degenerate(_))));
    }

    #[test]
    fn rejects_wrong_weight() {
        let bs = GradedBasisSpec::new(1, 1);
        let r = CubicPotential::new(bs, [(vec![3, 0, 0, 0, 0], rat(1))]);
        assert!(matches!(r, Err(Error::NotQuasiHomogeneous { degree: 0, .. })));
    }

    #[test]
    fn adapting_a_rescaled_basis() {
        let alg = p4_algebra();
        let p = Mat::from_fn(5, 5, |i, j| {
            if i != j {
                rat(0)
            } else {
                [rat(1), rat(2), rat(3), rat(5), rat(7)][i].clone()
            }
        });
        let scaled = alg.change_basis(&p).unwrap();
        assert!(validate_frobenius(&scaled).passed());
        assert!(!scaled.is_adapted());
        let (adapted, _) = scaled.adapt_basis().unwrap();
        assert!(adapted.is_adapted());
        assert!(validate_frobenius(&adapted).passed());
    }

    #[test]
    fn associativity_violation_has_witness() {
        // with s = 1 associativity needs P_ij P_kl fully symmetric, so
        // P = x x^T works
        let mut alg = adapted_algebra(2, 1, &[Mat::from_i64(&[&[1, 1], &[1, 1]])]).unwrap();
        assert!(validate_frobenius(&alg).passed());
        let pot = classical_potential(&alg).unwrap();
        assert_eq!(check_classical_wdvv(&pot).unwrap(), None);
        // P_11 P_22 != P_12 P_12
        alg = adapted_algebra(2, 1, &[Mat::from_i64(&[&[1, 0], &[0, -1]])]).unwrap();
        assert!(!validate_frobenius(&alg).get("associativity").unwrap().passed);
    }
}

//! Quantum potentials `phi = phi_0 + sum_a z_{r+a} psi^a(q)`, the quantum
//! product, WDVV, the flat connection, and the potential -> Gamma direction.
//!
//! All derivatives use `q_j = e^{z_j}`, so `d/dz_j = theta_j` on series.

use num_traits::Zero;

use crate::asymptotics::{rho_component, AsymptoticData};
use crate::error::{Error, Result};
use crate::forms::{wedge, LogForm1};
use crate::frobenius::{
    adapted_form, algebra_from_potential, check_classical_wdvv, classical_potential, CubicPotential,
    FrobeniusAlgebra, GradedBasisSpec,
};
use crate::hodge::{check_max_unipotent, NilpotentOrbitData, OrbitProduct};
use crate::matrix::{Mat, SeriesMatrix};
use crate::rational::{format_rat, Rat};
use crate::report::{ValidationReport, Witness};
use crate::series::{monomials_up_to, total_degree, Monomial, QSeries};
use crate::zseries::ZMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumPotential {
    classical: CubicPotential,
    psi: Vec<QSeries>,
    order: u32,
}

impl QuantumPotential {
    /// Requires the classical part in adapted shape
    /// (`phi_{0ab}` equal to the adapted form), `s` series in `r` variables,
    /// and `psi^a(0) = 0`. Series are truncated to `order`.
    pub fn new(classical: CubicPotential, psi: Vec<QSeries>, order: u32) -> Result<Self> {
        let bs = classical.basis();
        if bs.r == 0 {
            return Err(Error::InvalidPotential("quantum potentials need r >= 1".into()));
        }
        if psi.len() != bs.s {
            return Err(Error::InvalidPotential(format!("expected {} series psi^a, found {}", bs.s, psi.len())));
        }
        let form = adapted_form(bs);
        for a in 0..bs.dim() {
            for b in 0..bs.dim() {
                if classical.third_partial(0, a, b) != form[(a, b)] {
                    return Err(Error::InvalidPotential(format!(
                        "classical part is not in adapted shape: d^3 phi/dz_0 dz_{a} dz_{b} = {}",
                        format_rat(&classical.third_partial(0, a, b))
                    )));
                }
            }
        }
        let mut out = Vec::with_capacity(psi.len());
        for (a, p) in psi.into_iter().enumerate() {
            if p.num_vars() != bs.r {
                return Err(Error::VarCountMismatch { left: bs.r, right: p.num_vars() });
            }
            if !p.constant_term().is_zero() {
                return Err(Error::ConstantTerm { expected: "0".into(), found: format!("psi^{} constant {}", a + 1, format_rat(&p.constant_term())) });
            }
            out.push(p.truncate(order).with_order(order.min(p.order())));
        }
        Ok(QuantumPotential { classical, psi: out, order })
    }

    pub fn from_algebra(alg: &FrobeniusAlgebra, psi: Vec<QSeries>, order: u32) -> Result<Self> {
        Self::new(classical_potential(alg)?, psi, order)
    }

    pub fn basis(&self) -> GradedBasisSpec {
        self.classical.basis()
    }

    pub fn r(&self) -> usize {
        self.basis().r
    }

    pub fn s(&self) -> usize {
        self.basis().s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn classical(&self) -> &CubicPotential {
        &self.classical
    }

    pub fn psi(&self) -> &[QSeries] {
        &self.psi
    }

    /// `P^a_{jk} = d^3 phi_0 / dz_j dz_k dz_{r+a}`, zero-based `a`, `j`, `k`.
    pub fn pa(&self) -> Vec<Mat> {
        let bs = self.basis();
        (1..=bs.s)
            .map(|a| Mat::from_fn(bs.r, bs.r, |j, k| self.classical.third_partial(bs.t2(j + 1), bs.t2(k + 1), bs.t4(a))))
            .collect()
    }

    /// The constant algebra determined by `phi_0`.
    pub fn classical_algebra(&self) -> Result<FrobeniusAlgebra> {
        algebra_from_potential(&self.classical)
    }

    /// `theta_i theta_j psi^a` as an `r x r` matrix, one per `a`.
    pub fn quantum_hessians(&self) -> Vec<Vec<Vec<QSeries>>> {
        let r = self.r();
        self.psi
            .iter()
            .map(|p| {
                let first: Vec<QSeries> = (0..r).map(|i| p.theta(i).expect("index in range")).collect();
                (0..r).map(|i| (0..r).map(|j| first[i].theta(j).expect("index in range")).collect()).collect()
            })
            .collect()
    }

    /// `d^3 phi / dz_a dz_b dz_c` on `z_0 = z_{r+a} = ... = 0`, as a series.
    pub fn third_derivative(&self, a: usize, b: usize, c: usize) -> QSeries {
        let hess = self.quantum_hessians();
        self.third_derivative_with(&hess, a, b, c)
    }

    fn third_derivative_with(&self, hess: &[Vec<Vec<QSeries>>], a: usize, b: usize, c: usize) -> QSeries {
        let bs = self.basis();
        let r = bs.r;
        let mut out = QSeries::constant(self.classical.third_partial(a, b, c), r, self.order);
        let mut idx = [a, b, c];
        idx.sort_by_key(|&x| bs.degree(x));
        if bs.degree(idx[0]) == 2 && bs.degree(idx[1]) == 2 && bs.degree(idx[2]) == 4 {
            let q = &hess[idx[2] - r - 1][idx[0] - 1][idx[1] - 1];
            out = &out + q;
        }
        out
    }
}

/// Quantum structure constants `T_a * T_b = sum_d c_{ab}^d(q) T_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumProduct {
    n: usize,
    consts: Vec<QSeries>,
}

impl QuantumProduct {
    pub fn structure_constant(&self, a: usize, b: usize, d: usize) -> &QSeries {
        &self.consts[(a * self.n + b) * self.n + d]
    }

    /// Matrix of `v -> T_a * v`.
    pub fn mult_matrix(&self, a: usize) -> SeriesMatrix {
        let s0 = &self.consts[0];
        SeriesMatrix::from_fn(self.n, self.n, s0.num_vars(), s0.order(), |d, b| self.structure_constant(a, b, d).clone())
            .expect("entries share variables")
    }

    /// Structure constants at `q = 0`.
    pub fn at_zero(&self, a: usize, b: usize, d: usize) -> Rat {
        self.structure_constant(a, b, d).constant_term()
    }
}

/// `T_a * T_b = sum_c (d^3 phi / dz_a dz_b dz_c) T_c^B`, with `T_c^B` the
/// `B`-dual basis.
pub fn quantum_product(pot: &QuantumPotential) -> Result<QuantumProduct> {
    let bs = pot.basis();
    let n = bs.dim();
    let b = adapted_form(bs);
    let h = b.inverse().map_err(|_| Error::Degenerate("B is singular".into()))?;
    let hess = pot.quantum_hessians();
    let mut consts = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for bb in 0..n {
            let third: Vec<QSeries> = (0..n).map(|c| pot.third_derivative_with(&hess, a, bb, c)).collect();
            for d in 0..n {
                let mut acc = QSeries::zero(bs.r, pot.order());
                for (c, t) in third.iter().enumerate() {
                    if !h[(d, c)].is_zero() && !t.is_zero() {
                        acc = &acc + &t.scale(&h[(d, c)]);
                    }
                }
                consts.push(acc);
            }
        }
    }
    Ok(QuantumProduct { n, consts })
}

/// Lowest-degree nonzero monomial of a residual, with its index tuple.
fn lowest(best: &mut Option<(Vec<usize>, Monomial)>, indices: &[usize], s: &QSeries) {
    if let Some((alpha, _)) = s.leading_monomial() {
        let key = |a: &Monomial| (total_degree(a), a.clone());
        let better = match best {
            None => true,
            Some((_, b)) => key(alpha) < key(b),
        };
        if better {
            *best = Some((indices.to_vec(), alpha.clone()));
        }
    }
}

/// Quantum part of WDVV:
/// `sum_a (P_ij Phi_kl + P_kl Phi_ij + Phi_ij Phi_kl)` equals the same
/// expression with `(i,j,k,l) -> (i,l,j,k)`, where `Phi^a_ij = theta_i theta_j psi^a`.
/// Returns the lowest-degree violation.
pub fn quantum_wdvv_witness(pot: &QuantumPotential) -> Option<Witness> {
    let r = pot.r();
    let p = pot.pa();
    let phi = pot.quantum_hessians();
    let side = |i: usize, j: usize, k: usize, l: usize| -> QSeries {
        let mut acc = QSeries::zero(r, pot.order());
        for a in 0..pot.s() {
            acc = &acc + &phi[a][k][l].scale(&p[a][(i, j)]);
            acc = &acc + &phi[a][i][j].scale(&p[a][(k, l)]);
            acc = &acc + &(&phi[a][i][j] * &phi[a][k][l]);
        }
        acc
    };
    let mut best = None;
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                for l in 0..r {
                    let res = &side(i, j, k, l) - &side(i, l, j, k);
                    lowest(&mut best, &[i, j, k, l], &res);
                }
            }
        }
    }
    best.map(|(idx, alpha)| Witness::monomial(&idx, &alpha))
}

/// WDVV for the full potential: the classical associativity relation and
/// the quantum relation, each with a witness on failure.
pub fn check_wdvv(pot: &QuantumPotential) -> ValidationReport {
    let mut rep = ValidationReport::new();
    match check_classical_wdvv(pot.classical()) {
        Ok(w) => rep.record("classical_wdvv", w.map(|w| Witness::indices(&w))),
        Err(e) => rep.fail("classical_wdvv", Witness::detail(e.to_string())),
    }
    rep.record("quantum_wdvv", quantum_wdvv_witness(pot));
    rep
}

/// Connection matrices: `nabla_{d/dz_j} = d/dz_j + A_j(q)` on the constant
/// frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionData {
    pub a: Vec<SeriesMatrix>,
}

impl ConnectionData {
    pub fn r(&self) -> usize {
        self.a.len()
    }

    pub fn as_form(&self) -> LogForm1 {
        LogForm1::new(self.a.clone()).expect("connection matrices share shape")
    }

    /// Constant terms `A_j(0)`.
    pub fn residues(&self) -> Vec<Mat> {
        self.a.iter().map(SeriesMatrix::constant_term).collect()
    }
}

/// `A_j`: `T_0 -> T_j`, `T_l -> sum_b (P^b_jl + theta_j theta_l psi^b) T_{r+b}`,
/// `T_{r+a} -> sum_k (P^a_jk + theta_j theta_k psi^a) T_{r+s+k}`,
/// `T_{r+s+l} -> delta_jl T_m`, `T_m -> 0`.
pub fn build_connection(pot: &QuantumPotential) -> ConnectionData {
    let bs = pot.basis();
    let (r, s, n, order) = (bs.r, bs.s, bs.dim(), pot.order());
    let p = pot.pa();
    let phi = pot.quantum_hessians();
    let entry = |a: usize, j: usize, k: usize| -> QSeries { &QSeries::constant(p[a][(j, k)].clone(), r, order) + &phi[a][j][k] };
    let a = (0..r)
        .map(|j| {
            let mut m = SeriesMatrix::zeros(n, n, r, order);
            m.set(bs.t2(j + 1), 0, QSeries::one(r, order));
            for l in 0..r {
                for b in 0..s {
                    m.set(bs.t4(b + 1), bs.t2(l + 1), entry(b, j, l));
                }
            }
            for aa in 0..s {
                for k in 0..r {
                    m.set(bs.t6(k + 1), bs.t4(aa + 1), entry(aa, j, k));
                }
            }
            m.set(bs.m(), bs.t6(j + 1), QSeries::one(r, order));
            m
        })
        .collect();
    ConnectionData { a }
}

/// Curvature `theta_j A_k - theta_k A_j + [A_j, A_k]`; lowest-degree
/// nonzero coefficient as witness `[j, k, row, col]`.
pub fn check_flatness(conn: &ConnectionData) -> Option<Witness> {
    if conn.r() < 2 {
        return None;
    }
    let form = conn.as_form();
    let curv = form.exterior_derivative_2().expect("shapes agree").try_add(&wedge(&form, &form).expect("shapes agree")).expect("shapes agree");
    curv.first_nonzero().map(|((j, k), (row, col), alpha)| Witness::monomial(&[j, k, row, col], &alpha))
}

/// `Q A_j + A_j^T Q = 0`; witness `[j, row, col]`.
pub fn check_q_flatness(conn: &ConnectionData, q: &Mat) -> Option<Witness> {
    for (j, a) in conn.a.iter().enumerate() {
        let lhs = a.mul_const_left(q).ok()?.try_add(&a.transpose().mul_const_right(q).ok()?).ok()?;
        let mut best = None;
        for ((row, col), s) in lhs.entries() {
            lowest(&mut best, &[j, row, col], s);
        }
        if let Some((idx, alpha)) = best {
            return Some(Witness::monomial(&idx, &alpha));
        }
    }
    None
}

/// `A_j F^p ⊆ F^{p-1}` for `F^p` spanned by degrees `<= 8 - 2p`: every
/// nonzero entry `(row, col)` needs `deg T_row <= deg T_col + 2`.
pub fn check_transversality(conn: &ConnectionData, bs: GradedBasisSpec) -> Option<Witness> {
    for (j, a) in conn.a.iter().enumerate() {
        for ((row, col), s) in a.entries() {
            if !s.is_zero() && bs.degree(row) > bs.degree(col) + 2 {
                return Some(Witness::indices(&[j, row, col]));
            }
        }
    }
    None
}

/// Gauge matrix `H(q)` with `H(0) = I` such that `H(q) exp(-sum z_j A_j(0))`
/// is a flat frame: `theta_j H = H A_j(0) - A_j H` for every `j`.
pub fn flat_gauge(conn: &ConnectionData) -> Result<SeriesMatrix> {
    let r = conn.r();
    let first = conn.a.first().ok_or(Error::InvalidPotential("empty connection".into()))?;
    let (n, order) = (first.rows(), first.order());
    let l: Vec<Mat> = conn.residues();
    let l_sum = l.iter().fold(Mat::zeros(n, n), |acc, m| &acc + m);
    let aq: Vec<Vec<(Monomial, Mat)>> = conn
        .a
        .iter()
        .map(|a| a.support().into_iter().filter(|g| total_degree(g) > 0).map(|g| (g.clone(), a.coefficient(&g))).collect())
        .collect();
    let mut h: std::collections::BTreeMap<Monomial, Mat> = std::collections::BTreeMap::new();
    h.insert(vec![0; r], Mat::identity(n));
    for alpha in monomials_up_to(r, order).into_iter().skip(1) {
        let deg = Rat::from_integer(total_degree(&alpha).into());
        let rhs: Vec<Mat> = (0..r)
            .map(|j| {
                let mut acc = Mat::zeros(n, n);
                for (g, m) in &aq[j] {
                    if g.iter().zip(&alpha).all(|(x, y)| x <= y) {
                        let rest: Monomial = alpha.iter().zip(g).map(|(x, y)| x - y).collect();
                        if let Some(hb) = h.get(&rest) {
                            acc = &acc - &(m * hb);
                        }
                    }
                }
                acc
            })
            .collect();
        let y = rhs.iter().fold(Mat::zeros(n, n), |acc, m| &acc + m);
        // |alpha| X - [X, L] = Y, solved by a terminating Neumann series
        let mut term = y.scale(&(Rat::from_integer(1.into()) / &deg));
        let mut x = term.clone();
        for _ in 0..2 * n {
            term = term.commutator(&l_sum).scale(&(Rat::from_integer(1.into()) / &deg));
            if term.is_zero() {
                break;
            }
            x = &x + &term;
        }
        for j in 0..r {
            let lhs = x.scale(&Rat::from_integer(alpha[j].into()));
            let want = &x.commutator(&l[j]) + &rhs[j];
            if lhs != want {
                let k = (0..r).find(|&k| k != j).unwrap_or(j);
                return Err(Error::NotFlat { j, k, alpha });
            }
        }
        if !x.is_zero() {
            h.insert(alpha, x);
        }
    }
    Ok(SeriesMatrix::from_coefficients(n, n, r, order, h.iter()))
}

/// Flat frame `H(q) exp(-sum z_j A_j(0))`; column `a` is `T_a^flat` in the
/// constant frame.
pub fn flat_frame(pot: &QuantumPotential) -> Result<ZMatrix> {
    let conn = build_connection(pot);
    let h = flat_gauge(&conn)?;
    let neg: Vec<Mat> = conn.residues().iter().map(|m| -m).collect();
    ZMatrix::exp_nilpotent_sum(&neg, pot.order())?.mul_series_left(&h)
}

/// `(d/dz_j + A_j) M` for each `j`.
pub fn flat_frame_residual(conn: &ConnectionData, frame: &ZMatrix) -> Result<Vec<ZMatrix>> {
    (0..conn.r()).map(|j| frame.derivative(j)?.try_add(&frame.mul_series_left(&conn.a[j])?)).collect()
}

/// `Gamma(q)` with its determining blocks `C_{ka} = theta_k psi^a`,
/// `D_a = -psi^a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaData {
    /// `c[k][a]`, `k < r`, `a < s`
    pub c: Vec<Vec<QSeries>>,
    pub d: Vec<QSeries>,
    pub gamma: SeriesMatrix,
}

impl GammaData {
    pub fn c_matrix(&self) -> SeriesMatrix {
        let r = self.c.len();
        let s = self.d.len();
        SeriesMatrix::from_fn(r, s, self.gamma.num_vars(), self.gamma.order(), |k, a| self.c[k][a].clone())
            .expect("entries share variables")
    }
}

/// `Gamma = -log H` for the flat gauge `H`, so that `exp(-Gamma)` expresses
/// the canonical sections in the constant frame.
pub fn gamma_from_potential(pot: &QuantumPotential) -> Result<GammaData> {
    let conn = build_connection(pot);
    let h = flat_gauge(&conn)?;
    let gamma = h.log_unipotent()?.scale(&-Rat::from_integer(1.into()));
    let r = pot.r();
    let c = (0..r).map(|k| pot.psi().iter().map(|p| p.theta(k).expect("index in range")).collect()).collect();
    let d = pot.psi().iter().map(|p| -p).collect();
    Ok(GammaData { c, d, gamma })
}

/// `Xi_{ka} = sum_j (P^a_jk + theta_j C_ka) dz_j` as a 1-form of `r x s`
/// matrices.
pub fn xi_form(pa: &[Mat], c: &SeriesMatrix) -> Result<LogForm1> {
    let (r, s) = c.shape();
    let comps = (0..r)
        .map(|j| {
            let mut m = c.theta(j)?;
            for k in 0..r {
                for a in 0..s {
                    let p = QSeries::constant(pa[a][(j, k)].clone(), r, c.order());
                    m.set(k, a, &p + m.get(k, a));
                }
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    LogForm1::new(comps)
}

/// `Xi ^ Xi^T = 0`; witness `[j, k, row, col]` with the lowest-degree
/// monomial.
pub fn xi_check_from(pa: &[Mat], c: &SeriesMatrix) -> Result<Option<Witness>> {
    if c.rows() < 2 {
        return Ok(None);
    }
    let xi = xi_form(pa, c)?;
    let w = wedge(&xi, &xi.transpose())?;
    Ok(w.first_nonzero().map(|((j, k), (row, col), alpha)| Witness::monomial(&[j, k, row, col], &alpha)))
}

pub fn xi_check(pot: &QuantumPotential) -> Option<Witness> {
    let g = gamma_from_potential_blocks(pot);
    xi_check_from(&pot.pa(), &g).expect("shapes agree")
}

fn gamma_from_potential_blocks(pot: &QuantumPotential) -> SeriesMatrix {
    let r = pot.r();
    SeriesMatrix::from_fn(r, pot.s(), r, pot.order(), |k, a| pot.psi()[a].theta(k).expect("index in range"))
        .expect("entries share variables")
}

/// The orbit of the classical algebra paired with `gamma_from_potential`.
pub fn asymptotic_data(pot: &QuantumPotential) -> Result<AsymptoticData> {
    let orbit = NilpotentOrbitData::from_algebra(&pot.classical_algebra()?)?;
    AsymptoticData::new(orbit, gamma_from_potential(pot)?.gamma)
}

/// Reads `C` and `D` off `Gamma` in the graded basis of `prod` (moved to an
/// adapted basis if needed) and returns `phi_0 + sum_a z_{r+a} psi^a` with
/// `psi^a = -D_a`, after checking `theta_k D_a = -C_{ka}`.
pub fn potential_from_gamma(asym: &AsymptoticData, prod: &OrbitProduct) -> Result<QuantumPotential> {
    let mu = check_max_unipotent(asym.orbit());
    if let Some(f) = mu.failures().next() {
        return Err(Error::NotMaximallyUnipotent(f.name.clone()));
    }
    let (alg, basis) = if prod.algebra.is_adapted() {
        (prod.algebra.clone(), prod.basis.clone())
    } else {
        let (alg, p) = prod.algebra.adapt_basis()?;
        (alg, &prod.basis * &p)
    };
    let bs = alg.basis();
    if bs.r != asym.r() || bs.dim() != asym.orbit().dim() {
        return Err(Error::InvalidOrbit("graded basis does not match the orbit".into()));
    }
    for (j, g) in rho_component(asym)?.iter().enumerate() {
        if !g.is_zero() {
            return Err(Error::NotCanonical(format!("rho component gamma_{} = {g}", j + 1)));
        }
    }
    let sinv = basis.inverse()?;
    let gs = asym.gamma().mul_const_left(&sinv)?.mul_const_right(&basis)?;
    let mut psi = Vec::with_capacity(bs.s);
    for a in 1..=bs.s {
        let d = gs.get(bs.m(), bs.t4(a));
        for k in 1..=bs.r {
            let res = &d.theta(k - 1)? + gs.get(bs.t6(k), bs.t4(a));
            if let Some((alpha, _)) = res.leading_monomial() {
                return Err(Error::Integrability { a: a - 1, k: k - 1, alpha: alpha.clone() });
            }
        }
        psi.push(-d);
    }
    QuantumPotential::new(classical_potential(&alg)?, psi, asym.order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{solve_gamma, AsymptoticData};
    use crate::frobenius::adapted_algebra;
    use crate::frobenius::fixtures::p4_algebra;
    use crate::hodge::{product_from_orbit, q_from_b};
    use crate::rational::rat;

    fn p4_with(psi: QSeries) -> QuantumPotential {
        QuantumPotential::from_algebra(&p4_algebra(), vec![psi], 4).unwrap()
    }

    #[test]
    fn zero_psi_gives_classical_product() {
        let pot = p4_with(QSeries::zero(1, 4));
        let qp = quantum_product(&pot).unwrap();
        let alg = p4_algebra();
        for a in 0..5 {
            for b in 0..5 {
                for d in 0..5 {
                    assert_eq!(qp.structure_constant(a, b, d), &QSeries::constant(alg.structure_constant(a, b, d).clone(), 1, 4));
                }
            }
        }
    }

    #[test]
    fn p4_quantum_correction() {
        let q1 = QSeries::var(0, 1, 4);
        let pot = p4_with(q1.clone());
        let qp = quantum_product(&pot).unwrap();
        let one_plus_q = &QSeries::one(1, 4) + &q1;
        assert_eq!(qp.structure_constant(1, 1, 2), &one_plus_q);
        for b in 0..5 {
            for d in 0..5 {
                let want = if b == d { QSeries::one(1, 4) } else { QSeries::zero(1, 4) };
                assert_eq!(qp.structure_constant(0, b, d), &want);
            }
        }
        let conn = build_connection(&pot);
        assert_eq!(conn.a[0].get(2, 1), &one_plus_q);
        assert_eq!(conn.a[0], qp.mult_matrix(1));
    }

    #[test]
    fn rejects_constant_psi() {
        let r = QuantumPotential::from_algebra(&p4_algebra(), vec![QSeries::one(1, 3)], 3);
        assert!(matches!(r, Err(Error::ConstantTerm { .. })));
    }

    #[test]
    fn single_variable_checks_pass() {
        let psi = QSeries::from_terms(1, 5, [(vec![1], rat(3)), (vec![2], rat(-7))]).unwrap();
        let pot = QuantumPotential::from_algebra(&p4_algebra(), vec![psi], 5).unwrap();
        assert!(check_wdvv(&pot).passed());
        let conn = build_connection(&pot);
        assert_eq!(check_flatness(&conn), None);
        assert_eq!(xi_check(&pot), None);
        let q = q_from_b(&p4_algebra().bform().clone(), pot.basis()).unwrap();
        assert_eq!(check_q_flatness(&conn, &q), None);
        assert_eq!(check_transversality(&conn, pot.basis()), None);
        assert_eq!(conn.residues()[0], p4_algebra().mult_matrix(1));
    }

    #[test]
    fn wrong_q_signs_break_q_flatness() {
        let pot = p4_with(QSeries::var(0, 1, 4));
        let conn = build_connection(&pot);
        assert!(check_q_flatness(&conn, p4_algebra().bform()).is_some());
    }

    #[test]
    fn degree_raising_entry_breaks_transversality() {
        let pot = p4_with(QSeries::zero(1, 4));
        let mut conn = build_connection(&pot);
        conn.a[0].set(4, 0, QSeries::one(1, 4));
        assert_eq!(check_transversality(&conn, pot.basis()), Some(Witness::indices(&[0, 4, 0])));
    }

    #[test]
    fn flat_frame_matches_closed_form() {
        let q1 = QSeries::var(0, 1, 4);
        let psi = &q1 + &(&q1 * &q1).scale(&rat(5));
        let pot = p4_with(psi.clone());
        let frame = flat_frame(&pot).unwrap();
        let conn = build_connection(&pot);
        for res in flat_frame_residual(&conn, &frame).unwrap() {
            assert!(res.is_zero());
        }
        // T_4^flat = T_4, T_3^flat = T_3 - z_1 T_4
        let col = |c: usize| frame.select_columns(&[c]);
        let mut t4 = ZMatrix::zeros(5, 1, 1, 4);
        t4.add_term(vec![0], SeriesMatrix::from_const(&Mat::from_i64(&[&[0], &[0], &[0], &[0], &[1]]), 1, 4));
        assert_eq!(col(4), t4);
        let mut t3 = ZMatrix::zeros(5, 1, 1, 4);
        t3.add_term(vec![0], SeriesMatrix::from_const(&Mat::from_i64(&[&[0], &[0], &[0], &[1], &[0]]), 1, 4));
        t3.add_term(vec![1], SeriesMatrix::from_const(&Mat::from_i64(&[&[0], &[0], &[0], &[0], &[-1]]), 1, 4));
        assert_eq!(col(3), t3);
        // T_2^flat = T_2 - d(P + psi)/dz T_3 + (P + psi) T_4 with P = z^2/2
        let mut t2 = ZMatrix::zeros(5, 1, 1, 4);
        let vec5 = |row: usize, s: QSeries| {
            let mut m = SeriesMatrix::zeros(5, 1, 1, 4);
            m.set(row, 0, s);
            m
        };
        t2.add_term(vec![0], vec5(2, QSeries::one(1, 4)));
        t2.add_term(vec![0], vec5(3, -&psi.theta(0).unwrap()));
        t2.add_term(vec![0], vec5(4, psi.clone()));
        t2.add_term(vec![1], vec5(3, QSeries::constant(rat(-1), 1, 4)));
        t2.add_term(vec![2], vec5(4, QSeries::constant(crate::rational::frac(1, 2), 1, 4)));
        assert_eq!(col(2), t2);
    }

    #[test]
    fn gamma_blocks_for_p4() {
        let q1 = QSeries::var(0, 1, 4);
        let g = gamma_from_potential(&p4_with(q1.clone())).unwrap();
        assert_eq!(g.c[0][0], q1);
        assert_eq!(g.d[0], -&q1);
        // V4 -> V6: C, V4 -> V8: D, V2 -> V4: C^T, V0 -> V4: -D^T
        assert_eq!(g.gamma.get(3, 2), &q1);
        assert_eq!(g.gamma.get(4, 2), &-&q1);
        assert_eq!(g.gamma.get(2, 1), &q1);
        assert_eq!(g.gamma.get(2, 0), &q1);
        assert_eq!(g.gamma.constant_term(), Mat::zeros(5, 5));
        let zero = gamma_from_potential(&p4_with(QSeries::zero(1, 4))).unwrap();
        assert!(zero.gamma.is_zero());
    }

    fn two_curves(order: u32) -> QuantumPotential {
        let p = vec![Mat::from_i64(&[&[1, 0], &[0, 0]]), Mat::from_i64(&[&[0, 0], &[0, 1]])];
        let alg = adapted_algebra(2, 2, &p).unwrap();
        let psi1 = QSeries::from_terms(2, order, [(vec![1, 0], rat(2)), (vec![2, 0], rat(1))]).unwrap();
        let psi2 = QSeries::from_terms(2, order, [(vec![0, 1], rat(-1)), (vec![0, 3], rat(4))]).unwrap();
        QuantumPotential::from_algebra(&alg, vec![psi1, psi2], order).unwrap()
    }

    fn e0(n: usize) -> Vec<Rat> {
        crate::hodge::unit_vector(n, 0)
    }

    #[test]
    fn recovers_potential() {
        for pot in [p4_with(QSeries::var(0, 1, 4)), p4_with(QSeries::zero(1, 4)), two_curves(4)] {
            let asym = asymptotic_data(&pot).unwrap();
            let prod = product_from_orbit(asym.orbit(), &e0(pot.basis().dim())).unwrap();
            assert_eq!(potential_from_gamma(&asym, &prod).unwrap(), pot);
        }
    }

    #[test]
    fn solver_reproduces_gamma() {
        for pot in [p4_with(QSeries::var(0, 1, 4)), two_curves(4)] {
            let asym = asymptotic_data(&pot).unwrap();
            let solved = solve_gamma(asym.orbit(), &asym.gamma_minus_one()).unwrap();
            assert_eq!(solved.gamma(), asym.gamma());
        }
    }

    #[test]
    fn integrability_violation_is_reported() {
        let orbit = NilpotentOrbitData::from_algebra(&p4_algebra()).unwrap();
        let q1 = QSeries::var(0, 1, 4);
        let mut gamma = SeriesMatrix::zeros(5, 5, 1, 4);
        gamma.set(3, 2, q1.clone());
        gamma.set(4, 2, q1.clone());
        let asym = AsymptoticData::new(orbit, gamma).unwrap();
        let prod = product_from_orbit(asym.orbit(), &e0(5)).unwrap();
        let err = potential_from_gamma(&asym, &prod).unwrap_err();
        assert_eq!(err, Error::Integrability { a: 0, k: 0, alpha: vec![1] });
    }

    #[test]
    fn gamma_is_canonical() {
        let asym = asymptotic_data(&two_curves(4)).unwrap();
        assert!(rho_component(&asym).unwrap().iter().all(QSeries::is_zero));
    }
}
